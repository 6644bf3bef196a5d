#include <algorithm>
#include <cmath>
#include <random>

#include "siclab/fft.hpp"
#include "siclab/waveform.hpp"

namespace siclab {

ResourceGrid::ResourceGrid(Eigen::Index subcarriers, Eigen::Index symbols)
    : values(Eigen::MatrixXcd::Zero(subcarriers, symbols)),
      pilot_mask(BoolMatrix::Constant(subcarriers, symbols, false)),
      data_mask(BoolMatrix::Constant(subcarriers, symbols, false)) {}

void ResourceGrid::validate() const {
    if (pilot_mask.rows() != values.rows() || pilot_mask.cols() != values.cols() ||
        data_mask.rows() != values.rows() || data_mask.cols() != values.cols()) {
        throw InputError("ResourceGrid: mask shape differs from value shape");
    }
    if ((pilot_mask && data_mask).any()) {
        throw InputError("ResourceGrid: pilot and data masks overlap");
    }
}

std::span<const std::uint8_t> BitStream::segment(std::size_t i) const {
    if (i >= framing.size()) throw InputError("BitStream: segment index out of range");
    const std::size_t end = i + 1 < framing.size() ? framing[i + 1] : bits.size();
    return std::span<const std::uint8_t>(bits).subspan(framing[i], end - framing[i]);
}

void BitStream::validate() const {
    for (std::size_t i = 1; i < framing.size(); ++i) {
        if (framing[i] <= framing[i - 1]) throw InputError("BitStream: framing not strictly increasing");
    }
    if (!framing.empty() && framing.back() > bits.size()) throw InputError("BitStream: framing past end");
}

}  // namespace siclab

namespace siclab::waveform {

void NrConfig::validate() const {
    if (!(scs_hz > 0.0) || !(native_rate > 0.0)) throw ConfigError("nr: rates must be positive");
    if (n_prb < 1) throw ConfigError("nr: n_prb must be >= 1");
    if (symbols_per_slot < 1 || slots < 1) throw ConfigError("nr: symbols_per_slot and slots must be >= 1");
    const double ratio = native_rate / scs_hz;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        throw ConfigError("nr: native_rate / scs_hz must be an integer FFT size");
    }
    if (subcarriers() > fft_size()) throw ConfigError("nr: resource grid exceeds FFT size");
    if (!cp_lengths.empty() && static_cast<int>(cp_lengths.size()) != symbols_per_slot) {
        throw ConfigError("nr: cp_lengths must list one value per symbol of a slot");
    }
    for (int cp : cp_pattern()) {
        if (cp < 0 || cp > fft_size()) throw ConfigError("nr: CP length out of range");
    }
    if (pilots.symbols.empty() || pilots.subcarrier_stride < 1 || pilots.subcarrier_offset < 0 ||
        pilots.subcarrier_offset >= std::min(pilots.subcarrier_stride, subcarriers())) {
        throw ConfigError("nr: invalid pilot lattice");
    }
    for (int s : pilots.symbols) {
        if (s < 0 || s >= symbols_per_slot) throw ConfigError("nr: pilot symbol outside slot");
    }
    if (modulation != Modulation::Qpsk && modulation != Modulation::Qam16 && modulation != Modulation::Qam64) {
        throw ConfigError("nr: modulation must be QPSK, 16QAM or 64QAM");
    }
}

int NrConfig::fft_size() const { return static_cast<int>(std::lround(native_rate / scs_hz)); }

std::vector<int> NrConfig::cp_pattern() const {
    if (!cp_lengths.empty()) return cp_lengths;
    // Normal CP: 144/2048 of the FFT, plus 16/2048 on the first symbol of each half slot.
    const int n = fft_size();
    const int short_cp = static_cast<int>(std::lround(144.0 * n / 2048.0));
    const int long_cp = static_cast<int>(std::lround(160.0 * n / 2048.0));
    std::vector<int> cps(static_cast<std::size_t>(symbols_per_slot), short_cp);
    cps[0] = long_cp;
    if (symbols_per_slot == 14) cps[7] = long_cp;
    return cps;
}

std::size_t NrConfig::slot_length() const {
    std::size_t len = 0;
    for (int cp : cp_pattern()) len += static_cast<std::size_t>(cp + fft_size());
    return len;
}

std::size_t NrConfig::frame_length() const { return slot_length() * static_cast<std::size_t>(slots); }

int NrConfig::cp_length(int symbol) const {
    return cp_pattern()[static_cast<std::size_t>(symbol % symbols_per_slot)];
}

std::size_t NrConfig::symbol_start(int symbol) const {
    const auto cps = cp_pattern();
    const int slot = symbol / symbols_per_slot;
    const int l = symbol % symbols_per_slot;
    std::size_t off = slot_length() * static_cast<std::size_t>(slot);
    for (int i = 0; i < l; ++i) off += static_cast<std::size_t>(cps[static_cast<std::size_t>(i)] + fft_size());
    return off;
}

int NrConfig::bin(int subcarrier) const {
    const int n = fft_size();
    return ((subcarrier - subcarriers() / 2) % n + n) % n;
}

bool NrConfig::is_pilot(int subcarrier, int symbol) const {
    const int l = symbol % symbols_per_slot;
    if (std::find(pilots.symbols.begin(), pilots.symbols.end(), l) == pilots.symbols.end()) return false;
    return subcarrier >= pilots.subcarrier_offset &&
           (subcarrier - pilots.subcarrier_offset) % pilots.subcarrier_stride == 0;
}

IqBuffer nr_modulate(const NrConfig& cfg, const Eigen::MatrixXcd& grid) {
    cfg.validate();
    const int n = cfg.fft_size();
    const int k_used = cfg.subcarriers();
    if (grid.rows() != k_used || grid.cols() != cfg.total_symbols()) {
        throw InputError("nr_modulate: grid shape does not match configuration");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(k_used));
    ComplexVector out;
    out.reserve(cfg.frame_length());
    ComplexVector bins(static_cast<std::size_t>(n));
    for (int l = 0; l < cfg.total_symbols(); ++l) {
        std::fill(bins.begin(), bins.end(), Complex{});
        for (int k = 0; k < k_used; ++k) bins[static_cast<std::size_t>(cfg.bin(k))] = grid(k, l) * scale;
        fft::inverse(bins);
        const int cp = cfg.cp_length(l);
        out.insert(out.end(), bins.end() - cp, bins.end());
        out.insert(out.end(), bins.begin(), bins.end());
    }
    return IqBuffer(std::move(out), cfg.native_rate);
}

Eigen::VectorXcd nr_demodulate_symbol(const NrConfig& cfg, std::span<const Complex> body) {
    const int n = cfg.fft_size();
    if (static_cast<int>(body.size()) != n) throw InputError("nr_demodulate_symbol: body must be fft_size long");
    ComplexVector bins(body.begin(), body.end());
    fft::forward(bins);
    const double scale = std::sqrt(static_cast<double>(cfg.subcarriers())) / n;
    Eigen::VectorXcd col(cfg.subcarriers());
    for (int k = 0; k < cfg.subcarriers(); ++k) col(k) = bins[static_cast<std::size_t>(cfg.bin(k))] * scale;
    return col;
}

NrFrame generate_nr_frame(const NrConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const int k_used = cfg.subcarriers();
    const int n_sym = cfg.total_symbols();
    ResourceGrid grid(k_used, n_sym);
    BitStream bits;

    std::mt19937_64 bit_rng(derive_seed(seed, 1));
    std::mt19937_64 pilot_rng(derive_seed(seed, 2));
    std::uniform_int_distribution<int> coin(0, 1);
    const Constellation data_map(cfg.modulation);
    const Constellation pilot_map(Modulation::Qpsk);
    const auto bps = static_cast<std::size_t>(data_map.bits_per_symbol());
    std::vector<std::uint8_t> sym_bits(bps);
    std::uint8_t pilot_bits[2];

    for (int l = 0; l < n_sym; ++l) {
        if (l % cfg.symbols_per_slot == 0) bits.framing.push_back(bits.bits.size());
        for (int k = 0; k < k_used; ++k) {
            if (cfg.is_pilot(k, l)) {
                pilot_bits[0] = static_cast<std::uint8_t>(coin(pilot_rng));
                pilot_bits[1] = static_cast<std::uint8_t>(coin(pilot_rng));
                grid.values(k, l) = pilot_map.map(pilot_bits);
                grid.pilot_mask(k, l) = true;
            } else {
                for (auto& b : sym_bits) b = static_cast<std::uint8_t>(coin(bit_rng));
                grid.values(k, l) = data_map.map(sym_bits);
                grid.data_mask(k, l) = true;
                bits.bits.insert(bits.bits.end(), sym_bits.begin(), sym_bits.end());
            }
        }
    }
    IqBuffer wf = nr_modulate(cfg, grid.values);
    return NrFrame{std::move(wf), std::move(grid), std::move(bits)};
}

}  // namespace siclab::waveform
