#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "siclab/fft.hpp"
#include "siclab/waveform.hpp"

namespace siclab::waveform {
namespace {

// Long training sequence on subcarriers -26..26 (index k + 26).
constexpr std::array<int, 53> kLtf = {1,  1,  -1, -1, 1,  1, -1, 1,  -1, 1,  1,  1,  1,  1,  1,  -1, -1, 1,
                                      1,  -1, 1,  -1, 1,  1, 1,  1,  0,  1,  -1, -1, 1,  1,  -1, 1,  -1, 1,
                                      -1, -1, -1, -1, -1, 1, 1,  -1, -1, 1,  -1, 1,  -1, 1,  1,  1,  1};

// Short training sequence, in units of (1+j) * sqrt(13/6), on subcarriers -26..26.
constexpr std::array<int, 53> kStf = {0, 0, 1,  0, 0, 0, -1, 0, 0, 0, 1, 0, 0, 0, -1, 0, 0, 0,
                                      -1, 0, 0, 0, 1, 0, 0, 0, 0,  0, 0, 0, -1, 0, 0, 0, -1, 0,
                                      0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1,  0, 0, 0, 1, 0, 0};

constexpr std::array<int, 4> kPilotOrder = {-21, -7, 7, 21};
constexpr std::array<double, 4> kPilotBase = {1.0, 1.0, 1.0, -1.0};

std::uint8_t crc8(std::span<const std::uint8_t> bits) {
    std::uint8_t crc = 0;
    for (auto b : bits) {
        const bool top = ((crc >> 7) & 1) != (b & 1);
        crc = static_cast<std::uint8_t>(crc << 1);
        if (top) crc ^= 0x07;
    }
    return crc;
}

void push_field(std::vector<std::uint8_t>& out, unsigned value, int width) {
    for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((value >> i) & 1));
}

unsigned read_field(std::span<const std::uint8_t> bits, std::size_t first, int width) {
    unsigned v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | (bits[first + static_cast<std::size_t>(i)] & 1);
    return v;
}

ComplexVector ofdm_symbol(const ComplexVector& tones_by_bin, int cp) {
    ComplexVector body = tones_by_bin;
    fft::inverse(body);
    ComplexVector out(body.end() - cp, body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

}  // namespace

void WifiConfig::validate() const {
    if (!(bandwidth_hz > 0.0)) throw ConfigError("wifi: bandwidth must be positive");
    if (mcs < 0 || mcs > 9) throw ConfigError("wifi: mcs must be in 0..9");
    if (payload_bytes < 1) throw ConfigError("wifi: payload_bytes must be >= 1");
    if (payload_bytes > 65535) throw ConfigError("wifi: payload_bytes must fit the 16-bit length field");
    if (packets_per_burst < 1 || packets_per_burst > 4095) throw ConfigError("wifi: packets_per_burst must be in 1..4095");
    if (!(idle_gap_s >= 0.0) || !std::isfinite(idle_gap_s)) throw ConfigError("wifi: idle_gap_s must be >= 0");
    if (preamble.short_repetitions < 2 || preamble.long_symbols < 2 || preamble.header_symbols < 1) {
        throw ConfigError("wifi: preamble needs >= 2 short periods, >= 2 long symbols, >= 1 header symbol");
    }
    if (data_subcarriers < 48 || data_subcarriers > 52) throw ConfigError("wifi: data_subcarriers must be in 48..52");
}

Modulation WifiConfig::modulation() const {
    if (mcs == 0) return Modulation::Bpsk;
    if (mcs <= 2) return Modulation::Qpsk;
    if (mcs <= 4) return Modulation::Qam16;
    if (mcs <= 7) return Modulation::Qam64;
    return Modulation::Qam256;
}

int WifiConfig::bits_per_ofdm_symbol() const { return data_subcarriers * bits_per_symbol(modulation()); }

int WifiConfig::data_symbols() const {
    const int bits = payload_bytes * 8;
    return (bits + bits_per_ofdm_symbol() - 1) / bits_per_ofdm_symbol();
}

std::size_t WifiConfig::stf_length() const {
    return static_cast<std::size_t>(kWifiStfPeriod * preamble.short_repetitions);
}

std::size_t WifiConfig::ltf_length() const {
    return static_cast<std::size_t>(kWifiLtfGuard + kWifiFft * preamble.long_symbols);
}

std::size_t WifiConfig::packet_length() const {
    return stf_length() + ltf_length() +
           static_cast<std::size_t>((kWifiFft + kWifiCp) * (preamble.header_symbols + data_symbols()));
}

std::size_t WifiConfig::gap_samples() const {
    return static_cast<std::size_t>(std::llround(idle_gap_s * sample_rate()));
}

std::size_t WifiConfig::burst_length() const {
    const auto n = static_cast<std::size_t>(packets_per_burst);
    return n * packet_length() + (n - 1) * gap_samples();
}

WifiLayout wifi_layout(const WifiConfig& cfg) {
    WifiLayout layout;
    const int n_pilots = 52 - cfg.data_subcarriers;
    for (int i = 0; i < n_pilots; ++i) {
        layout.pilots.push_back(kPilotOrder[static_cast<std::size_t>(i)]);
        layout.pilot_base.push_back(kPilotBase[static_cast<std::size_t>(i)]);
    }
    for (int k = -26; k <= 26; ++k) {
        if (k == 0) continue;
        if (std::find(layout.pilots.begin(), layout.pilots.end(), k) != layout.pilots.end()) continue;
        layout.data.push_back(k);
    }
    return layout;
}

double wifi_pilot_polarity(int n) {
    // x^7 + x^4 + 1 scrambler seeded with all ones; period 127.
    static const std::array<double, 127> seq = [] {
        std::array<double, 127> s{};
        unsigned state = 0x7F;
        for (auto& v : s) {
            const unsigned bit = ((state >> 6) ^ (state >> 3)) & 1U;
            state = ((state << 1) | bit) & 0x7FU;
            v = bit ? -1.0 : 1.0;
        }
        return s;
    }();
    return seq[static_cast<std::size_t>(((n % 127) + 127) % 127)];
}

double wifi_ltf_value(int k) {
    if (k < -26 || k > 26) return 0.0;
    return kLtf[static_cast<std::size_t>(k + 26)];
}

int wifi_bin(int subcarrier) noexcept { return (subcarrier + kWifiFft) % kWifiFft; }

double wifi_tone_scale() noexcept { return 1.0 / std::sqrt(52.0); }

ComplexVector wifi_ltf_symbol() {
    ComplexVector bins(kWifiFft);
    for (int k = -26; k <= 26; ++k) bins[static_cast<std::size_t>(wifi_bin(k))] = wifi_ltf_value(k) * wifi_tone_scale();
    fft::inverse(bins);
    return bins;
}

ComplexVector wifi_stf(const WifiConfig& cfg) {
    ComplexVector bins(kWifiFft);
    const Complex unit = Complex(1.0, 1.0) * std::sqrt(13.0 / 6.0);
    for (int k = -26; k <= 26; ++k) {
        bins[static_cast<std::size_t>(wifi_bin(k))] = unit * static_cast<double>(kStf[static_cast<std::size_t>(k + 26)]) * wifi_tone_scale();
    }
    fft::inverse(bins);
    ComplexVector out(cfg.stf_length());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = bins[n % kWifiFft];
    return out;
}

std::vector<std::uint8_t> encode_wifi_header(const WifiHeader& h, std::size_t n_bits) {
    if (n_bits < 40) throw InputError("encode_wifi_header: need at least 40 bits");
    std::vector<std::uint8_t> out;
    push_field(out, static_cast<unsigned>(h.packet_index) & 0xFFFU, 12);
    push_field(out, static_cast<unsigned>(h.payload_bytes) & 0xFFFFU, 16);
    push_field(out, static_cast<unsigned>(h.mcs) & 0xFU, 4);
    push_field(out, crc8(out), 8);
    out.resize(n_bits, 0);
    return out;
}

std::optional<WifiHeader> decode_wifi_header(std::span<const std::uint8_t> bits) {
    if (bits.size() < 40) return std::nullopt;
    if (crc8(bits.first(32)) != read_field(bits, 32, 8)) return std::nullopt;
    WifiHeader h;
    h.packet_index = static_cast<int>(read_field(bits, 0, 12));
    h.payload_bytes = static_cast<int>(read_field(bits, 12, 16));
    h.mcs = static_cast<int>(read_field(bits, 28, 4));
    return h;
}

WifiBurst generate_wifi_burst(const WifiConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const WifiLayout layout = wifi_layout(cfg);
    const Constellation data_map(cfg.modulation());
    const Constellation header_map(Modulation::Bpsk);
    const double scale = wifi_tone_scale();
    const int bps = data_map.bits_per_symbol();
    const auto payload_bits = static_cast<std::size_t>(cfg.payload_bytes) * 8;

    const ComplexVector stf = wifi_stf(cfg);
    const ComplexVector ltf = wifi_ltf_symbol();

    std::mt19937_64 rng(derive_seed(seed, 3));
    std::uniform_int_distribution<int> coin(0, 1);

    WifiBurst burst;
    ComplexVector samples;
    samples.reserve(cfg.burst_length());

    auto emit_symbol = [&](const std::vector<Complex>& data_points, int polarity_index) {
        ComplexVector bins(kWifiFft);
        for (std::size_t i = 0; i < layout.data.size(); ++i) {
            bins[static_cast<std::size_t>(wifi_bin(layout.data[i]))] = data_points[i] * scale;
        }
        const double pol = wifi_pilot_polarity(polarity_index);
        for (std::size_t i = 0; i < layout.pilots.size(); ++i) {
            bins[static_cast<std::size_t>(wifi_bin(layout.pilots[i]))] = layout.pilot_base[i] * pol * scale;
        }
        const ComplexVector sym = ofdm_symbol(bins, kWifiCp);
        samples.insert(samples.end(), sym.begin(), sym.end());
    };

    for (int p = 0; p < cfg.packets_per_burst; ++p) {
        if (p > 0) samples.insert(samples.end(), cfg.gap_samples(), Complex{});
        const std::size_t start = samples.size();

        samples.insert(samples.end(), stf.begin(), stf.end());
        samples.insert(samples.end(), ltf.end() - kWifiLtfGuard, ltf.end());
        for (int i = 0; i < cfg.preamble.long_symbols; ++i) samples.insert(samples.end(), ltf.begin(), ltf.end());

        const auto header_bits = encode_wifi_header({p, cfg.payload_bytes, cfg.mcs}, layout.data.size());
        std::vector<Complex> points(layout.data.size());
        for (std::size_t i = 0; i < points.size(); ++i) points[i] = header_map.map(std::span(&header_bits[i], 1));
        for (int h = 0; h < cfg.preamble.header_symbols; ++h) emit_symbol(points, h);

        burst.bits.framing.push_back(burst.bits.bits.size());
        std::vector<std::uint8_t> payload(payload_bits);
        for (auto& b : payload) b = static_cast<std::uint8_t>(coin(rng));
        burst.bits.bits.insert(burst.bits.bits.end(), payload.begin(), payload.end());
        payload.resize(static_cast<std::size_t>(cfg.data_symbols() * cfg.bits_per_ofdm_symbol()), 0);

        std::size_t cursor = 0;
        for (int s = 0; s < cfg.data_symbols(); ++s) {
            for (auto& pt : points) {
                pt = data_map.map(std::span(&payload[cursor], static_cast<std::size_t>(bps)));
                cursor += static_cast<std::size_t>(bps);
            }
            emit_symbol(points, cfg.preamble.header_symbols + s);
        }
        burst.packets.push_back({start, samples.size() - start, static_cast<std::size_t>(p)});
    }
    burst.waveform = IqBuffer(std::move(samples), cfg.sample_rate());
    return burst;
}

}  // namespace siclab::waveform
