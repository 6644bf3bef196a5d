#include <algorithm>
#include <cmath>
#include <numbers>

#include "siclab/constellation.hpp"
#include "siclab/fft.hpp"
#include "siclab/kernels.hpp"
#include "siclab/metrics.hpp"
#include "siclab/rx.hpp"

namespace siclab::rx {

namespace {

bool same_rate(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(a, b); }

}  // namespace

ComplexVector nr_pilot_reference(const waveform::NrConfig& cfg, const ResourceGrid& truth_grid) {
    waveform::NrConfig one = cfg;
    one.slots = 1;
    Eigen::MatrixXcd pilots = Eigen::MatrixXcd::Zero(cfg.subcarriers(), cfg.symbols_per_slot);
    for (int l = 0; l < cfg.symbols_per_slot; ++l) {
        for (int k = 0; k < cfg.subcarriers(); ++k) {
            if (truth_grid.pilot_mask(k, l)) pilots(k, l) = truth_grid.values(k, l);
        }
    }
    return waveform::nr_modulate(one, pilots).vector();
}

NrRxReport demod_nr(const IqBuffer& capture, const waveform::NrConfig& cfg, const ResourceGrid& truth_grid,
                    const BitStream& truth_bits, const NrRxOptions& opts) {
    cfg.validate();
    truth_grid.validate();
    if (!same_rate(capture.sample_rate(), cfg.native_rate)) {
        throw InputError("demod_nr: capture must be at the NR native rate");
    }
    const int k_used = cfg.subcarriers();
    const int n_sym = cfg.total_symbols();
    if (truth_grid.subcarriers() != k_used || truth_grid.symbols() != n_sym) {
        throw InputError("demod_nr: truth grid shape does not match configuration");
    }
    if (opts.cp_backoff < 0) throw InputError("demod_nr: negative CP backoff");

    NrRxReport rep;
    rep.channel_grid = ResourceGrid(k_used, n_sym);
    rep.channel_grid.pilot_mask = truth_grid.pilot_mask;
    rep.channel_grid.data_mask = truth_grid.data_mask;
    rep.decoded_bits.framing.clear();

    // Timing.
    const std::size_t slot = cfg.slot_length();
    if (opts.forced_timing) {
        rep.timing_offset = *opts.forced_timing;
        rep.signal_found = true;
    } else {
        if (capture.size() < slot) return rep;
        const ComplexVector ref = nr_pilot_reference(cfg, truth_grid);
        const std::size_t max_lag = std::min(capture.size() - slot, cfg.frame_length() - 1);
        const ComplexVector corr = fft::cross_correlate(ref, capture.samples(), max_lag);
        const double ref_energy = kernels::energy(ref);

        std::vector<double> prefix(capture.size() + 1, 0.0);
        for (std::size_t i = 0; i < capture.size(); ++i) prefix[i + 1] = prefix[i] + std::norm(capture[i]);

        std::size_t best = 0;
        double best_metric = 0.0;
        for (std::size_t d = 0; d <= max_lag; ++d) {
            const double e = prefix[d + slot] - prefix[d];
            if (!(e > 0.0)) continue;
            const double m = std::abs(corr[d]) / std::sqrt(ref_energy * e);
            if (m > best_metric) {
                best_metric = m;
                best = d;
            }
        }
        rep.timing_metric = best_metric;
        rep.timing_floor = std::sqrt(std::log(static_cast<double>(max_lag + 1) / opts.false_alarm) /
                                     static_cast<double>(slot));
        if (!(best_metric > rep.timing_floor)) return rep;
        rep.signal_found = true;
        rep.timing_offset = best;
    }
    const std::size_t backoff = std::min(rep.timing_offset, static_cast<std::size_t>(opts.cp_backoff));
    const std::size_t sample_start = rep.timing_offset - backoff;

    // OFDM demodulation of every symbol that fits.
    const auto n_fft = static_cast<std::size_t>(cfg.fft_size());
    Eigen::VectorXcd unramp(k_used);
    for (int k = 0; k < k_used; ++k) {
        const double cycles = static_cast<double>(cfg.bin(k)) * static_cast<double>(backoff) / static_cast<double>(n_fft);
        unramp(k) = std::polar(1.0, 2.0 * std::numbers::pi * cycles);
    }
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(k_used, n_sym);
    int demod = 0;
    for (int l = 0; l < n_sym; ++l) {
        const std::size_t body = sample_start + cfg.symbol_start(l) + static_cast<std::size_t>(cfg.cp_length(l));
        if (body + n_fft > capture.size()) break;
        y.col(l) = waveform::nr_demodulate_symbol(cfg, capture.samples().subspan(body, n_fft)).cwiseProduct(unramp);
        ++demod;
    }
    rep.symbols_demodulated = demod;

    // LS at pilots, averaged over time per subcarrier.
    std::vector<Complex> sum(static_cast<std::size_t>(k_used));
    std::vector<int> count(static_cast<std::size_t>(k_used), 0);
    for (int l = 0; l < demod; ++l) {
        for (int k = 0; k < k_used; ++k) {
            if (!truth_grid.pilot_mask(k, l)) continue;
            const Complex h = y(k, l) / truth_grid.values(k, l);
            rep.channel_grid.values(k, l) = h;
            sum[static_cast<std::size_t>(k)] += h;
            ++count[static_cast<std::size_t>(k)];
        }
    }
    std::vector<int> pilot_rows;
    for (int k = 0; k < k_used; ++k) {
        if (count[static_cast<std::size_t>(k)] > 0) pilot_rows.push_back(k);
    }
    if (pilot_rows.empty()) return rep;

    // Linear interpolation in frequency, flat extrapolation at the band edges.
    std::vector<Complex> h_freq(static_cast<std::size_t>(k_used));
    auto avg = [&](int k) { return sum[static_cast<std::size_t>(k)] / static_cast<double>(count[static_cast<std::size_t>(k)]); };
    std::size_t seg = 0;
    for (int k = 0; k < k_used; ++k) {
        while (seg + 1 < pilot_rows.size() && pilot_rows[seg + 1] <= k) ++seg;
        const int k0 = pilot_rows[seg];
        if (k <= k0 || seg + 1 == pilot_rows.size()) {
            h_freq[static_cast<std::size_t>(k)] = avg(k0);
            continue;
        }
        const int k1 = pilot_rows[seg + 1];
        const double t = static_cast<double>(k - k0) / static_cast<double>(k1 - k0);
        h_freq[static_cast<std::size_t>(k)] = (1.0 - t) * avg(k0) + t * avg(k1);
    }

    // Equalize, decide, score.
    const Constellation qam(cfg.modulation);
    ComplexVector ref_points;
    for (int l = 0; l < demod; ++l) {
        if (l % cfg.symbols_per_slot == 0) rep.decoded_bits.framing.push_back(rep.decoded_bits.bits.size());
        for (int k = 0; k < k_used; ++k) {
            if (!truth_grid.data_mask(k, l)) continue;
            const Complex h = h_freq[static_cast<std::size_t>(k)];
            rep.channel_grid.values(k, l) = h;
            const Complex s = std::norm(h) > 0.0 ? y(k, l) / h : Complex{};
            rep.equalized.push_back(s);
            ref_points.push_back(truth_grid.values(k, l));
            qam.demap(s, rep.decoded_bits.bits);
        }
    }
    if (rep.equalized.empty()) return rep;
    rep.evm_percent = metrics::evm_rms(rep.equalized, ref_points);
    const std::size_t n_bits = std::min(rep.decoded_bits.bits.size(), truth_bits.bits.size());
    rep.ber = metrics::ber(std::span(rep.decoded_bits.bits).first(n_bits), std::span(truth_bits.bits).first(n_bits)).ratio;
    return rep;
}

}  // namespace siclab::rx
