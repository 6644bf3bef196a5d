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

using waveform::kWifiCp;
using waveform::kWifiFft;
using waveform::kWifiLtfGuard;
using waveform::kWifiStfPeriod;

constexpr int kAutocorrWindow = 64;
constexpr int kLtfSearchSpan = 400;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double phi) { return std::remainder(phi, kTwoPi); }

Complex lag_correlation(std::span<const Complex> r, std::size_t first, std::size_t last, std::size_t lag) {
    Complex acc{};
    for (std::size_t n = first; n + lag < last; ++n) acc += std::conj(r[n]) * r[n + lag];
    return acc;
}

/// Multi-lag CFO estimate over [first, last): the lag-16 phase is unambiguous and each
/// longer lag refines it, resolving its own 2 pi ambiguity from the previous estimate.
double stf_cfo(std::span<const Complex> r, std::size_t first, std::size_t last, double fs) {
    const auto base = static_cast<std::size_t>(kWifiStfPeriod);
    double f = std::arg(lag_correlation(r, first, last, base)) * fs / (kTwoPi * static_cast<double>(base));
    double weighted = 0.0;
    double weights = 0.0;
    for (std::size_t lag = base; first + lag + 8 <= last; lag *= 2) {
        const double predicted = kTwoPi * f * static_cast<double>(lag) / fs;
        const double measured = std::arg(lag_correlation(r, first, last, lag));
        const double phi = predicted + wrap(measured - predicted);
        const double f_lag = phi * fs / (kTwoPi * static_cast<double>(lag));
        const double pairs = static_cast<double>(last - first - lag);
        const double w = pairs * static_cast<double>(lag * lag);
        weighted += w * f_lag;
        weights += w;
        f = weighted / weights;
    }
    return f;
}

void derotate(ComplexVector& x, double cfo_hz, double fs) {
    const double step = -kTwoPi * cfo_hz / fs;
    for (std::size_t n = 0; n < x.size(); ++n) x[n] *= std::polar(1.0, step * static_cast<double>(n));
}

ComplexVector dft64(std::span<const Complex> x, std::size_t start) {
    ComplexVector bins(x.begin() + static_cast<std::ptrdiff_t>(start),
                       x.begin() + static_cast<std::ptrdiff_t>(start + kWifiFft));
    fft::forward(bins);
    return bins;
}

Complex tone(const ComplexVector& bins, int k) { return bins[static_cast<std::size_t>(waveform::wifi_bin(k))]; }

struct Plateau {
    std::size_t start = 0;
    std::size_t end = 0;  // one past the last sample above threshold
    std::size_t peak = 0;
    double peak_metric = 0.0;
};

}  // namespace

std::vector<WifiDetection> detect_wifi_packets(const IqBuffer& residual, const waveform::WifiConfig& cfg,
                                               const WifiRxOptions& opts) {
    cfg.validate();
    const auto r = residual.samples();
    const double fs = residual.sample_rate();
    const auto lag = static_cast<std::size_t>(kWifiStfPeriod);
    const auto win = static_cast<std::size_t>(kAutocorrWindow);
    std::vector<WifiDetection> out;
    if (r.size() < lag + win + 1) return out;

    // Normalized lag-16 autocorrelation over a 64-sample window.
    const std::size_t count = r.size() - lag - win + 1;
    std::vector<double> metric(count);
    std::vector<Complex> p_acc(count);
    const auto& kt = kernels::active();
    for (std::size_t n = 0; n < count; ++n) {
        const Complex p = kt.cdotc(r.data() + n, r.data() + n + lag, win);
        const double e = kt.energy(r.data() + n + lag, win);
        p_acc[n] = p;
        metric[n] = e > 0.0 ? std::norm(p) / (e * e) : 0.0;
    }

    const ComplexVector ltf = waveform::wifi_ltf_symbol();
    const double ltf_energy = kernels::energy(ltf);
    const std::size_t ltf1_offset = cfg.stf_length() + static_cast<std::size_t>(kWifiLtfGuard);
    const auto n_fft = static_cast<std::size_t>(kWifiFft);

    std::size_t n = 0;
    while (n < count) {
        if (metric[n] <= opts.detection_threshold) {
            ++n;
            continue;
        }
        Plateau pl{n, n, n, 0.0};
        while (pl.end < count && metric[pl.end] > opts.detection_threshold) {
            if (metric[pl.end] > pl.peak_metric) {
                pl.peak_metric = metric[pl.end];
                pl.peak = pl.end;
            }
            ++pl.end;
        }
        n = pl.end;
        if (pl.end - pl.start < static_cast<std::size_t>(opts.min_plateau)) continue;

        // Fine timing: cross-correlate the known long training symbol, compensating the
        // provisional lag-16 CFO inside the template.
        const double f16 = std::arg(p_acc[pl.peak]) * fs / (kTwoPi * static_cast<double>(lag));
        ComplexVector tmpl(ltf);
        derotate(tmpl, -f16, fs);
        const std::size_t lo = pl.start + 32;
        if (lo + 2 * n_fft > r.size()) break;
        const std::size_t hi = std::min(pl.start + static_cast<std::size_t>(kLtfSearchSpan), r.size() - 2 * n_fft);
        std::vector<double> c_metric(hi - lo + 1, 0.0);
        std::size_t best = 0;
        for (std::size_t d = lo; d <= hi; ++d) {
            const auto seg = r.subspan(d, n_fft);
            const double es = kernels::energy(seg);
            if (!(es > 0.0)) continue;
            const double m = std::norm(kernels::cdotc(tmpl, seg)) / (ltf_energy * es);
            c_metric[d - lo] = m;
            if (m > c_metric[best]) best = d - lo;
        }
        std::size_t ltf1 = lo + best;
        if (best >= n_fft && c_metric[best - n_fft] >= 0.5 * c_metric[best]) ltf1 -= n_fft;
        if (ltf1 < ltf1_offset || ltf1 + 2 * n_fft > r.size()) continue;

        const auto a = r.subspan(ltf1, n_fft);
        const auto b = r.subspan(ltf1 + n_fft, n_fft);
        const double ea = kernels::energy(a);
        const double eb = kernels::energy(b);
        if (!(ea > 0.0 && eb > 0.0) || std::abs(kernels::cdotc(a, b)) / std::sqrt(ea * eb) < opts.ltf_confirmation) continue;

        WifiDetection det;
        det.offset = ltf1 - ltf1_offset;
        det.plateau_metric = pl.peak_metric;
        const std::size_t guard = static_cast<std::size_t>(kWifiStfPeriod);
        det.coarse_cfo_hz = stf_cfo(r, det.offset + guard, det.offset + cfg.stf_length(), fs);
        out.push_back(det);
        n = std::max(n, det.offset + cfg.packet_length() - std::min(cfg.packet_length(), std::size_t{32}));
    }
    return out;
}

WifiRxReport demod_wifi(const IqBuffer& residual, const waveform::WifiConfig& cfg, const BitStream& truth,
                        const WifiRxOptions& opts) {
    cfg.validate();
    truth.validate();
    if (truth.segment_count() == 0) throw InputError("demod_wifi: truth holds no packets");
    if (opts.cp_backoff < 0 || opts.cp_backoff > kWifiCp) throw InputError("demod_wifi: CP backoff out of range");

    const double fs = residual.sample_rate();
    const auto r = residual.samples();
    const auto layout = waveform::wifi_layout(cfg);
    const Constellation header_map(Modulation::Bpsk);
    const Constellation data_map(cfg.modulation());
    const int hs = cfg.preamble.header_symbols;
    const int ds = cfg.data_symbols();
    const auto bits_per_sym = static_cast<std::size_t>(cfg.bits_per_ofdm_symbol());
    const auto payload_bits = static_cast<std::size_t>(cfg.payload_bytes) * 8;
    const auto backoff = static_cast<std::size_t>(opts.cp_backoff);
    const std::size_t ltf1 = cfg.stf_length() + static_cast<std::size_t>(kWifiLtfGuard);
    const std::size_t first_symbol = ltf1 + static_cast<std::size_t>(cfg.preamble.long_symbols * kWifiFft);
    const std::size_t sym_len = kWifiFft + kWifiCp;

    const auto detections = detect_wifi_packets(residual, cfg, opts);
    WifiRxReport rep;
    rep.packets_detected = detections.size();

    for (const auto& det : detections) {
        if (det.offset + cfg.packet_length() > r.size()) continue;
        WifiPacketReport pk;
        pk.timing_offset = det.offset;
        pk.coarse_cfo_hz = det.coarse_cfo_hz;

        ComplexVector x(r.begin() + static_cast<std::ptrdiff_t>(det.offset),
                        r.begin() + static_cast<std::ptrdiff_t>(det.offset + cfg.packet_length()));
        ComplexVector xc = x;
        derotate(xc, det.coarse_cfo_hz, fs);

        // Long-training refinement over guard + first symbol against the second symbol.
        const std::size_t n64 = kWifiFft;
        const double ltf_delta =
            std::arg(lag_correlation(xc, cfg.stf_length() + 8, ltf1 + 2 * n64, n64)) * fs / (kTwoPi * static_cast<double>(n64));
        double cfo = det.coarse_cfo_hz + ltf_delta;
        xc = x;
        derotate(xc, cfo, fs);

        // Channel estimate: mean of the long training symbols.
        std::vector<Complex> h(kWifiFft);
        for (int s = 0; s < cfg.preamble.long_symbols; ++s) {
            const auto bins = dft64(xc, ltf1 + static_cast<std::size_t>(s) * n64 - backoff);
            for (int k = -26; k <= 26; ++k) {
                if (k == 0) continue;
                h[static_cast<std::size_t>(waveform::wifi_bin(k))] += tone(bins, k) / waveform::wifi_ltf_value(k);
            }
        }
        for (auto& v : h) v /= static_cast<double>(cfg.preamble.long_symbols);

        // Equalize every symbol; common phase error from the pilots.
        const int n_symbols = hs + ds;
        std::vector<std::vector<Complex>> eq(static_cast<std::size_t>(n_symbols));
        std::vector<double> cpe(static_cast<std::size_t>(n_symbols));
        for (int i = 0; i < n_symbols; ++i) {
            const auto bins = dft64(xc, first_symbol + static_cast<std::size_t>(i) * sym_len + kWifiCp - backoff);
            auto eq_tone = [&](int k) {
                const Complex hk = h[static_cast<std::size_t>(waveform::wifi_bin(k))];
                return std::norm(hk) > 0.0 ? tone(bins, k) / hk : Complex{};
            };
            Complex acc{};
            const double pol = waveform::wifi_pilot_polarity(i);
            for (std::size_t p = 0; p < layout.pilots.size(); ++p) acc += layout.pilot_base[p] * pol * eq_tone(layout.pilots[p]);
            cpe[static_cast<std::size_t>(i)] = std::arg(acc);
            auto& row = eq[static_cast<std::size_t>(i)];
            row.reserve(layout.data.size());
            for (int k : layout.data) row.push_back(eq_tone(k));
        }

        // Residual CFO from the slope of the unwrapped common phase.
        for (std::size_t i = 1; i < cpe.size(); ++i) cpe[i] = cpe[i - 1] + wrap(cpe[i] - cpe[i - 1]);
        if (cpe.size() >= 2) {
            const double n_pts = static_cast<double>(cpe.size());
            double t_mean = 0.0;
            double p_mean = 0.0;
            for (std::size_t i = 0; i < cpe.size(); ++i) {
                t_mean += static_cast<double>(i * sym_len);
                p_mean += cpe[i];
            }
            t_mean /= n_pts;
            p_mean /= n_pts;
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i < cpe.size(); ++i) {
                const double dt = static_cast<double>(i * sym_len) - t_mean;
                num += dt * (cpe[i] - p_mean);
                den += dt * dt;
            }
            cfo += num / den * fs / kTwoPi;
        }
        pk.fine_cfo_hz = cfo;
        for (int i = 0; i < n_symbols; ++i) {
            const Complex rot = std::polar(1.0, -cpe[static_cast<std::size_t>(i)]);
            for (auto& v : eq[static_cast<std::size_t>(i)]) v *= rot;
        }

        // Header field.
        ComplexVector hdr_eq;
        ComplexVector hdr_ref;
        for (int i = 0; i < hs; ++i) {
            for (const auto& v : eq[static_cast<std::size_t>(i)]) {
                hdr_eq.push_back(v);
                hdr_ref.push_back(header_map.slice(v));
            }
        }
        std::vector<std::uint8_t> hdr_bits;
        for (const auto& v : eq[0]) header_map.demap(v, hdr_bits);
        pk.header_evm_percent = metrics::evm_rms(hdr_eq, hdr_ref);
        const auto header = waveform::decode_wifi_header(hdr_bits);
        pk.header_crc_ok = header.has_value();

        // Data field.
        std::vector<std::uint8_t> bits;
        bits.reserve(static_cast<std::size_t>(ds) * bits_per_sym);
        for (int i = hs; i < n_symbols; ++i) {
            for (const auto& v : eq[static_cast<std::size_t>(i)]) data_map.demap(v, bits);
        }
        const auto rx_payload = std::span(bits).first(std::min(payload_bits, bits.size()));

        metrics::BerResult best;
        if (header && static_cast<std::size_t>(header->packet_index) < truth.segment_count()) {
            pk.matched_packet = static_cast<std::size_t>(header->packet_index);
            best = metrics::ber(rx_payload, truth.segment(pk.matched_packet));
        } else {
            const metrics::Alignment align{static_cast<int>(2 * bits_per_sym), static_cast<int>(bits_per_sym)};
            best.ratio = 2.0;
            for (std::size_t j = 0; j < truth.segment_count(); ++j) {
                const auto res = metrics::ber(rx_payload, truth.segment(j), align);
                if (res.ratio < best.ratio) {
                    best = res;
                    pk.matched_packet = j;
                }
            }
        }
        pk.ber = best.ratio;
        pk.bit_shift = best.shift;

        // Data EVM against the matched payload (zero padding included), shifted like the bits.
        std::vector<std::uint8_t> ref_bits(truth.segment(pk.matched_packet).begin(), truth.segment(pk.matched_packet).end());
        ref_bits.resize(static_cast<std::size_t>(ds) * bits_per_sym, 0);
        const long sym_shift = best.shift / static_cast<long>(bits_per_sym);
        const auto bps = static_cast<std::size_t>(data_map.bits_per_symbol());
        ComplexVector data_eq;
        ComplexVector data_ref;
        for (int i = 0; i < ds; ++i) {
            const long src = i + sym_shift;
            const auto& row = eq[static_cast<std::size_t>(hs + i)];
            for (std::size_t t = 0; t < row.size(); ++t) {
                data_eq.push_back(row[t]);
                if (src >= 0 && src < ds) {
                    const std::size_t at = static_cast<std::size_t>(src) * bits_per_sym + t * bps;
                    data_ref.push_back(data_map.map(std::span(ref_bits).subspan(at, bps)));
                } else {
                    data_ref.push_back(data_map.slice(row[t]));
                }
            }
        }
        pk.data_evm_percent = metrics::evm_rms(data_eq, data_ref);
        rep.packets.push_back(pk);
    }

    if (!rep.packets.empty()) {
        double evm = 0.0;
        double ber = 0.0;
        for (const auto& pk : rep.packets) {
            evm += pk.data_evm_percent;
            ber += pk.ber;
            if (pk.header_evm_percent < opts.header_evm_threshold_pct) rep.decode_success = true;
        }
        rep.mean_data_evm_percent = evm / static_cast<double>(rep.packets.size());
        rep.mean_ber = ber / static_cast<double>(rep.packets.size());
    }
    return rep;
}

}  // namespace siclab::rx
