#include <cmath>
#include <numbers>
#include <numeric>

#include "siclab/kernels.hpp"
#include "siclab/waveform.hpp"

namespace siclab::waveform {
namespace {

double bessel_i0(double x) {
    double sum = 1.0;
    double term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

}  // namespace

Ratio rational_ratio(double source_rate, double target_rate, int max_denominator) {
    if (!(source_rate > 0.0) || !(target_rate > 0.0)) throw ConfigError("resample: rates must be positive");
    const double r = target_rate / source_rate;
    // Continued-fraction convergents of r.
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = r;
    for (int iter = 0; iter < 64; ++iter) {
        const double a = std::floor(x);
        const auto ai = static_cast<long long>(a);
        const long long p2 = ai * p1 + p0;
        const long long q2 = ai * q1 + q0;
        if (q2 > max_denominator) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - r) <= 1e-12 * r) {
            const long long g = std::gcd(p1, q1);
            return {p1 / g, q1 / g};
        }
        const double frac = x - a;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
    }
    throw ConfigError("resample: rate ratio not representable with denominator <= " + std::to_string(max_denominator));
}

std::vector<double> resampler_prototype(const Ratio& r, const ResamplerOptions& opts) {
    // Work in units of the input rate; the prototype runs at up * input rate.
    const double up = static_cast<double>(r.up);
    const double low_rate = std::min(1.0, up / static_cast<double>(r.down));
    const double cutoff = 0.5 * low_rate / up;                      // cycles/sample at prototype rate
    const double transition = opts.transition_fraction * low_rate / up;
    const double atten = opts.stopband_db;
    const double beta = atten > 50.0 ? 0.1102 * (atten - 8.7)
                        : atten >= 21.0 ? 0.5842 * std::pow(atten - 21.0, 0.4) + 0.07886 * (atten - 21.0)
                                        : 0.0;
    auto n = static_cast<long long>(std::ceil((atten - 7.95) / (2.285 * 2.0 * std::numbers::pi * transition))) + 1;
    if (n % 2 == 0) ++n;
    const double mid = static_cast<double>(n - 1) / 2.0;
    const double i0_beta = bessel_i0(beta);
    std::vector<double> h(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) - mid) / mid;
        const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - t * t))) / i0_beta;
        h[static_cast<std::size_t>(i)] = 2.0 * cutoff * sinc(2.0 * cutoff * (static_cast<double>(i) - mid)) * w;
    }
    const double sum = std::accumulate(h.begin(), h.end(), 0.0);
    for (auto& v : h) v *= up / sum;
    return h;
}

IqBuffer resample(const IqBuffer& buf, double target_rate, const ResamplerOptions& opts) {
    const Ratio r = rational_ratio(buf.sample_rate(), target_rate, opts.max_denominator);
    if (r.up == 1 && r.down == 1) return IqBuffer(buf.vector(), target_rate);

    const std::vector<double> h = resampler_prototype(r, opts);
    const auto len = static_cast<long long>(h.size());
    const long long up = r.up;
    const long long down = r.down;
    const long long mid = (len - 1) / 2;
    const long long taps = (len + up - 1) / up;

    // Polyphase branches stored reversed so each output is a forward dot product
    // against a contiguous input window.
    std::vector<double> poly(static_cast<std::size_t>(up * taps), 0.0);
    for (long long phase = 0; phase < up; ++phase) {
        for (long long j = 0; j < taps; ++j) {
            const long long idx = phase + j * up;
            if (idx < len) poly[static_cast<std::size_t>(phase * taps + (taps - 1 - j))] = h[static_cast<std::size_t>(idx)];
        }
    }

    const auto n_in = static_cast<long long>(buf.size());
    const long long n_out = (n_in * up + down - 1) / down;
    ComplexVector padded(static_cast<std::size_t>(n_in + 2 * taps + 2));
    std::copy(buf.vector().begin(), buf.vector().end(), padded.begin() + (taps - 1));

    ComplexVector out(static_cast<std::size_t>(n_out));
    const auto& kt = kernels::active();
    for (long long m = 0; m < n_out; ++m) {
        const long long pos = m * down + mid;
        const long long kmax = pos / up;
        const long long phase = pos - kmax * up;
        // Window covers input samples kmax - taps + 1 .. kmax, i.e. padded[kmax .. kmax + taps - 1].
        const long long first = kmax;
        if (first + taps > static_cast<long long>(padded.size())) break;
        out[static_cast<std::size_t>(m)] =
            kt.rdot(poly.data() + phase * taps, padded.data() + first, static_cast<std::size_t>(taps));
    }
    return IqBuffer(std::move(out), target_rate);
}

IqBuffer normalize(const IqBuffer& buf) {
    if (buf.empty()) throw DegenerateInputError("normalize: empty buffer");
    const double p = buf.mean_power();
    if (!(p > 0.0)) throw DegenerateInputError("normalize: all-zero buffer");
    const double c = 1.0 / std::sqrt(p);
    ComplexVector out(buf.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i] * c;
    return IqBuffer(std::move(out), buf.sample_rate());
}

}  // namespace siclab::waveform
