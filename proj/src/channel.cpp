#include "siclab/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "siclab/kernels.hpp"

namespace siclab::channel {
namespace {

constexpr int kInterpTaps = 8;

/// Fractional-delay kernel for delay `frac` in [0, 1), taps at integer offsets -3..4.
std::array<double, kInterpTaps> fractional_kernel(double frac) {
    std::array<double, kInterpTaps> k{};
    double sum = 0.0;
    for (int i = 0; i < kInterpTaps; ++i) {
        const double t = static_cast<double>(i - kFractionalLead) - frac;
        const double s = std::abs(t) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
        const double w = 0.5 * (1.0 + std::cos(std::numbers::pi * t / (kInterpTaps / 2.0 + 0.5)));
        k[static_cast<std::size_t>(i)] = s * w;
        sum += s * w;
    }
    for (auto& v : k) v /= sum;
    return k;
}

}  // namespace

ComplexVector realize_taps(const ChannelProfile& profile, double sample_rate, std::uint64_t seed) {
    profile.validate();
    if (!(sample_rate > 0.0)) throw InputError("realize_taps: sample rate must be positive");
    std::mt19937_64 rng(derive_seed(seed, 11));
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

    std::vector<double> delays;
    bool any_fractional = false;
    for (double d : profile.tap_delays_s) {
        const double tau = d * sample_rate;
        delays.push_back(tau);
        if (std::abs(tau - std::round(tau)) > 1e-9) any_fractional = true;
    }
    const int lead = any_fractional ? kFractionalLead : 0;
    const auto max_delay = static_cast<std::size_t>(std::ceil(delays.back() + 1e-9));
    ComplexVector taps(max_delay + static_cast<std::size_t>(lead + kInterpTaps), Complex{});

    for (std::size_t i = 0; i < delays.size(); ++i) {
        Complex amp = std::sqrt(std::pow(10.0, profile.tap_powers_db[i] / 10.0));
        if (profile.fading == Fading::StaticDraw) amp *= Complex(gauss(rng), gauss(rng));
        const double tau = delays[i];
        const double whole = std::round(tau);
        if (std::abs(tau - whole) <= 1e-9) {
            taps[static_cast<std::size_t>(whole) + static_cast<std::size_t>(lead)] += amp;
            continue;
        }
        const double base = std::floor(tau);
        const auto kern = fractional_kernel(tau - base);
        for (int j = 0; j < kInterpTaps; ++j) {
            taps[static_cast<std::size_t>(base) + static_cast<std::size_t>(j)] += amp * kern[static_cast<std::size_t>(j)];
        }
    }
    while (taps.size() > 1 && taps.back() == Complex{}) taps.pop_back();

    if (profile.unit_energy) {
        const double e = kernels::energy(taps);
        if (e > 0.0) {
            const double s = 1.0 / std::sqrt(e);
            for (auto& t : taps) t *= s;
        }
    }
    return taps;
}

IqBuffer apply_tdl(const IqBuffer& buf, const ChannelProfile& profile, std::uint64_t seed) {
    if (profile.is_identity()) return buf;
    const ComplexVector taps = realize_taps(profile, buf.sample_rate(), seed);
    ComplexVector out(buf.size());
    kernels::fir(taps, buf.samples(), out);
    return IqBuffer(std::move(out), buf.sample_rate());
}

void ImpairmentSpec::validate() const {
    if (!(attenuation_db >= 0.0) || !std::isfinite(attenuation_db)) throw ConfigError("impairment: attenuation_db must be >= 0");
    if (!std::isfinite(cfo_hz)) throw ConfigError("impairment: cfo_hz must be finite");
    if (!std::isfinite(gain.real()) || !std::isfinite(gain.imag()) || !std::isfinite(dc_offset.real()) ||
        !std::isfinite(dc_offset.imag())) {
        throw ConfigError("impairment: gain and dc_offset must be finite");
    }
    if (noise_power_dbfs && !std::isfinite(*noise_power_dbfs)) throw ConfigError("impairment: noise power must be finite or off");
}

ComplexVector awgn(std::size_t n, double power, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(power / 2.0));
    ComplexVector w(n);
    for (auto& v : w) {
        const double re = gauss(rng);
        v = {re, gauss(rng)};
    }
    return w;
}

IqBuffer apply_impairments(const IqBuffer& buf, const ImpairmentSpec& imp, std::uint64_t seed) {
    imp.validate();
    const std::size_t n = buf.size() + imp.delay_samples;
    const Complex g = imp.gain * std::pow(10.0, -imp.attenuation_db / 20.0);
    const double w = 2.0 * std::numbers::pi * imp.cfo_hz / buf.sample_rate();
    ComplexVector out(n, imp.dc_offset);
    for (std::size_t i = imp.delay_samples; i < n; ++i) {
        Complex v = g * buf[i - imp.delay_samples];
        if (imp.cfo_hz != 0.0) v *= std::polar(1.0, w * static_cast<double>(i));
        out[i] += v;
    }
    if (imp.noise_power_dbfs) {
        const ComplexVector noise = awgn(n, std::pow(10.0, *imp.noise_power_dbfs / 10.0), derive_seed(seed, 12));
        for (std::size_t i = 0; i < n; ++i) out[i] += noise[i];
    }
    return IqBuffer(std::move(out), buf.sample_rate());
}

IqBuffer mix_composite(const IqBuffer& nr, const IqBuffer& wifi) {
    if (nr.sample_rate() != wifi.sample_rate()) throw ConfigError("mix_composite: sample-rate mismatch");
    ComplexVector out(std::max(nr.size(), wifi.size()));
    for (std::size_t i = 0; i < nr.size(); ++i) out[i] = nr[i];
    for (std::size_t i = 0; i < wifi.size(); ++i) out[i] += wifi[i];
    return IqBuffer(std::move(out), nr.sample_rate());
}

IqBuffer remove_dc(const IqBuffer& buf) {
    if (buf.empty()) throw DegenerateInputError("remove_dc: empty buffer");
    Complex mean{};
    for (const auto& s : buf.samples()) mean += s;
    mean /= static_cast<double>(buf.size());
    ComplexVector out(buf.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i] - mean;
    return IqBuffer(std::move(out), buf.sample_rate());
}

}  // namespace siclab::channel
