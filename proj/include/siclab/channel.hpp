#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "siclab/common.hpp"

namespace siclab::channel {

enum class Fading {
    None,        // tap amplitudes are sqrt(power), zero phase
    StaticDraw,  // one complex Gaussian draw per tap, held for the whole buffer
};

/**
 * @brief Tapped-delay-line description of a quasi-static channel.
 *
 * Tap powers are normalized to 0 dB total on construction through make_profile().
 * Delays are absolute seconds, ascending.
 */
struct ChannelProfile {
    std::string name = "NoFading";
    std::vector<double> tap_delays_s{0.0};
    std::vector<double> tap_powers_db{0.0};
    double delay_spread_s = 0.0;  // informational for scaled tables
    Fading fading = Fading::None;
    /// Rescale each realization to unit tap energy, keeping only the frequency selectivity.
    bool unit_energy = false;

    void validate() const;
    [[nodiscard]] bool is_identity() const noexcept;
};

/// Builds a profile from raw (delay, power) pairs: sorts by delay and normalizes power to 0 dB.
[[nodiscard]] ChannelProfile make_profile(std::string name, std::vector<double> delays_s, std::vector<double> powers_db,
                                          Fading fading);

/// Built-in tables: NoFading, TDL-B, TDL-C (scaled by delay_spread_s), TGn-B, TGn-D.
[[nodiscard]] ChannelProfile builtin_profile(std::string_view name, double delay_spread_s = 50e-9);

[[nodiscard]] std::vector<std::string> builtin_profile_names();

/// Parses "delay power_db" lines ('#' comments). Delays are nanoseconds, or normalized
/// delays when delay_spread_s is given (then scaled by it).
[[nodiscard]] ChannelProfile parse_profile(std::string_view text, std::string name,
                                           std::optional<double> delay_spread_s, Fading fading);

[[nodiscard]] ChannelProfile load_profile(const std::filesystem::path& path, std::string name,
                                          std::optional<double> delay_spread_s, Fading fading);

/// Causal FIR realization at sample_rate. Fractional delays use an 8-tap Hann-windowed
/// sinc (cutoff at Nyquist, unit DC gain); when any tap is fractional the whole response
/// carries a bulk delay of kFractionalLead samples so the kernel stays causal.
[[nodiscard]] ComplexVector realize_taps(const ChannelProfile& profile, double sample_rate, std::uint64_t seed);

constexpr int kFractionalLead = 3;

/// Same-length convolution with the profile realization (zero initial state).
[[nodiscard]] IqBuffer apply_tdl(const IqBuffer& buf, const ChannelProfile& profile, std::uint64_t seed);

struct ImpairmentSpec {
    std::size_t delay_samples = 0;
    double cfo_hz = 0.0;
    Complex gain{1.0, 0.0};
    Complex dc_offset{0.0, 0.0};
    std::optional<double> noise_power_dbfs;  // nullopt = noise off
    double attenuation_db = 0.0;

    void validate() const;
};

/**
 * out[n] = gain * 10^(-att/20) * buf[n - delay] * exp(j 2 pi cfo n / fs) + dc + w[n].
 * The output is delay_samples longer than the input so nothing is truncated.
 */
[[nodiscard]] IqBuffer apply_impairments(const IqBuffer& buf, const ImpairmentSpec& imp, std::uint64_t seed);

/// Elementwise sum; the shorter input is zero-padded. Sample rates must match.
[[nodiscard]] IqBuffer mix_composite(const IqBuffer& nr, const IqBuffer& wifi);

[[nodiscard]] IqBuffer remove_dc(const IqBuffer& buf);

/// Complex AWGN of the given total power.
[[nodiscard]] ComplexVector awgn(std::size_t n, double power, std::uint64_t seed);

}  // namespace siclab::channel
