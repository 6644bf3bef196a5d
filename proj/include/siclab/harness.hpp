#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "siclab/channel.hpp"
#include "siclab/rx.hpp"
#include "siclab/sic.hpp"
#include "siclab/waveform.hpp"

namespace siclab::harness {

struct ExperimentConfig {
    waveform::NrConfig nr;
    waveform::WifiConfig wifi;
    channel::ChannelProfile nr_channel;
    channel::ChannelProfile wifi_channel;
    channel::ImpairmentSpec nr_imp;
    channel::ImpairmentSpec wifi_imp;
    sic::SicConfig sic;
    rx::WifiRxOptions wifi_rx;
    /// Capture length; the capture runs at the Wi-Fi sample rate.
    double capture_duration_s = 45e-3;
    std::uint64_t seed = 1;
    std::string label = "experiment";
    std::string channel_case = "NoFading";

    void validate() const;
    [[nodiscard]] std::size_t capture_samples() const;
};

struct ChannelCase {
    std::string name;
    channel::ChannelProfile nr;
    channel::ChannelProfile wifi;
};

/// NoFading, TDL-B/TGn-B, TDL-C/TGn-B, TDL-C/TGn-D.
[[nodiscard]] std::vector<ChannelCase> default_channel_cases(double delay_spread_s = 50e-9);

/// Resolves "NoFading" or "<nr profile>/<wifi profile>" against the built-in tables.
[[nodiscard]] ChannelCase channel_case(const std::string& name, double delay_spread_s = 50e-9);

struct SweepConfig {
    ExperimentConfig base;
    std::vector<double> attenuations_db{6.0, 12.0, 18.0, 24.0, 30.0};
    std::vector<ChannelCase> channel_cases = default_channel_cases();
    /// Delay spread the TDL tables of the channel cases are scaled by.
    double delay_spread_s = 50e-9;
    int seeds_per_point = 1;

    void validate() const;
    [[nodiscard]] std::size_t point_count() const;
};

struct ExperimentRecord {
    std::string label;
    std::string channel_case;
    double attenuation_db = 0.0;
    std::uint64_t seed = 0;

    std::optional<double> nr_evm_pct;
    std::optional<double> nr_ber;
    std::optional<double> wifi_evm_pct;
    std::optional<double> wifi_ber;
    bool wifi_composite_decode = false;
    bool wifi_residual_decode = false;
    std::optional<double> sic_depth_db;
    std::optional<double> chan_supp_db;

    std::size_t wifi_packets_residual = 0;
    std::size_t wifi_packets_composite = 0;
    std::optional<double> wifi_coarse_cfo_hz;  // mean over residual packets
    std::optional<double> wifi_fine_cfo_hz;
    std::optional<std::size_t> wifi_timing_offset;  // first residual packet
    std::optional<std::size_t> nr_timing_offset;
    std::optional<std::size_t> sic_delay;
    bool sic_low_confidence = false;
    std::optional<double> nr_to_wifi_db;
    /// Empty on success; otherwise the error that stopped the chain.
    std::string failure;

    [[nodiscard]] bool ok() const noexcept { return failure.empty(); }
    bool operator==(const ExperimentRecord&) const = default;
};

/// Buffers kept for inspection (the composite and residual captures).
struct ExperimentArtifacts {
    IqBuffer composite;
    IqBuffer residual;
};

/**
 * @brief Full chain for one configuration: generation, channel filtering, impairments,
 * mixing, DC removal, NR demodulation of the composite, SIC, NR demodulation of the
 * residual for the post-cancellation channel, and Wi-Fi demodulation of residual and
 * composite. Errors are captured in the record.
 */
[[nodiscard]] ExperimentRecord run_experiment(const ExperimentConfig& cfg, ExperimentArtifacts* artifacts = nullptr);

/// Stable hash of a sweep point, mixed into the base seed.
[[nodiscard]] std::uint64_t point_seed(std::uint64_t base, std::size_t case_index, std::size_t attenuation_index,
                                       std::size_t replicate);

/// Experiment configuration of one sweep point.
[[nodiscard]] ExperimentConfig point_config(const SweepConfig& cfg, std::size_t case_index,
                                            std::size_t attenuation_index, std::size_t replicate);

/// Called from worker threads with the point index once a point finishes.
using ArtifactSink = std::function<void(std::size_t, const ExperimentRecord&, const ExperimentArtifacts&)>;

/// Records ordered (case, attenuation, seed); `parallel` worker threads.
[[nodiscard]] std::vector<ExperimentRecord> sweep(const SweepConfig& cfg, int parallel = 1,
                                                  const ArtifactSink& sink = {});

/// Table I defaults with the 45 ms capture.
[[nodiscard]] SweepConfig default_sweep();

/// Applies a named preset ("table2", "ci") on top of cfg.
void apply_preset(SweepConfig& cfg, const std::string& name);

}  // namespace siclab::harness
