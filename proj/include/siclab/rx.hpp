#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "siclab/common.hpp"
#include "siclab/waveform.hpp"

namespace siclab::rx {

// ---------------------------------------------------------------------------
// NR-like receiver
// ---------------------------------------------------------------------------

struct NrRxOptions {
    /// Skip the timing search and take this sample as the frame start.
    std::optional<std::size_t> forced_timing;
    /// Symbols are sampled this many samples early, inside the CP; the resulting
    /// linear phase is removed from the channel estimates.
    int cp_backoff = 8;
    /// Per-search false-alarm probability of the no-signal floor.
    double false_alarm = 1e-3;
};

struct NrRxReport {
    bool signal_found = false;
    /// Frame start in the capture (first sample of the first CP).
    std::size_t timing_offset = 0;
    double timing_metric = 0.0;
    double timing_floor = 0.0;
    int symbols_demodulated = 0;
    /// Pilot cells hold raw LS estimates; data cells hold the interpolated channel.
    ResourceGrid channel_grid;
    ComplexVector equalized;
    /// Unset when no signal was found.
    std::optional<double> evm_percent;
    std::optional<double> ber;
    BitStream decoded_bits;
};

/**
 * @brief Timing, CP removal, pilot LS estimation, interpolation, one-tap equalization,
 * hard decisions, EVM and BER against the transmitted grid and bits.
 *
 * The capture must be at cfg.native_rate. Only symbols that fit entirely inside the
 * capture are demodulated; undemodulated columns of the channel grid stay zero.
 */
[[nodiscard]] NrRxReport demod_nr(const IqBuffer& capture, const waveform::NrConfig& cfg, const ResourceGrid& truth_grid,
                                  const BitStream& truth_bits, const NrRxOptions& opts = {});

/// Time-domain pilot-only waveform of the first slot, used as the timing reference.
[[nodiscard]] ComplexVector nr_pilot_reference(const waveform::NrConfig& cfg, const ResourceGrid& truth_grid);

// ---------------------------------------------------------------------------
// Wi-Fi-like receiver
// ---------------------------------------------------------------------------

struct WifiRxOptions {
    /// Normalized lag-16 autocorrelation level that opens a detection plateau.
    double detection_threshold = 0.6;
    /// Minimum plateau length in samples.
    int min_plateau = 40;
    /// Minimum normalized lag-64 correlation between the two long training symbols.
    double ltf_confirmation = 0.5;
    /// Samples of CP consumed ahead of each symbol boundary.
    int cp_backoff = 4;
    double header_evm_threshold_pct = 40.0;
};

struct WifiDetection {
    std::size_t offset = 0;  // first sample of the short training field
    double coarse_cfo_hz = 0.0;
    double plateau_metric = 0.0;
};

struct WifiPacketReport {
    std::size_t timing_offset = 0;
    double coarse_cfo_hz = 0.0;
    double fine_cfo_hz = 0.0;
    double header_evm_percent = 0.0;
    double data_evm_percent = 0.0;
    double ber = 0.0;
    bool header_crc_ok = false;
    /// Truth packet the bits were compared against.
    std::size_t matched_packet = 0;
    /// Bit shift chosen by the alignment search (0 when the header identified the packet).
    long bit_shift = 0;
};

struct WifiRxReport {
    std::size_t packets_detected = 0;
    std::vector<WifiPacketReport> packets;  // demodulated packets, ordered by offset
    std::optional<double> mean_data_evm_percent;
    std::optional<double> mean_ber;
    bool decode_success = false;
};

/// Short-training autocorrelation plateaus confirmed by the long training field.
[[nodiscard]] std::vector<WifiDetection> detect_wifi_packets(const IqBuffer& residual, const waveform::WifiConfig& cfg,
                                                             const WifiRxOptions& opts = {});

/// Detection, CFO correction, LTF channel estimate, pilot phase tracking, EVM and BER.
/// `truth` holds one payload segment per transmitted packet index.
[[nodiscard]] WifiRxReport demod_wifi(const IqBuffer& residual, const waveform::WifiConfig& cfg, const BitStream& truth,
                                      const WifiRxOptions& opts = {});

}  // namespace siclab::rx
