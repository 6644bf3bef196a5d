#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "siclab/common.hpp"
#include "siclab/waveform.hpp"

namespace siclab::metrics {

/// Values beyond this magnitude are reported capped and flagged.
constexpr double kDbCap = 200.0;

struct DbValue {
    double db = 0.0;
    bool capped = false;
};

/// RMS EVM in percent: 100 * sqrt(sum |s - ref|^2 / sum |ref|^2).
[[nodiscard]] double evm_rms(std::span<const Complex> equalized, std::span<const Complex> reference);

/// Bit-shift search used to align decoded bits with ground truth.
struct Alignment {
    int max_shift = 0;  // shifts in [-max_shift, max_shift], multiples of step
    int step = 1;
};

struct BerResult {
    double ratio = 0.0;
    long shift = 0;
    std::size_t compared = 0;
    std::size_t errors = 0;
};

/// Hamming distance over the overlap of rx[i] and tx[i + shift], minimized over the
/// alignment's shifts (ties go to the smallest |shift|).
[[nodiscard]] BerResult ber(std::span<const std::uint8_t> rx, std::span<const std::uint8_t> tx,
                            Alignment alignment = {});

/// Cancellation depth 10 log10(P_before / P_after) over the full buffers.
[[nodiscard]] DbValue sic_depth(const IqBuffer& before, const IqBuffer& after);

/// Depth over samples [first, first + count) of both buffers (diagnostic variant).
[[nodiscard]] DbValue sic_depth(const IqBuffer& before, const IqBuffer& after, std::size_t first, std::size_t count);

enum class NormMode { Spectral, Frobenius };

[[nodiscard]] double matrix_norm(const Eigen::MatrixXcd& m, NormMode mode = NormMode::Spectral);

/// Channel-estimate suppression 20 log10(||H_before|| / ||H_after||); spectral norm by default.
[[nodiscard]] DbValue channel_suppression(const ResourceGrid& before, const ResourceGrid& after,
                                          NormMode mode = NormMode::Spectral);

struct KpiSet {
    double evm_percent = 0.0;
    double ber = 0.0;
    DbValue sic_depth;
    DbValue channel_suppression;
    double power_before = 0.0;
    double power_after = 0.0;
};

}  // namespace siclab::metrics
