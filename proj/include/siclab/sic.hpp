#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>

#include "siclab/common.hpp"
#include "siclab/metrics.hpp"

namespace siclab::sic {

struct SicConfig {
    int filter_length = 32;
    /// Absolute ridge factor; nullopt selects 1e-6 * trace(X^H X) / filter_length.
    std::optional<double> lambda;
    /// Absolute denominator guard; nullopt selects 1e-12 * ||x||^2.
    std::optional<double> epsilon;
    double training_fraction = 0.30;
    std::size_t max_delay_search = 4096;
    /// Alignment starts this many samples before the correlation peak so precursor
    /// energy (fractional delay, early multipath) falls inside the FIR span.
    int precursor_taps = 8;
    /// Longest reference prefix correlated during the delay search.
    std::size_t delay_window = 32768;
    /// Per-search false-alarm probability that sets the confidence threshold.
    double delay_false_alarm = 1e-3;

    void validate() const;
};

struct DelayEstimate {
    std::size_t delay_samples = 0;
    double peak_metric = 0.0;  // normalized correlation magnitude in [0, 1]
    double threshold = 0.0;
    bool confident = false;
};

struct FirEstimate {
    ComplexVector taps;
    double residual_training_error_db = 0.0;  // 10 log10(||y - X h||^2 / ||y||^2)
    double lambda_used = 0.0;
    int lambda_escalations = 0;
    double condition_estimate = 0.0;
};

struct SicResult {
    DelayEstimate delay;
    std::size_t alignment_offset = 0;
    std::size_t training_length = 0;
    Complex alpha{};
    FirEstimate fir;
    IqBuffer reconstruction;
    IqBuffer residual;
    metrics::DbValue depth;
    /// Set when the delay estimate was not confident; cancellation is still attempted.
    bool low_confidence = false;
};

/// Correlation magnitude that white noise exceeds with probability `false_alarm`
/// over `lags` trials of a `window`-sample normalized correlation.
[[nodiscard]] double delay_threshold(std::size_t window, std::size_t lags, double false_alarm);

[[nodiscard]] DelayEstimate estimate_delay(const IqBuffer& reference, const IqBuffer& capture, std::size_t max_delay,
                                           double false_alarm = 1e-3);

/// alpha = x^H y / (x^H x + epsilon).
[[nodiscard]] Complex estimate_alpha(std::span<const Complex> ref_aligned, std::span<const Complex> capture_seg,
                                     std::optional<double> epsilon = std::nullopt);
[[nodiscard]] Complex estimate_alpha(const IqBuffer& ref_aligned, const IqBuffer& capture_seg,
                                     std::optional<double> epsilon = std::nullopt);

/// X^H X for the L-column Toeplitz regressor of x (zero initial state).
[[nodiscard]] Eigen::MatrixXcd toeplitz_gram(std::span<const Complex> x, int taps);
/// X^H y for the same regressor.
[[nodiscard]] Eigen::VectorXcd toeplitz_cross(std::span<const Complex> x, std::span<const Complex> y, int taps);

/// Regularized least-squares FIR: h = (X^H X + lambda I)^{-1} X^H y.
[[nodiscard]] FirEstimate fit_fir(std::span<const Complex> ref_scaled, std::span<const Complex> capture_seg,
                                  const SicConfig& cfg);
[[nodiscard]] FirEstimate fit_fir(const IqBuffer& ref_scaled, const IqBuffer& capture_seg, const SicConfig& cfg);

/// y_hat = h * (alpha x), same length as x, zero initial state.
[[nodiscard]] IqBuffer reconstruct(const IqBuffer& ref_aligned, Complex alpha, const FirEstimate& fir);

/// y_res = y - y_hat.
[[nodiscard]] IqBuffer cancel(const IqBuffer& capture, const IqBuffer& reconstruction);

/// Places the reference at `offset` in a zero buffer of `length` samples.
[[nodiscard]] IqBuffer align_reference(const IqBuffer& reference, std::size_t offset, std::size_t length);

/// Delay search, gain fit and FIR fit on the leading training segment, full-frame
/// reconstruction, subtraction and depth measurement.
[[nodiscard]] SicResult run_sic(const IqBuffer& capture, const IqBuffer& reference, const SicConfig& cfg = {});

}  // namespace siclab::sic
