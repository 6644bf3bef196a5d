#include "siclab/sic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "siclab/fft.hpp"
#include "siclab/kernels.hpp"

namespace siclab::sic {

void SicConfig::validate() const {
    if (filter_length < 1) throw ConfigError("sic: filter_length must be >= 1");
    if (lambda && !(*lambda >= 0.0)) throw ConfigError("sic: lambda must be >= 0");
    if (epsilon && !(*epsilon >= 0.0)) throw ConfigError("sic: epsilon must be >= 0");
    if (!(training_fraction > 0.0 && training_fraction <= 1.0)) throw ConfigError("sic: training_fraction must be in (0, 1]");
    if (precursor_taps < 0 || precursor_taps >= filter_length) throw ConfigError("sic: precursor_taps must be in [0, filter_length)");
    if (delay_window < 1) throw ConfigError("sic: delay_window must be >= 1");
    if (!(delay_false_alarm > 0.0 && delay_false_alarm < 1.0)) throw ConfigError("sic: delay_false_alarm must be in (0, 1)");
}

double delay_threshold(std::size_t window, std::size_t lags, double false_alarm) {
    // Under white noise |rho|^2 is approximately exponential with mean 1/window.
    const double trials = static_cast<double>(std::max<std::size_t>(lags, 1));
    return std::min(1.0, std::sqrt(std::log(trials / false_alarm) / static_cast<double>(window)));
}

DelayEstimate estimate_delay(const IqBuffer& reference, const IqBuffer& capture, std::size_t max_delay,
                             double false_alarm) {
    if (reference.empty()) throw InputError("estimate_delay: empty reference");
    if (reference.sample_rate() != capture.sample_rate()) throw InputError("estimate_delay: sample-rate mismatch");
    if (capture.size() < reference.size()) throw InputError("estimate_delay: capture shorter than reference window");

    const std::size_t w = reference.size();
    max_delay = std::min(max_delay, capture.size() - 1);
    const ComplexVector corr = fft::cross_correlate(reference.samples(), capture.samples(), max_delay);

    std::vector<double> prefix(capture.size() + 1, 0.0);
    for (std::size_t i = 0; i < capture.size(); ++i) prefix[i + 1] = prefix[i] + std::norm(capture[i]);
    const double ref_energy = kernels::energy(reference.samples());

    DelayEstimate est;
    est.threshold = delay_threshold(w, max_delay + 1, false_alarm);
    if (!(ref_energy > 0.0)) return est;
    for (std::size_t d = 0; d <= max_delay; ++d) {
        const std::size_t end = std::min(capture.size(), d + w);
        const double cap_energy = prefix[end] - prefix[d];
        if (!(cap_energy > 0.0)) continue;
        const double metric = std::min(1.0, std::abs(corr[d]) / std::sqrt(ref_energy * cap_energy));
        if (metric > est.peak_metric) {
            est.peak_metric = metric;
            est.delay_samples = d;
        }
    }
    est.confident = est.peak_metric >= est.threshold;
    return est;
}

Complex estimate_alpha(std::span<const Complex> x, std::span<const Complex> y, std::optional<double> epsilon) {
    if (x.size() != y.size() || x.empty()) throw InputError("estimate_alpha: segments must have equal nonzero length");
    const double xx = kernels::energy(x);
    const double eps = epsilon ? *epsilon : 1e-12 * xx;
    const double den = xx + eps;
    if (!(den > 0.0)) throw DegenerateInputError("estimate_alpha: zero-energy reference with zero guard");
    return kernels::cdotc(x, y) / den;
}

Complex estimate_alpha(const IqBuffer& ref_aligned, const IqBuffer& capture_seg, std::optional<double> epsilon) {
    return estimate_alpha(ref_aligned.samples(), capture_seg.samples(), epsilon);
}

Eigen::MatrixXcd toeplitz_gram(std::span<const Complex> x, int taps) {
    const auto n = x.size();
    const auto l = static_cast<std::size_t>(taps);
    Eigen::MatrixXcd g(taps, taps);
    const auto& kt = kernels::active();
    // G[j][k] = sum_{m < n-k} conj(x[m + k - j]) x[m]; depends on (j, k) only through
    // the lag k - j and the row cut n - k.
    for (std::size_t j = 0; j < l; ++j) {
        for (std::size_t k = j; k < l; ++k) {
            const std::size_t len = n > k ? n - k : 0;
            const Complex v = std::conj(kt.cdotc(x.data(), x.data() + (k - j), len));
            g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
            g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = std::conj(v);
        }
    }
    return g;
}

Eigen::VectorXcd toeplitz_cross(std::span<const Complex> x, std::span<const Complex> y, int taps) {
    if (x.size() != y.size()) throw InputError("toeplitz_cross: length mismatch");
    const auto n = x.size();
    Eigen::VectorXcd b(taps);
    const auto& kt = kernels::active();
    for (std::size_t j = 0; j < static_cast<std::size_t>(taps); ++j) {
        const std::size_t len = n > j ? n - j : 0;
        b(static_cast<Eigen::Index>(j)) = kt.cdotc(x.data(), y.data() + j, len);
    }
    return b;
}

FirEstimate fit_fir(std::span<const Complex> x, std::span<const Complex> y, const SicConfig& cfg) {
    cfg.validate();
    if (x.size() != y.size()) throw InputError("fit_fir: reference and capture segments differ in length");
    if (x.size() < static_cast<std::size_t>(cfg.filter_length)) throw InputError("fit_fir: training segment shorter than filter");
    const int l = cfg.filter_length;

    const Eigen::MatrixXcd gram = toeplitz_gram(x, l);
    const Eigen::VectorXcd rhs = toeplitz_cross(x, y, l);

    FirEstimate est;
    double lambda = cfg.lambda ? *cfg.lambda : 1e-6 * gram.trace().real() / l;
    const bool explicit_zero = cfg.lambda && *cfg.lambda == 0.0;
    constexpr double kMaxCondition = 1e12;

    Eigen::MatrixXcd system;
    for (;;) {
        system = gram;
        system.diagonal().array() += lambda;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(system, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        est.condition_estimate = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        if (est.condition_estimate <= kMaxCondition) break;
        if (explicit_zero || lambda == 0.0) {
            throw SolverError("fit_fir: normal equations are singular or ill-conditioned (cond " +
                              std::to_string(est.condition_estimate) + ") with lambda = 0");
        }
        if (est.lambda_escalations == 3) break;
        lambda *= 10.0;
        ++est.lambda_escalations;
    }
    est.lambda_used = lambda;

    Eigen::LDLT<Eigen::MatrixXcd> ldlt(system);
    if (ldlt.info() != Eigen::Success) throw SolverError("fit_fir: factorization failed");
    const Eigen::VectorXcd h = ldlt.solve(rhs);
    if (!h.allFinite()) throw SolverError("fit_fir: non-finite solution");
    est.taps.assign(h.data(), h.data() + h.size());

    ComplexVector fitted(x.size());
    kernels::fir(est.taps, x, fitted);
    ComplexVector err(x.size());
    kernels::subtract(y, fitted, err);
    const double ey = kernels::energy(y);
    const double ee = kernels::energy(err);
    est.residual_training_error_db = (ey > 0.0 && ee > 0.0) ? 10.0 * std::log10(ee / ey) : -metrics::kDbCap;
    return est;
}

FirEstimate fit_fir(const IqBuffer& ref_scaled, const IqBuffer& capture_seg, const SicConfig& cfg) {
    return fit_fir(ref_scaled.samples(), capture_seg.samples(), cfg);
}

IqBuffer reconstruct(const IqBuffer& ref_aligned, Complex alpha, const FirEstimate& fir) {
    if (fir.taps.empty()) throw InputError("reconstruct: empty FIR");
    ComplexVector scaled(ref_aligned.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = alpha * ref_aligned[i];
    ComplexVector out(ref_aligned.size());
    kernels::fir(fir.taps, scaled, out);
    return IqBuffer(std::move(out), ref_aligned.sample_rate());
}

IqBuffer cancel(const IqBuffer& capture, const IqBuffer& reconstruction) {
    if (capture.size() != reconstruction.size()) throw InputError("cancel: length mismatch");
    ComplexVector out(capture.size());
    kernels::subtract(capture.samples(), reconstruction.samples(), out);
    return IqBuffer(std::move(out), capture.sample_rate());
}

IqBuffer align_reference(const IqBuffer& reference, std::size_t offset, std::size_t length) {
    ComplexVector out(length);
    for (std::size_t n = offset; n < length && n - offset < reference.size(); ++n) out[n] = reference[n - offset];
    return IqBuffer(std::move(out), reference.sample_rate());
}

SicResult run_sic(const IqBuffer& capture, const IqBuffer& reference, const SicConfig& cfg) {
    cfg.validate();
    if (capture.sample_rate() != reference.sample_rate()) throw InputError("run_sic: sample-rate mismatch");
    if (capture.empty() || reference.empty()) throw InputError("run_sic: empty input");

    SicResult res;
    const std::size_t window = std::min({cfg.delay_window, reference.size(), capture.size()});
    const IqBuffer ref_window(ComplexVector(reference.vector().begin(), reference.vector().begin() + static_cast<std::ptrdiff_t>(window)),
                              reference.sample_rate());
    res.delay = estimate_delay(ref_window, capture, cfg.max_delay_search, cfg.delay_false_alarm);
    res.low_confidence = !res.delay.confident;

    const auto pre = static_cast<std::size_t>(cfg.precursor_taps);
    res.alignment_offset = res.delay.delay_samples >= pre ? res.delay.delay_samples - pre : 0;
    const IqBuffer aligned = align_reference(reference, res.alignment_offset, capture.size());

    const std::size_t overlap = std::min(capture.size(), res.alignment_offset + reference.size()) - res.alignment_offset;
    res.training_length = static_cast<std::size_t>(std::floor(cfg.training_fraction * static_cast<double>(overlap)));
    if (res.training_length < static_cast<std::size_t>(cfg.filter_length)) {
        throw InputError("run_sic: training segment shorter than the FIR length");
    }
    const auto x_train = aligned.samples().subspan(res.alignment_offset, res.training_length);
    const auto y_train = capture.samples().subspan(res.alignment_offset, res.training_length);
    // The gain is fitted on the reference at the correlation peak, the FIR on the backed-off copy.
    const IqBuffer at_peak = align_reference(reference, res.delay.delay_samples, capture.size());
    const auto x_peak = at_peak.samples().subspan(res.alignment_offset, res.training_length);

    res.alpha = estimate_alpha(x_peak, y_train, cfg.epsilon);
    ComplexVector scaled(x_train.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = res.alpha * x_train[i];
    res.fir = fit_fir(scaled, y_train, cfg);

    res.reconstruction = reconstruct(aligned, res.alpha, res.fir);
    res.residual = cancel(capture, res.reconstruction);
    res.depth = metrics::sic_depth(capture, res.residual);
    return res;
}

}  // namespace siclab::sic
