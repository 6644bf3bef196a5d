#include "siclab/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>

#include "siclab/kernels.hpp"

namespace siclab::metrics {
namespace {

DbValue ratio_db(double num, double den, double factor) {
    if (!(den > 0.0)) {
        if (!(num > 0.0)) throw DegenerateInputError("metric ratio: both terms are zero");
        return {kDbCap, true};
    }
    if (!(num > 0.0)) return {-kDbCap, true};
    const double db = factor * std::log10(num / den);
    if (db > kDbCap) return {kDbCap, true};
    if (db < -kDbCap) return {-kDbCap, true};
    return {db, false};
}

}  // namespace

double evm_rms(std::span<const Complex> equalized, std::span<const Complex> reference) {
    if (equalized.size() != reference.size() || equalized.empty()) {
        throw InputError("evm_rms: sequences must have equal nonzero length");
    }
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t k = 0; k < equalized.size(); ++k) {
        err += std::norm(equalized[k] - reference[k]);
        ref += std::norm(reference[k]);
    }
    if (!(ref > 0.0)) throw DegenerateInputError("evm_rms: zero reference energy");
    return 100.0 * std::sqrt(err / ref);
}

BerResult ber(std::span<const std::uint8_t> rx, std::span<const std::uint8_t> tx, Alignment alignment) {
    if (alignment.max_shift < 0 || alignment.step < 1) throw InputError("ber: invalid alignment policy");
    std::optional<BerResult> best;
    auto consider = [&](long shift) {
        // rx[i] pairs with tx[i + shift]
        const long lo = std::max(0L, -shift);
        const long hi = std::min(static_cast<long>(rx.size()), static_cast<long>(tx.size()) - shift);
        if (hi <= lo) return;
        std::size_t errors = 0;
        for (long i = lo; i < hi; ++i) {
            errors += (rx[static_cast<std::size_t>(i)] & 1) != (tx[static_cast<std::size_t>(i + shift)] & 1);
        }
        const auto compared = static_cast<std::size_t>(hi - lo);
        BerResult r{static_cast<double>(errors) / static_cast<double>(compared), shift, compared, errors};
        if (!best || r.ratio < best->ratio ||
            (r.ratio == best->ratio && std::labs(shift) < std::labs(best->shift))) {
            best = r;
        }
    };
    consider(0);
    for (long s = alignment.step; s <= alignment.max_shift; s += alignment.step) {
        consider(s);
        consider(-s);
    }
    if (!best) throw InputError("ber: empty overlap between decoded and reference bits");
    return *best;
}

DbValue sic_depth(const IqBuffer& before, const IqBuffer& after) {
    if (before.empty() || after.empty()) throw InputError("sic_depth: empty buffer");
    return ratio_db(before.mean_power(), after.mean_power(), 10.0);
}

DbValue sic_depth(const IqBuffer& before, const IqBuffer& after, std::size_t first, std::size_t count) {
    if (count == 0 || first + count > before.size() || first + count > after.size()) {
        throw InputError("sic_depth: window outside buffers");
    }
    const double pb = kernels::energy(before.samples().subspan(first, count));
    const double pa = kernels::energy(after.samples().subspan(first, count));
    return ratio_db(pb, pa, 10.0);
}

double matrix_norm(const Eigen::MatrixXcd& m, NormMode mode) {
    if (m.size() == 0) return 0.0;
    if (mode == NormMode::Frobenius) return m.norm();
    // Largest singular value from the smaller Gram matrix.
    const Eigen::MatrixXcd gram = m.rows() >= m.cols() ? Eigen::MatrixXcd(m.adjoint() * m)
                                                       : Eigen::MatrixXcd(m * m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

DbValue channel_suppression(const ResourceGrid& before, const ResourceGrid& after, NormMode mode) {
    if (before.values.rows() != after.values.rows() || before.values.cols() != after.values.cols()) {
        throw InputError("channel_suppression: grid shapes differ");
    }
    return ratio_db(matrix_norm(before.values, mode), matrix_norm(after.values, mode), 20.0);
}

}  // namespace siclab::metrics
