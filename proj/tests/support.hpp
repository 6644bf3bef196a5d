#pragma once

// Shared test helpers: random data and brute-force oracles that do not go through
// the library's kernels.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "siclab/common.hpp"

namespace testsupport {

using siclab::Complex;
using siclab::ComplexVector;

inline ComplexVector random_vector(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma / std::sqrt(2.0));
    ComplexVector v(n);
    for (auto& x : v) x = Complex(g(rng), g(rng));
    return v;
}

inline std::vector<double> random_real(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

/// sum conj(x) y accumulated in long double.
inline Complex dot_oracle(const ComplexVector& x, const ComplexVector& y) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const long double a = x[i].real(), b = -x[i].imag(), c = y[i].real(), d = y[i].imag();
        re += a * c - b * d;
        im += a * d + b * c;
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

/// Same-length causal convolution, zero initial state.
inline ComplexVector conv_oracle(const ComplexVector& h, const ComplexVector& x) {
    ComplexVector y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t k = 0; k < h.size() && k <= n; ++k) {
            const Complex p = h[k] * x[n - k];
            re += p.real();
            im += p.imag();
        }
        y[n] = Complex(static_cast<double>(re), static_cast<double>(im));
    }
    return y;
}

inline double power(const ComplexVector& v) {
    long double s = 0.0L;
    for (const auto& x : v) s += std::norm(x);
    return v.empty() ? 0.0 : static_cast<double>(s / v.size());
}

inline double max_abs_diff(const ComplexVector& a, const ComplexVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testsupport
