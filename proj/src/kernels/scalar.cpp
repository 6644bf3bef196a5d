#include <algorithm>

#include "kernels/kernels_impl.hpp"

namespace siclab::kernels::detail {
namespace {

Complex cdotc_scalar(const Complex* x, const Complex* y, std::size_t n) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

double energy_scalar(const Complex* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    }
    return acc;
}

Complex rdot_scalar(const double* h, const Complex* x, std::size_t n) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += h[i] * x[i].real();
        im += h[i] * x[i].imag();
    }
    return {re, im};
}

void fir_scalar(const Complex* h, std::size_t taps, const Complex* x, std::size_t n, Complex* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t kmax = std::min(taps, i + 1);
        double re = 0.0;
        double im = 0.0;
        for (std::size_t k = 0; k < kmax; ++k) {
            const Complex& a = h[k];
            const Complex& b = x[i - k];
            re += a.real() * b.real() - a.imag() * b.imag();
            im += a.real() * b.imag() + a.imag() * b.real();
        }
        out[i] = {re, im};
    }
}

void subtract_scalar(const Complex* a, const Complex* b, std::size_t n, Complex* out) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a[i] - b[i];
    }
}

}  // namespace

KernelTable scalar_table() {
    return {Backend::Scalar, "scalar", cdotc_scalar, energy_scalar, rdot_scalar, fir_scalar,
            subtract_scalar};
}

}  // namespace siclab::kernels::detail
