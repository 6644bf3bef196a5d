#pragma once

// Data-parallel inner loops shared by the signal chain. Each kernel has a scalar
// reference implementation and SIMD variants (AVX2+FMA on x86-64, NEON on AArch64);
// the variant is chosen once at startup from CPU features and can be overridden
// for equivalence testing.

#include <optional>
#include <span>
#include <string_view>

#include "siclab/common.hpp"

namespace siclab::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
    Backend backend;
    const char* name;
    /// sum_i conj(x[i]) * y[i]
    Complex (*cdotc)(const Complex* x, const Complex* y, std::size_t n);
    /// sum_i |x[i]|^2
    double (*energy)(const Complex* x, std::size_t n);
    /// sum_i h[i] * x[i] for real taps h
    Complex (*rdot)(const double* h, const Complex* x, std::size_t n);
    /// out[n] = sum_{k<L} h[k] * x[n-k], zero initial state, out has length n
    void (*fir)(const Complex* h, std::size_t taps, const Complex* x, std::size_t n, Complex* out);
    /// out[i] = a[i] - b[i]
    void (*subtract)(const Complex* a, const Complex* b, std::size_t n, Complex* out);
};

/// Table for a backend, or nullopt when it is not compiled in or the CPU lacks it.
[[nodiscard]] std::optional<KernelTable> table(Backend backend);

/// Kernel table currently used by the free functions below.
[[nodiscard]] const KernelTable& active();

/// Selects the backend for subsequent calls. Throws ConfigError if unavailable.
void set_backend(Backend backend);

[[nodiscard]] std::string_view backend_name(Backend backend);

[[nodiscard]] Complex cdotc(std::span<const Complex> x, std::span<const Complex> y);
[[nodiscard]] double energy(std::span<const Complex> x);
[[nodiscard]] Complex rdot(std::span<const double> h, std::span<const Complex> x);
void fir(std::span<const Complex> taps, std::span<const Complex> x, std::span<Complex> out);
void subtract(std::span<const Complex> a, std::span<const Complex> b, std::span<Complex> out);

}  // namespace siclab::kernels
