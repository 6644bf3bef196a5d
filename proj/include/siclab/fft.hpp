#pragma once

#include <span>

#include "siclab/common.hpp"

namespace siclab::fft {

/// In-place unnormalized forward DFT: X[k] = sum_n x[n] e^{-j 2 pi k n / N}.
void forward(std::span<Complex> data);

/// In-place unnormalized inverse DFT: x[n] = sum_k X[k] e^{+j 2 pi k n / N}.
void inverse(std::span<Complex> data);

/// Smallest power of two >= n.
[[nodiscard]] std::size_t next_pow2(std::size_t n);

/**
 * @brief Circular-free cross-correlation c[d] = sum_n conj(ref[n]) * sig[n + d] for d in [0, max_lag].
 *
 * Samples of sig beyond its end count as zero. Computed by zero-padded FFTs.
 */
[[nodiscard]] ComplexVector cross_correlate(std::span<const Complex> ref, std::span<const Complex> sig,
                                            std::size_t max_lag);

}  // namespace siclab::fft
