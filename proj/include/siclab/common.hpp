#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace siclab {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad rates, grid larger than FFT, unknown keys).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Caller passed arguments that violate an operation's preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

/// Input is well-formed but carries no usable signal (all-zero, empty).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Linear-algebra failure that must not be hidden by silent regularization.
class SolverError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/**
 * @brief Complex baseband sample sequence tagged with its sample rate.
 *
 * Every signal in the chain (transmit waveforms, composite capture, reconstruction,
 * residual) travels as an IqBuffer. Construction rejects non-finite samples and
 * non-positive rates, so any IqBuffer in flight is valid.
 */
class IqBuffer {
public:
    IqBuffer() = default;
    IqBuffer(ComplexVector samples, double sample_rate);

    [[nodiscard]] std::span<const Complex> samples() const noexcept { return samples_; }
    [[nodiscard]] const ComplexVector& vector() const noexcept { return samples_; }
    [[nodiscard]] double sample_rate() const noexcept { return sample_rate_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
    [[nodiscard]] const Complex& operator[](std::size_t i) const { return samples_[i]; }

    /// Mean of |x|^2; zero for an empty buffer.
    [[nodiscard]] double mean_power() const noexcept;

    bool operator==(const IqBuffer&) const = default;

private:
    ComplexVector samples_;
    double sample_rate_ = 1.0;
};

/// SplitMix64 finalizer; the stable mixing function behind all seed derivation.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Derives an independent sub-stream seed for a named stage of a computation.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace siclab
