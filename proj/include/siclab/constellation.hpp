#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "siclab/common.hpp"

namespace siclab {

enum class Modulation { Bpsk, Qpsk, Qam16, Qam64, Qam256 };

[[nodiscard]] int bits_per_symbol(Modulation m) noexcept;
[[nodiscard]] std::string_view modulation_name(Modulation m) noexcept;
[[nodiscard]] Modulation parse_modulation(std::string_view name);

/// Gray-mapped, unit-average-energy constellation with hard-decision slicing.
class Constellation {
public:
    explicit Constellation(Modulation m);

    [[nodiscard]] Modulation modulation() const noexcept { return modulation_; }
    [[nodiscard]] int bits_per_symbol() const noexcept { return bits_; }

    /// Maps bits_per_symbol() bits (MSB first, I bits then Q bits) to a point.
    [[nodiscard]] Complex map(std::span<const std::uint8_t> bits) const;

    /// Nearest constellation point.
    [[nodiscard]] Complex slice(Complex s) const noexcept;

    /// Hard-decision bits of the nearest point, appended to out.
    void demap(Complex s, std::vector<std::uint8_t>& out) const;

    /// Smallest distance between two distinct points.
    [[nodiscard]] double min_distance() const noexcept;

    [[nodiscard]] std::vector<Complex> points() const;

private:
    [[nodiscard]] int axis_index(double v) const noexcept;

    Modulation modulation_;
    int bits_;
    int axis_bits_;  // bits on each of I and Q; BPSK uses I only
    int levels_;
    double scale_;
};

}  // namespace siclab
