#include "siclab/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace siclab {
namespace {

int gray_to_binary(int g) {
    int b = g;
    for (int shift = 1; (g >> shift) != 0; ++shift) {
        b ^= g >> shift;
    }
    return b;
}

}  // namespace

int bits_per_symbol(Modulation m) noexcept {
    switch (m) {
        case Modulation::Bpsk: return 1;
        case Modulation::Qpsk: return 2;
        case Modulation::Qam16: return 4;
        case Modulation::Qam64: return 6;
        case Modulation::Qam256: return 8;
    }
    return 0;
}

std::string_view modulation_name(Modulation m) noexcept {
    switch (m) {
        case Modulation::Bpsk: return "BPSK";
        case Modulation::Qpsk: return "QPSK";
        case Modulation::Qam16: return "16QAM";
        case Modulation::Qam64: return "64QAM";
        case Modulation::Qam256: return "256QAM";
    }
    return "?";
}

Modulation parse_modulation(std::string_view name) {
    for (auto m : {Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64, Modulation::Qam256}) {
        if (modulation_name(m) == name) return m;
    }
    throw ConfigError("unknown modulation '" + std::string(name) + "'");
}

Constellation::Constellation(Modulation m)
    : modulation_(m), bits_(siclab::bits_per_symbol(m)) {
    if (m == Modulation::Bpsk) {
        axis_bits_ = 1;
        levels_ = 2;
        scale_ = 1.0;
    } else {
        axis_bits_ = bits_ / 2;
        levels_ = 1 << axis_bits_;
        scale_ = std::sqrt(2.0 * (levels_ * levels_ - 1) / 3.0);
    }
}

Complex Constellation::map(std::span<const std::uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != bits_) throw InputError("Constellation::map: wrong bit count");
    auto axis = [&](std::size_t first) {
        int g = 0;
        for (int i = 0; i < axis_bits_; ++i) g = (g << 1) | (bits[first + i] & 1);
        const int idx = gray_to_binary(g);
        return (2.0 * idx - (levels_ - 1)) / scale_;
    };
    if (modulation_ == Modulation::Bpsk) return {axis(0), 0.0};
    return {axis(0), axis(static_cast<std::size_t>(axis_bits_))};
}

int Constellation::axis_index(double v) const noexcept {
    const double pos = (v * scale_ + (levels_ - 1)) / 2.0;
    return std::clamp(static_cast<int>(std::lround(pos)), 0, levels_ - 1);
}

Complex Constellation::slice(Complex s) const noexcept {
    auto level = [&](double v) { return (2.0 * axis_index(v) - (levels_ - 1)) / scale_; };
    if (modulation_ == Modulation::Bpsk) return {level(s.real()), 0.0};
    return {level(s.real()), level(s.imag())};
}

void Constellation::demap(Complex s, std::vector<std::uint8_t>& out) const {
    auto push_axis = [&](double v) {
        const int idx = axis_index(v);
        const int g = idx ^ (idx >> 1);
        for (int i = axis_bits_ - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((g >> i) & 1));
    };
    push_axis(s.real());
    if (modulation_ != Modulation::Bpsk) push_axis(s.imag());
}

double Constellation::min_distance() const noexcept { return 2.0 / scale_; }

std::vector<Complex> Constellation::points() const {
    std::vector<Complex> pts;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(bits_));
    for (int v = 0; v < (1 << bits_); ++v) {
        for (int i = 0; i < bits_; ++i) bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((v >> (bits_ - 1 - i)) & 1);
        pts.push_back(map(bits));
    }
    return pts;
}

}  // namespace siclab
