#include "siclab/common.hpp"

#include <cmath>

#include "siclab/kernels.hpp"

namespace siclab {

IqBuffer::IqBuffer(ComplexVector samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
        throw InputError("IqBuffer: sample rate must be positive and finite");
    }
    for (const auto& s : samples_) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw InputError("IqBuffer: non-finite sample");
        }
    }
}

double IqBuffer::mean_power() const noexcept {
    if (samples_.empty()) {
        return 0.0;
    }
    return kernels::energy(samples_) / static_cast<double>(samples_.size());
}

std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix_seed(mix_seed(seed) ^ (stream * 0xD1B54A32D192ED03ULL));
}

}  // namespace siclab
