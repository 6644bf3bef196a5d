#include "siclab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

// FFTW planning is not thread-safe, execution with the new-array interface is.
// Plans are created once per (size, direction) under a lock and executed on
// fftw_malloc'd scratch so the alignment always matches the plan.

namespace siclab::fft {
namespace {

class FftwBuffer {
public:
    explicit FftwBuffer(std::size_t n)
        : n_(n), data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(n, 1)))) {
        if (data_ == nullptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data_); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* get() const noexcept { return data_; }
    Complex* as_complex() const noexcept { return reinterpret_cast<Complex*>(data_); }
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_;
    fftw_complex* data_;
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan plan_for(std::size_t n, int sign) {
    static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
    std::lock_guard lock(plan_mutex());
    auto key = std::make_pair(n, sign);
    if (auto it = plans.find(key); it != plans.end()) {
        return it->second;
    }
    FftwBuffer scratch(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), scratch.get(), scratch.get(), sign, FFTW_ESTIMATE);
    if (p == nullptr) throw Error("fft: FFTW failed to create a plan");
    plans.emplace(key, p);
    return p;
}

void transform(std::span<Complex> data, int sign) {
    if (data.empty()) return;
    fftw_plan p = plan_for(data.size(), sign);
    FftwBuffer buf(data.size());
    std::copy(data.begin(), data.end(), buf.as_complex());
    fftw_execute_dft(p, buf.get(), buf.get());
    std::copy(buf.as_complex(), buf.as_complex() + data.size(), data.begin());
}

}  // namespace

void forward(std::span<Complex> data) { transform(data, FFTW_FORWARD); }

void inverse(std::span<Complex> data) { transform(data, FFTW_BACKWARD); }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

ComplexVector cross_correlate(std::span<const Complex> ref, std::span<const Complex> sig, std::size_t max_lag) {
    if (ref.empty()) throw InputError("cross_correlate: empty reference");
    const std::size_t sig_used = std::min(sig.size(), ref.size() + max_lag);
    const std::size_t n = next_pow2(ref.size() + max_lag + 1);
    ComplexVector a(n), b(n);
    std::copy(ref.begin(), ref.end(), a.begin());
    std::copy(sig.begin(), sig.begin() + static_cast<std::ptrdiff_t>(sig_used), b.begin());
    forward(a);
    forward(b);
    for (std::size_t k = 0; k < n; ++k) {
        b[k] *= std::conj(a[k]);
    }
    inverse(b);
    ComplexVector out(max_lag + 1);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t d = 0; d <= max_lag; ++d) {
        out[d] = b[d] * scale;
    }
    return out;
}

}  // namespace siclab::fft
