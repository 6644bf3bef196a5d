#include <immintrin.h>

#include <algorithm>

#include "kernels/kernels_impl.hpp"

// std::complex<double> is layout-compatible with double[2]; two complex values
// fill one __m256d as [re0, im0, re1, im1].

namespace siclab::kernels::detail {
namespace {

inline const double* as_doubles(const Complex* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(Complex* p) { return reinterpret_cast<double*>(p); }

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

Complex cdotc_avx2(const Complex* x, const Complex* y, std::size_t n) {
    const double* xp = as_doubles(x);
    const double* yp = as_doubles(y);
    __m256d rr0 = _mm256_setzero_pd();
    __m256d rr1 = _mm256_setzero_pd();
    __m256d ri0 = _mm256_setzero_pd();
    __m256d ri1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
        const __m256d x1 = _mm256_loadu_pd(xp + 2 * i + 4);
        const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
        const __m256d y1 = _mm256_loadu_pd(yp + 2 * i + 4);
        rr0 = _mm256_fmadd_pd(x0, y0, rr0);
        rr1 = _mm256_fmadd_pd(x1, y1, rr1);
        ri0 = _mm256_fmadd_pd(x0, _mm256_permute_pd(y0, 0b0101), ri0);
        ri1 = _mm256_fmadd_pd(x1, _mm256_permute_pd(y1, 0b0101), ri1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
        const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
        rr0 = _mm256_fmadd_pd(x0, y0, rr0);
        ri0 = _mm256_fmadd_pd(x0, _mm256_permute_pd(y0, 0b0101), ri0);
    }
    const __m256d rr = _mm256_add_pd(rr0, rr1);
    // ri lanes hold [xr*yi, xi*yr, ...]; imaginary part is the even minus odd lanes.
    const __m256d ri = _mm256_add_pd(ri0, ri1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, ri);
    double re = hsum(rr);
    double im = (lanes[0] - lanes[1]) + (lanes[2] - lanes[3]);
    for (; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

double energy_avx2(const Complex* x, std::size_t n) {
    const double* xp = as_doubles(x);
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(xp + 2 * i);
        const __m256d v1 = _mm256_loadu_pd(xp + 2 * i + 4);
        a0 = _mm256_fmadd_pd(v0, v0, a0);
        a1 = _mm256_fmadd_pd(v1, v1, a1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d v0 = _mm256_loadu_pd(xp + 2 * i);
        a0 = _mm256_fmadd_pd(v0, v0, a0);
    }
    double acc = hsum(_mm256_add_pd(a0, a1));
    for (; i < n; ++i) {
        acc += std::norm(x[i]);
    }
    return acc;
}

Complex rdot_avx2(const double* h, const Complex* x, std::size_t n) {
    const double* xp = as_doubles(x);
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d h0 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(h + i)), 0b01010000);
        const __m256d h1 =
            _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(h + i + 2)), 0b01010000);
        a0 = _mm256_fmadd_pd(h0, _mm256_loadu_pd(xp + 2 * i), a0);
        a1 = _mm256_fmadd_pd(h1, _mm256_loadu_pd(xp + 2 * i + 4), a1);
    }
    const __m256d a = _mm256_add_pd(a0, a1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, a);
    double re = lanes[0] + lanes[2];
    double im = lanes[1] + lanes[3];
    for (; i < n; ++i) {
        re += h[i] * x[i].real();
        im += h[i] * x[i].imag();
    }
    return {re, im};
}

void fir_avx2(const Complex* h, std::size_t taps, const Complex* x, std::size_t n, Complex* out) {
    // Warm-up region has a growing tap count; handle it in scalar form.
    const std::size_t head = std::min(n, taps > 0 ? taps - 1 : 0);
    for (std::size_t i = 0; i < head; ++i) {
        Complex acc{};
        for (std::size_t k = 0; k <= i; ++k) {
            acc += h[k] * x[i - k];
        }
        out[i] = acc;
    }
    const double* xp = as_doubles(x);
    double* op = as_doubles(out);
    std::size_t i = head;
    for (; i + 4 <= n; i += 4) {
        __m256d re0 = _mm256_setzero_pd();
        __m256d re1 = _mm256_setzero_pd();
        __m256d im0 = _mm256_setzero_pd();
        __m256d im1 = _mm256_setzero_pd();
        for (std::size_t k = 0; k < taps; ++k) {
            const __m256d hr = _mm256_set1_pd(h[k].real());
            const __m256d hi = _mm256_set1_pd(h[k].imag());
            const __m256d x0 = _mm256_loadu_pd(xp + 2 * (i - k));
            const __m256d x1 = _mm256_loadu_pd(xp + 2 * (i - k) + 4);
            re0 = _mm256_fmadd_pd(x0, hr, re0);
            re1 = _mm256_fmadd_pd(x1, hr, re1);
            im0 = _mm256_fmadd_pd(_mm256_permute_pd(x0, 0b0101), hi, im0);
            im1 = _mm256_fmadd_pd(_mm256_permute_pd(x1, 0b0101), hi, im1);
        }
        // [xr*hr - xi*hi, xi*hr + xr*hi]
        _mm256_storeu_pd(op + 2 * i, _mm256_addsub_pd(re0, im0));
        _mm256_storeu_pd(op + 2 * i + 4, _mm256_addsub_pd(re1, im1));
    }
    for (; i < n; ++i) {
        Complex acc{};
        for (std::size_t k = 0; k < taps; ++k) {
            acc += h[k] * x[i - k];
        }
        out[i] = acc;
    }
}

void subtract_avx2(const Complex* a, const Complex* b, std::size_t n, Complex* out) {
    const double* ap = as_doubles(a);
    const double* bp = as_doubles(b);
    double* op = as_doubles(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        _mm256_storeu_pd(op + 2 * i, _mm256_sub_pd(_mm256_loadu_pd(ap + 2 * i), _mm256_loadu_pd(bp + 2 * i)));
    }
    for (; i < n; ++i) {
        out[i] = a[i] - b[i];
    }
}

}  // namespace

KernelTable avx2_table() {
    return {Backend::Avx2, "avx2", cdotc_avx2, energy_avx2, rdot_avx2, fir_avx2, subtract_avx2};
}

}  // namespace siclab::kernels::detail
