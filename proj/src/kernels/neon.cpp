#include <arm_neon.h>

#include <algorithm>

#include "kernels/kernels_impl.hpp"

// One float64x2_t holds one complex sample as [re, im].

namespace siclab::kernels::detail {
namespace {

inline const double* as_doubles(const Complex* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(Complex* p) { return reinterpret_cast<double*>(p); }

Complex cdotc_neon(const Complex* x, const Complex* y, std::size_t n) {
    const double* xp = as_doubles(x);
    const double* yp = as_doubles(y);
    float64x2_t rr = vdupq_n_f64(0.0);
    float64x2_t ri = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t xv = vld1q_f64(xp + 2 * i);
        const float64x2_t yv = vld1q_f64(yp + 2 * i);
        rr = vfmaq_f64(rr, xv, yv);
        ri = vfmaq_f64(ri, xv, vextq_f64(yv, yv, 1));
    }
    return {vgetq_lane_f64(rr, 0) + vgetq_lane_f64(rr, 1), vgetq_lane_f64(ri, 0) - vgetq_lane_f64(ri, 1)};
}

double energy_neon(const Complex* x, std::size_t n) {
    const double* xp = as_doubles(x);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t v = vld1q_f64(xp + 2 * i);
        acc = vfmaq_f64(acc, v, v);
    }
    return vaddvq_f64(acc);
}

Complex rdot_neon(const double* h, const Complex* x, std::size_t n) {
    const double* xp = as_doubles(x);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        acc = vfmaq_n_f64(acc, vld1q_f64(xp + 2 * i), h[i]);
    }
    return {vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1)};
}

void fir_neon(const Complex* h, std::size_t taps, const Complex* x, std::size_t n, Complex* out) {
    const double* xp = as_doubles(x);
    double* op = as_doubles(out);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t kmax = std::min(taps, i + 1);
        float64x2_t re = vdupq_n_f64(0.0);
        float64x2_t im = vdupq_n_f64(0.0);
        for (std::size_t k = 0; k < kmax; ++k) {
            const float64x2_t xv = vld1q_f64(xp + 2 * (i - k));
            re = vfmaq_n_f64(re, xv, h[k].real());
            im = vfmaq_n_f64(im, vextq_f64(xv, xv, 1), h[k].imag());
        }
        op[2 * i] = vgetq_lane_f64(re, 0) - vgetq_lane_f64(im, 0);
        op[2 * i + 1] = vgetq_lane_f64(re, 1) + vgetq_lane_f64(im, 1);
    }
}

void subtract_neon(const Complex* a, const Complex* b, std::size_t n, Complex* out) {
    const double* ap = as_doubles(a);
    const double* bp = as_doubles(b);
    double* op = as_doubles(out);
    for (std::size_t i = 0; i < n; ++i) {
        vst1q_f64(op + 2 * i, vsubq_f64(vld1q_f64(ap + 2 * i), vld1q_f64(bp + 2 * i)));
    }
}

}  // namespace

KernelTable neon_table() {
    return {Backend::Neon, "neon", cdotc_neon, energy_neon, rdot_neon, fir_neon, subtract_neon};
}

}  // namespace siclab::kernels::detail
