#if defined(__aarch64__)

#include "lmpsim/kernels.hpp"

#include <arm_neon.h>
#include <cmath>

// NEON variants, 2-wide. Same structure as the AVX2 file: fixed-order lane
// combination for reductions, scalar tails.

namespace {

inline double hsum(float64x2_t v) {
    return vgetq_lane_f64(v, 0) + vgetq_lane_f64(v, 1);
}

} // namespace

namespace lmpsim::kern::neon {

void axpy(std::size_t n, double a, const double* x, double* y) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i] * y[i];
    return r;
}

double sum(std::size_t n, const double* x) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

double sum_sq_dev(std::size_t n, double c, const double* x) {
    const float64x2_t vc = vdupq_n_f64(c);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vc);
        acc = vfmaq_f64(acc, d, d);
    }
    double r = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - c;
        r += d * d;
    }
    return r;
}

void minmax(std::size_t n, const double* x, double* lo, double* hi) {
    double l = *lo, h = *hi;
    std::size_t i = 0;
    if (n >= 2) {
        float64x2_t vlo = vdupq_n_f64(l);
        float64x2_t vhi = vdupq_n_f64(h);
        for (; i + 2 <= n; i += 2) {
            const float64x2_t v = vld1q_f64(x + i);
            vlo = vminq_f64(vlo, v);
            vhi = vmaxq_f64(vhi, v);
        }
        l = std::fmin(l, std::fmin(vgetq_lane_f64(vlo, 0), vgetq_lane_f64(vlo, 1)));
        h = std::fmax(h, std::fmax(vgetq_lane_f64(vhi, 0), vgetq_lane_f64(vhi, 1)));
    }
    for (; i < n; ++i) {
        if (x[i] < l) l = x[i];
        if (x[i] > h) h = x[i];
    }
    *lo = l;
    *hi = h;
}

std::size_t count_abs_below(std::size_t n, double thr, const double* x) {
    std::size_t cnt = 0, i = 0;
    const float64x2_t vt = vdupq_n_f64(thr);
    for (; i + 2 <= n; i += 2) {
        const uint64x2_t m = vcltq_f64(vabsq_f64(vld1q_f64(x + i)), vt);
        cnt += (vgetq_lane_u64(m, 0) & 1u) + (vgetq_lane_u64(m, 1) & 1u);
    }
    for (; i < n; ++i)
        if (std::fabs(x[i]) < thr) ++cnt;
    return cnt;
}

std::size_t iamax(std::size_t n, const double* x) {
    double best = 0.0;
    std::size_t i = 0;
    if (n >= 2) {
        float64x2_t vb = vdupq_n_f64(0.0);
        for (; i + 2 <= n; i += 2) vb = vmaxq_f64(vb, vabsq_f64(vld1q_f64(x + i)));
        best = std::fmax(vgetq_lane_f64(vb, 0), vgetq_lane_f64(vb, 1));
    }
    for (; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > best) best = v;
    }
    for (std::size_t k = 0; k < n; ++k)
        if (std::fabs(x[k]) == best) return k;
    return 0;
}

void cdot(std::size_t n, const double* ar, const double* ai,
          const double* br, const double* bi, double* out_re, double* out_im) {
    float64x2_t re = vdupq_n_f64(0.0), im = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t xr = vld1q_f64(ar + i);
        const float64x2_t xi = vld1q_f64(ai + i);
        const float64x2_t yr = vld1q_f64(br + i);
        const float64x2_t yi = vld1q_f64(bi + i);
        re = vfmaq_f64(re, xr, yr);
        re = vfmsq_f64(re, xi, yi);
        im = vfmaq_f64(im, xr, yi);
        im = vfmaq_f64(im, xi, yr);
    }
    double sre = hsum(re), sim = hsum(im);
    for (; i < n; ++i) {
        sre += ar[i] * br[i] - ai[i] * bi[i];
        sim += ar[i] * bi[i] + ai[i] * br[i];
    }
    *out_re = sre;
    *out_im = sim;
}

void jrow(std::size_t n, double ar, double ai,
          const double* yr, const double* yi,
          const double* cr, const double* ci,
          double* out_p, double* out_q) {
    const float64x2_t va_r = vdupq_n_f64(ar);
    const float64x2_t va_i = vdupq_n_f64(ai);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t wyr = vld1q_f64(yr + i);
        const float64x2_t wyi = vld1q_f64(yi + i);
        const float64x2_t wcr = vld1q_f64(cr + i);
        const float64x2_t wci = vld1q_f64(ci + i);
        const float64x2_t tr = vfmaq_f64(vmulq_f64(wyi, wci), wyr, wcr);
        const float64x2_t ti = vfmsq_f64(vmulq_f64(wyr, wci), wyi, wcr);
        vst1q_f64(out_p + i, vfmsq_f64(vmulq_f64(va_r, tr), va_i, ti));
        vst1q_f64(out_q + i, vfmaq_f64(vmulq_f64(va_i, tr), va_r, ti));
    }
    for (; i < n; ++i) {
        const double tr = yr[i] * cr[i] + yi[i] * ci[i];
        const double ti = yr[i] * ci[i] - yi[i] * cr[i];
        out_p[i] = ar * tr - ai * ti;
        out_q[i] = ar * ti + ai * tr;
    }
}

} // namespace lmpsim::kern::neon

#endif // __aarch64__
