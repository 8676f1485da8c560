#include "lmpsim/kernels.hpp"

#include <cmath>

// Reference implementations. Kept branch-light and in one obvious loop each
// so the SIMD variants have an unambiguous semantic target.

namespace lmpsim::kern::scalar {

void axpy(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum(std::size_t n, const double* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sum_sq_dev(std::size_t n, double c, const double* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - c;
        acc += d * d;
    }
    return acc;
}

void minmax(std::size_t n, const double* x, double* lo, double* hi) {
    double l = *lo, h = *hi;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] < l) l = x[i];
        if (x[i] > h) h = x[i];
    }
    *lo = l;
    *hi = h;
}

std::size_t count_abs_below(std::size_t n, double thr, const double* x) {
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::fabs(x[i]) < thr) ++cnt;
    return cnt;
}

std::size_t iamax(std::size_t n, const double* x) {
    std::size_t best = 0;
    double bestv = std::fabs(x[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > bestv) {
            bestv = v;
            best = i;
        }
    }
    return best;
}

void cdot(std::size_t n, const double* ar, const double* ai,
          const double* br, const double* bi, double* out_re, double* out_im) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += ar[i] * br[i] - ai[i] * bi[i];
        im += ar[i] * bi[i] + ai[i] * br[i];
    }
    *out_re = re;
    *out_im = im;
}

void jrow(std::size_t n, double ar, double ai,
          const double* yr, const double* yi,
          const double* cr, const double* ci,
          double* out_p, double* out_q) {
    for (std::size_t i = 0; i < n; ++i) {
        // t = conj(y) * c
        const double tr = yr[i] * cr[i] + yi[i] * ci[i];
        const double ti = yr[i] * ci[i] - yi[i] * cr[i];
        out_p[i] = ar * tr - ai * ti;
        out_q[i] = ar * ti + ai * tr;
    }
}

} // namespace lmpsim::kern::scalar
