#if defined(LMPSIM_HAVE_AVX2)

#include "lmpsim/kernels.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2/FMA variants. 4-wide main loops with scalar tails. Reductions use a
// fixed lane-combination order so results are reproducible run to run (they
// may differ from the scalar backend in the last ulp, which the equivalence
// tests allow for).

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const double l0 = _mm_cvtsd_f64(lo);
    const double l1 = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
    const double l2 = _mm_cvtsd_f64(hi);
    const double l3 = _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
    return (l0 + l1) + (l2 + l3);
}

inline __m256d vabs(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

} // namespace

namespace lmpsim::kern::avx2 {

void axpy(std::size_t n, double a, const double* x, double* y) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, vx, vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i] * y[i];
    return r;
}

double sum(std::size_t n, const double* x) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

double sum_sq_dev(std::size_t n, double c, const double* x) {
    const __m256d vc = _mm256_set1_pd(c);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
        acc = _mm256_fmadd_pd(d, d, acc);
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
    if (n >= 4) {
        __m256d vlo = _mm256_set1_pd(l);
        __m256d vhi = _mm256_set1_pd(h);
        for (; i + 4 <= n; i += 4) {
            const __m256d v = _mm256_loadu_pd(x + i);
            vlo = _mm256_min_pd(vlo, v);
            vhi = _mm256_max_pd(vhi, v);
        }
        alignas(32) double tmp[4];
        _mm256_store_pd(tmp, vlo);
        for (double t : tmp)
            if (t < l) l = t;
        _mm256_store_pd(tmp, vhi);
        for (double t : tmp)
            if (t > h) h = t;
    }
    for (; i < n; ++i) {
        if (x[i] < l) l = x[i];
        if (x[i] > h) h = x[i];
    }
    *lo = l;
    *hi = h;
}

std::size_t count_abs_below(std::size_t n, double thr, const double* x) {
    const __m256d vt = _mm256_set1_pd(thr);
    std::size_t cnt = 0, i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d m = _mm256_cmp_pd(vabs(_mm256_loadu_pd(x + i)), vt, _CMP_LT_OQ);
        cnt += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(m)));
    }
    for (; i < n; ++i)
        if (std::fabs(x[i]) < thr) ++cnt;
    return cnt;
}

std::size_t iamax(std::size_t n, const double* x) {
    // pass 1: the max |x| value; pass 2: first index attaining it.
    // Two passes keep the first-on-tie rule exact.
    double best = 0.0;
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vb = _mm256_setzero_pd();
        for (; i + 4 <= n; i += 4) vb = _mm256_max_pd(vb, vabs(_mm256_loadu_pd(x + i)));
        alignas(32) double tmp[4];
        _mm256_store_pd(tmp, vb);
        for (double t : tmp)
            if (t > best) best = t;
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
    __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xr = _mm256_loadu_pd(ar + i);
        const __m256d xi = _mm256_loadu_pd(ai + i);
        const __m256d yr = _mm256_loadu_pd(br + i);
        const __m256d yi = _mm256_loadu_pd(bi + i);
        re = _mm256_fmadd_pd(xr, yr, re);
        re = _mm256_fnmadd_pd(xi, yi, re);
        im = _mm256_fmadd_pd(xr, yi, im);
        im = _mm256_fmadd_pd(xi, yr, im);
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
    const __m256d va_r = _mm256_set1_pd(ar);
    const __m256d va_i = _mm256_set1_pd(ai);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d wyr = _mm256_loadu_pd(yr + i);
        const __m256d wyi = _mm256_loadu_pd(yi + i);
        const __m256d wcr = _mm256_loadu_pd(cr + i);
        const __m256d wci = _mm256_loadu_pd(ci + i);
        const __m256d tr = _mm256_fmadd_pd(wyr, wcr, _mm256_mul_pd(wyi, wci));
        const __m256d ti = _mm256_fmsub_pd(wyr, wci, _mm256_mul_pd(wyi, wcr));
        _mm256_storeu_pd(out_p + i, _mm256_fmsub_pd(va_r, tr, _mm256_mul_pd(va_i, ti)));
        _mm256_storeu_pd(out_q + i, _mm256_fmadd_pd(va_r, ti, _mm256_mul_pd(va_i, tr)));
    }
    for (; i < n; ++i) {
        const double tr = yr[i] * cr[i] + yi[i] * ci[i];
        const double ti = yr[i] * ci[i] - yi[i] * cr[i];
        out_p[i] = ar * tr - ai * ti;
        out_q[i] = ar * ti + ai * tr;
    }
}

} // namespace lmpsim::kern::avx2

#endif // LMPSIM_HAVE_AVX2
