#include "lmpsim/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace lmpsim::kern {

namespace scalar {
void axpy(std::size_t, double, const double*, double*);
double dot(std::size_t, const double*, const double*);
double sum(std::size_t, const double*);
double sum_sq_dev(std::size_t, double, const double*);
void minmax(std::size_t, const double*, double*, double*);
std::size_t count_abs_below(std::size_t, double, const double*);
std::size_t iamax(std::size_t, const double*);
void cdot(std::size_t, const double*, const double*, const double*, const double*, double*, double*);
void jrow(std::size_t, double, double, const double*, const double*, const double*, const double*, double*, double*);
} // namespace scalar

#if defined(LMPSIM_HAVE_AVX2)
namespace avx2 {
void axpy(std::size_t, double, const double*, double*);
double dot(std::size_t, const double*, const double*);
double sum(std::size_t, const double*);
double sum_sq_dev(std::size_t, double, const double*);
void minmax(std::size_t, const double*, double*, double*);
std::size_t count_abs_below(std::size_t, double, const double*);
std::size_t iamax(std::size_t, const double*);
void cdot(std::size_t, const double*, const double*, const double*, const double*, double*, double*);
void jrow(std::size_t, double, double, const double*, const double*, const double*, const double*, double*, double*);
} // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void axpy(std::size_t, double, const double*, double*);
double dot(std::size_t, const double*, const double*);
double sum(std::size_t, const double*);
double sum_sq_dev(std::size_t, double, const double*);
void minmax(std::size_t, const double*, double*, double*);
std::size_t count_abs_below(std::size_t, double, const double*);
std::size_t iamax(std::size_t, const double*);
void cdot(std::size_t, const double*, const double*, const double*, const double*, double*, double*);
void jrow(std::size_t, double, double, const double*, const double*, const double*, const double*, double*, double*);
} // namespace neon
#endif

namespace {

struct Ops {
    void (*axpy)(std::size_t, double, const double*, double*);
    double (*dot)(std::size_t, const double*, const double*);
    double (*sum)(std::size_t, const double*);
    double (*sum_sq_dev)(std::size_t, double, const double*);
    void (*minmax)(std::size_t, const double*, double*, double*);
    std::size_t (*count_abs_below)(std::size_t, double, const double*);
    std::size_t (*iamax)(std::size_t, const double*);
    void (*cdot)(std::size_t, const double*, const double*, const double*, const double*, double*, double*);
    void (*jrow)(std::size_t, double, double, const double*, const double*, const double*, const double*, double*, double*);
};

constexpr Ops scalar_ops{scalar::axpy, scalar::dot,   scalar::sum,
                         scalar::sum_sq_dev, scalar::minmax, scalar::count_abs_below,
                         scalar::iamax, scalar::cdot, scalar::jrow};

#if defined(LMPSIM_HAVE_AVX2)
constexpr Ops avx2_ops{avx2::axpy, avx2::dot,   avx2::sum,
                       avx2::sum_sq_dev, avx2::minmax, avx2::count_abs_below,
                       avx2::iamax, avx2::cdot, avx2::jrow};
#endif

#if defined(__aarch64__)
constexpr Ops neon_ops{neon::axpy, neon::dot,   neon::sum,
                       neon::sum_sq_dev, neon::minmax, neon::count_abs_below,
                       neon::iamax, neon::cdot, neon::jrow};
#endif

Backend detect() {
#if defined(LMPSIM_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Backend::avx2;
#endif
#if defined(__aarch64__)
    return Backend::neon;
#endif
    return Backend::scalar;
}

const Ops* ops_for(Backend b) {
    switch (b) {
    case Backend::scalar: return &scalar_ops;
#if defined(LMPSIM_HAVE_AVX2)
    case Backend::avx2: return &avx2_ops;
#endif
#if defined(__aarch64__)
    case Backend::neon: return &neon_ops;
#endif
    default: return nullptr;
    }
}

std::atomic<const Ops*> g_ops{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const Ops& current() {
    const Ops* p = g_ops.load(std::memory_order_acquire);
    if (!p) {
        const Backend b = detect();
        p = ops_for(b);
        g_backend.store(b, std::memory_order_relaxed);
        g_ops.store(p, std::memory_order_release);
    }
    return *p;
}

} // namespace

Backend active() {
    current();
    return g_backend.load(std::memory_order_relaxed);
}

const char* name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
    }
    return "?";
}

bool available(Backend b) {
    if (b == Backend::scalar) return true;
#if defined(LMPSIM_HAVE_AVX2)
    if (b == Backend::avx2) return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#endif
#if defined(__aarch64__)
    if (b == Backend::neon) return true;
#endif
    return false;
}

void force(Backend b) {
    if (!available(b))
        throw std::invalid_argument(std::string("kernel backend not available: ") + name(b));
    g_backend.store(b, std::memory_order_relaxed);
    g_ops.store(ops_for(b), std::memory_order_release);
}

void reset() {
    const Backend b = detect();
    g_backend.store(b, std::memory_order_relaxed);
    g_ops.store(ops_for(b), std::memory_order_release);
}

void axpy(std::size_t n, double a, const double* x, double* y) { current().axpy(n, a, x, y); }
double dot(std::size_t n, const double* x, const double* y) { return current().dot(n, x, y); }
double sum(std::size_t n, const double* x) { return current().sum(n, x); }
double sum_sq_dev(std::size_t n, double c, const double* x) { return current().sum_sq_dev(n, c, x); }
void minmax(std::size_t n, const double* x, double* lo, double* hi) { current().minmax(n, x, lo, hi); }
std::size_t count_abs_below(std::size_t n, double thr, const double* x) { return current().count_abs_below(n, thr, x); }
std::size_t iamax(std::size_t n, const double* x) { return current().iamax(n, x); }
void cdot(std::size_t n, const double* ar, const double* ai, const double* br, const double* bi,
          double* out_re, double* out_im) { current().cdot(n, ar, ai, br, bi, out_re, out_im); }
void jrow(std::size_t n, double ar, double ai, const double* yr, const double* yi,
          const double* cr, const double* ci, double* out_p, double* out_q) {
    current().jrow(n, ar, ai, yr, yi, cr, ci, out_p, out_q);
}

} // namespace lmpsim::kern
