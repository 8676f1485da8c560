#pragma once

#include <cstddef>

// Low-level numeric kernels used by the LU factorization, the Newton-Raphson
// Jacobian assembly, and the statistics reductions. Every kernel has a scalar
// reference implementation plus SIMD variants (AVX2 on x86-64, NEON on
// aarch64) selected once at runtime. The scalar variant is the semantic
// definition; SIMD variants must agree with it to rounding order.
//
// All kernels assume finite inputs (no NaN/Inf) unless noted.

namespace lmpsim::kern {

enum class Backend { scalar, avx2, neon };

// Backend currently in use (auto-detected on first call).
Backend active();
const char* name(Backend b);
bool available(Backend b);

// Test hooks: pin a specific backend, or return to auto-detection.
// force() throws std::invalid_argument if the backend is not available
// on this machine.
void force(Backend b);
void reset();

// y[i] += a * x[i]
void axpy(std::size_t n, double a, const double* x, double* y);

// sum of x[i] * y[i]
double dot(std::size_t n, const double* x, const double* y);

// sum of x[i]
double sum(std::size_t n, const double* x);

// sum of (x[i] - c)^2
double sum_sq_dev(std::size_t n, double c, const double* x);

// running min/max over x; n == 0 leaves *lo/*hi untouched
void minmax(std::size_t n, const double* x, double* lo, double* hi);

// count of elements with |x[i]| < thr (strict)
std::size_t count_abs_below(std::size_t n, double thr, const double* x);

// index of the first element attaining max |x[i]|; n must be > 0
std::size_t iamax(std::size_t n, const double* x);

// complex dot (no conjugation): sum over k of (ar+i*ai)[k] * (br+i*bi)[k]
void cdot(std::size_t n, const double* ar, const double* ai,
          const double* br, const double* bi, double* out_re, double* out_im);

// Jacobian row kernel: for each j,
//   t_j   = conj(yr[j] + i*yi[j]) * (cr[j] + i*ci[j])
//   out_p[j] = Re((ar + i*ai) * t_j)
//   out_q[j] = Im((ar + i*ai) * t_j)
// Overwrites out_p/out_q. This is the off-diagonal dS_i/dx_j pattern with
// a = V_i and c_j = conj(dV_j/dx_j).
void jrow(std::size_t n, double ar, double ai,
          const double* yr, const double* yi,
          const double* cr, const double* ci,
          double* out_p, double* out_q);

} // namespace lmpsim::kern
