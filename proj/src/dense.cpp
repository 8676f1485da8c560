#include "lmpsim/dense.hpp"

#include "lmpsim/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace lmpsim::dense {

LuFactor lu_factor(Matrix a, double pivot_tol) {
    const std::size_t n = a.rows;
    LuFactor f;
    f.lu = std::move(a);
    f.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

    Matrix& lu = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        // partial pivot down column k (strided, so plain loop)
        std::size_t p = k;
        double best = std::fabs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::fabs(lu(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best < pivot_tol) {
            f.singular = true;
            return f;
        }
        if (p != k) {
            std::swap_ranges(lu.row(k), lu.row(k) + n, lu.row(p));
            std::swap(f.perm[k], f.perm[p]);
        }
        const double piv = lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = lu(i, k) / piv;
            lu(i, k) = m;
            if (m != 0.0) kern::axpy(n - k - 1, -m, lu.row(k) + k + 1, lu.row(i) + k + 1);
        }
    }
    return f;
}

void LuFactor::solve(double* b) const {
    const std::size_t m = n();
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = b[perm[i]];
    // L y = P b (unit lower)
    for (std::size_t i = 1; i < m; ++i) w[i] -= kern::dot(i, lu.row(i), w.data());
    // U x = y
    for (std::size_t i = m; i-- > 0;) {
        w[i] -= kern::dot(m - i - 1, lu.row(i) + i + 1, w.data() + i + 1);
        w[i] /= lu(i, i);
    }
    std::copy(w.begin(), w.end(), b);
}

void LuFactor::solve_transposed(double* b) const {
    const std::size_t m = n();
    std::vector<double> z(b, b + m);
    // U^T z = b, outer-product form over U's rows (contiguous)
    for (std::size_t j = 0; j < m; ++j) {
        z[j] /= lu(j, j);
        if (j + 1 < m) kern::axpy(m - j - 1, -z[j], lu.row(j) + j + 1, z.data() + j + 1);
    }
    // L^T w = z (unit diagonal), backward outer-product over L's rows
    for (std::size_t j = m; j-- > 0;) {
        if (j > 0) kern::axpy(j, -z[j], lu.row(j), z.data());
    }
    // x[perm[i]] = w[i]
    for (std::size_t i = 0; i < m; ++i) b[perm[i]] = z[i];
}

} // namespace lmpsim::dense
