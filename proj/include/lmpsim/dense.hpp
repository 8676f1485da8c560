#pragma once

#include <cstddef>
#include <vector>

// Small dense linear algebra: row-major matrix plus LU with partial pivoting.
// Sized for power-flow Jacobians and simplex bases (tens to a few hundred
// rows), not for large-scale work.

namespace lmpsim::dense {

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    double* row(std::size_t i) { return a.data() + i * cols; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }
    void fill(double v) { a.assign(a.size(), v); }
};

// PA = LU factorization. perm[i] = original row index stored at factored
// row i. singular is set when a pivot underflows pivot_tol; solves on a
// singular factor are undefined.
struct LuFactor {
    Matrix lu;
    std::vector<std::size_t> perm;
    bool singular = false;

    std::size_t n() const { return lu.rows; }

    // solve A x = b in place (b has n entries)
    void solve(double* b) const;
    // solve A^T x = b in place
    void solve_transposed(double* b) const;
};

LuFactor lu_factor(Matrix a, double pivot_tol = 1e-12);

} // namespace lmpsim::dense
