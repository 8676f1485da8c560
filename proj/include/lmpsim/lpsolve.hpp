#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

// Self-contained bounded-variable revised simplex. Returns primal solutions
// together with the exact basic duals: equality duals, inequality shadow
// prices, and reduced costs at bounds. Deterministic pivoting (Dantzig with
// lowest-index ties, Bland fallback under stalling) so repeated solves agree
// bitwise.

namespace lmpsim::lp {

struct LpError : std::runtime_error {
    using std::runtime_error::runtime_error; // numerical failure, never fabricated infeasible
};

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearProgram {
    // min c.x  subject to  A_eq x = b_eq,  A_ub x <= b_ub,  lb <= x <= ub
    std::size_t nvar = 0;
    std::vector<double> c, lb, ub;
    std::vector<double> b_eq, b_ub;

    struct Entry {
        std::size_t row, col;
        double val;
    };
    std::vector<Entry> a_eq, a_ub;

    std::size_t add_var(double cost, double lo, double hi) {
        c.push_back(cost);
        lb.push_back(lo);
        ub.push_back(hi);
        return nvar++;
    }
    std::size_t add_eq_row(double rhs) {
        b_eq.push_back(rhs);
        return b_eq.size() - 1;
    }
    std::size_t add_ub_row(double rhs) {
        b_ub.push_back(rhs);
        return b_ub.size() - 1;
    }
    void set_eq(std::size_t row, std::size_t col, double v) { a_eq.push_back({row, col, v}); }
    void set_ub(std::size_t row, std::size_t col, double v) { a_ub.push_back({row, col, v}); }
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus s);

struct LpSolution {
    LpStatus status = LpStatus::optimal;
    std::vector<double> x;        // primal (empty unless optimal)
    std::vector<double> y_eq;     // dObjective/db_eq
    std::vector<double> y_ub;     // shadow prices, >= 0 for <= rows
    std::vector<double> z_bounds; // reduced costs; 0 for basic variables
    double objective = 0.0;
    int iterations = 0;
};

LpSolution solve(const LinearProgram& lp);

// residuals used by the test suites and diagnostics
struct LpCheck {
    double primal_infeasibility = 0.0; // max constraint/bound violation
    double dual_infeasibility = 0.0;   // max sign violation of duals/reduced costs
    double duality_gap = 0.0;          // |c.x - dual objective|
    double complementary_slackness = 0.0;
};
LpCheck check_solution(const LinearProgram& lp, const LpSolution& sol);

} // namespace lmpsim::lp
