#include "lmpsim/lpsolve.hpp"

#include "lmpsim/dense.hpp"
#include "lmpsim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lmpsim::lp {

const char* to_string(LpStatus s) {
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    }
    return "?";
}

namespace {

constexpr double kOptTol = 1e-9;   // reduced-cost optimality
constexpr double kZeroPiv = 1e-9;  // smallest acceptable pivot element
constexpr int kRefactorEvery = 40; // eta-file length before refactorization
constexpr int kStallLimit = 200;   // non-improving pivots before Bland's rule
constexpr int kPivotCap = 50000;

enum class VState : unsigned char { basic, at_lo, at_hi, free_nb };

struct Eta {
    std::size_t p;
    std::vector<double> d;
};

struct Simplex {
    // problem in equality form: rows = [eq rows; ub rows with slacks]
    std::size_t m_eq, m_ub, m;
    std::size_t nx, ns, na, nv; // structural, slack, artificial, total
    std::vector<double> b;      // stacked rhs

    // structural columns, CSC
    std::vector<std::size_t> col_start, row_ix;
    std::vector<double> val;

    std::vector<double> art_sign; // artificial column entry per row
    std::vector<double> lo, hi, cost, xval;
    std::vector<VState> state;
    std::vector<std::size_t> basis; // variable at each basis position
    std::vector<std::size_t> bpos;  // variable -> basis position (nv = nonbasic)

    dense::LuFactor blu;
    std::vector<Eta> etas;
    int pivots = 0;
    bool bland = false;
    int stall = 0;
    double best_obj = kInf;

    // scratch
    std::vector<double> w1, w2;

    explicit Simplex(const LinearProgram& p) {
        m_eq = p.b_eq.size();
        m_ub = p.b_ub.size();
        m = m_eq + m_ub;
        nx = p.nvar;
        ns = m_ub;
        na = m;
        nv = nx + ns + na;

        b.resize(m);
        std::copy(p.b_eq.begin(), p.b_eq.end(), b.begin());
        std::copy(p.b_ub.begin(), p.b_ub.end(), b.begin() + m_eq);

        // triplets -> CSC over structural variables, duplicates summed
        std::vector<std::vector<std::pair<std::size_t, double>>> cols(nx);
        for (const auto& e : p.a_eq) cols[e.col].emplace_back(e.row, e.val);
        for (const auto& e : p.a_ub) cols[e.col].emplace_back(m_eq + e.row, e.val);
        col_start.assign(nx + 1, 0);
        for (std::size_t j = 0; j < nx; ++j) {
            auto& cj = cols[j];
            std::sort(cj.begin(), cj.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            std::size_t out = 0;
            for (std::size_t k = 0; k < cj.size(); ++k) {
                if (out > 0 && cj[out - 1].first == cj[k].first)
                    cj[out - 1].second += cj[k].second;
                else
                    cj[out++] = cj[k];
            }
            cj.resize(out);
            col_start[j + 1] = col_start[j] + out;
        }
        row_ix.resize(col_start[nx]);
        val.resize(col_start[nx]);
        for (std::size_t j = 0, k = 0; j < nx; ++j)
            for (const auto& [r, v] : cols[j]) {
                row_ix[k] = r;
                val[k++] = v;
            }

        lo.resize(nv);
        hi.resize(nv);
        cost.assign(nv, 0.0);
        xval.assign(nv, 0.0);
        state.assign(nv, VState::at_lo);
        bpos.assign(nv, nv);
        for (std::size_t j = 0; j < nx; ++j) {
            lo[j] = p.lb[j];
            hi[j] = p.ub[j];
        }
        for (std::size_t k = 0; k < ns; ++k) {
            lo[nx + k] = 0.0;
            hi[nx + k] = kInf;
        }
        art_sign.assign(m, 1.0);
        for (std::size_t i = 0; i < na; ++i) {
            lo[nx + ns + i] = 0.0;
            hi[nx + ns + i] = 0.0; // opened to [0,inf) only for active phase-1 artificials
        }
        w1.resize(m);
        w2.resize(m);
    }

    // iterate entries of a column
    template <class F> void for_col(std::size_t j, F&& f) const {
        if (j < nx) {
            for (std::size_t k = col_start[j]; k < col_start[j + 1]; ++k) f(row_ix[k], val[k]);
        } else if (j < nx + ns) {
            f(m_eq + (j - nx), 1.0);
        } else {
            const std::size_t r = j - nx - ns;
            f(r, art_sign[r]);
        }
    }

    void factor_basis() {
        dense::Matrix B(m, m);
        for (std::size_t i = 0; i < m; ++i)
            for_col(basis[i], [&](std::size_t r, double v) { B(r, i) = v; });
        blu = dense::lu_factor(std::move(B));
        if (blu.singular) throw LpError("numerical-failure: basis factorization singular");
        etas.clear();
    }

    // w := B^{-1} w
    void ftran(std::vector<double>& w) {
        blu.solve(w.data());
        for (const Eta& e : etas) {
            const double wp = w[e.p] / e.d[e.p];
            if (wp != 0.0) kern::axpy(m, -wp, e.d.data(), w.data());
            w[e.p] = wp;
        }
    }

    // w := B^{-T} w
    void btran(std::vector<double>& w) {
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            const double dp = it->d[it->p];
            const double full = kern::dot(m, it->d.data(), w.data());
            w[it->p] = (w[it->p] - (full - dp * w[it->p])) / dp;
        }
        blu.solve_transposed(w.data());
    }

    // recompute basic values from scratch; call only when the eta file is empty
    void recompute_basics() {
        std::vector<double>& rhs = w1;
        std::copy(b.begin(), b.end(), rhs.begin());
        for (std::size_t j = 0; j < nv; ++j) {
            if (state[j] == VState::basic || xval[j] == 0.0) continue;
            for_col(j, [&](std::size_t r, double v) { rhs[r] -= v * xval[j]; });
        }
        blu.solve(rhs.data());
        for (std::size_t i = 0; i < m; ++i) xval[basis[i]] = rhs[i];
    }

    double objective() const {
        double o = 0.0;
        for (std::size_t j = 0; j < nv; ++j)
            if (cost[j] != 0.0 && xval[j] != 0.0) o += cost[j] * xval[j];
        return o;
    }

    // duals for current costs
    void duals(std::vector<double>& y) {
        y.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) y[i] = cost[basis[i]];
        btran(y);
    }

    double reduced_cost(std::size_t j, const std::vector<double>& y) const {
        double z = cost[j];
        for_col(j, [&](std::size_t r, double v) { z -= y[r] * v; });
        return z;
    }

    // one simplex phase; returns true if optimal, false if unbounded
    bool iterate() {
        factor_basis();
        recompute_basics();
        std::vector<double> y(m), d(m);
        best_obj = kInf;
        stall = 0;

        while (true) {
            if (++pivots > kPivotCap) throw LpError("numerical-failure: pivot limit exceeded");

            duals(y);

            // pricing
            std::size_t q = nv;
            int dir = 0;
            double best = kOptTol;
            for (std::size_t j = 0; j < nv; ++j) {
                const VState st = state[j];
                if (st == VState::basic) continue;
                if (hi[j] - lo[j] <= 0.0 && st != VState::free_nb) continue; // fixed
                const double z = reduced_cost(j, y);
                double viol = 0.0;
                int dj = 0;
                if (st == VState::at_lo && z < -kOptTol) {
                    viol = -z;
                    dj = +1;
                } else if (st == VState::at_hi && z > kOptTol) {
                    viol = z;
                    dj = -1;
                } else if (st == VState::free_nb && std::fabs(z) > kOptTol) {
                    viol = std::fabs(z);
                    dj = z < 0 ? +1 : -1;
                }
                if (dj == 0) continue;
                if (bland) {
                    q = j;
                    dir = dj;
                    break;
                }
                if (viol > best) {
                    best = viol;
                    q = j;
                    dir = dj;
                }
            }
            if (q == nv) return true; // optimal for this phase

            // direction d = B^{-1} A_q
            std::fill(d.begin(), d.end(), 0.0);
            for_col(q, [&](std::size_t r, double v) { d[r] = v; });
            ftran(d);

            // ratio test: entering moves by t >= 0 in direction dir
            double t = kInf;
            std::size_t leave_pos = m; // m = bound flip
            double leave_d = 0.0;
            const double span = hi[q] - lo[q]; // inf when unbounded span
            if (std::isfinite(span)) t = span;

            for (std::size_t i = 0; i < m; ++i) {
                const double rate = -dir * d[i]; // movement of basic i per unit t
                if (std::fabs(rate) < 1e-11) continue;
                const std::size_t vb = basis[i];
                double limit;
                if (rate > 0.0) {
                    if (!std::isfinite(hi[vb])) continue;
                    limit = (hi[vb] - xval[vb]) / rate;
                } else {
                    if (!std::isfinite(lo[vb])) continue;
                    limit = (xval[vb] - lo[vb]) / (-rate);
                }
                if (limit < 0.0) limit = 0.0;
                // margin must stay finite when t is still +inf (entering
                // variable with an unbounded span), or the comparison is NaN
                const double margin =
                    std::isfinite(t) ? 1e-12 * (1.0 + std::fabs(t)) : 0.0;
                if (limit < t - margin) {
                    t = limit;
                    leave_pos = i;
                    leave_d = d[i];
                } else if (leave_pos != m && std::fabs(limit - t) <= 1e-9 * (1.0 + t)) {
                    // tie: prefer the numerically larger pivot, then lower index
                    if (bland ? (vb < basis[leave_pos])
                              : (std::fabs(d[i]) > std::fabs(leave_d) + 1e-12)) {
                        leave_pos = i;
                        leave_d = d[i];
                    }
                }
            }

            if (!std::isfinite(t)) return false; // unbounded ray

            if (leave_pos == m) {
                // bound flip: entering crosses its span, basis unchanged
                apply_step(q, dir, t, d);
                state[q] = (dir > 0) ? VState::at_hi : VState::at_lo;
                xval[q] = (dir > 0) ? hi[q] : lo[q];
            } else {
                if (std::fabs(leave_d) < kZeroPiv) {
                    // refactor once and retry the iteration with fresh numbers
                    if (!etas.empty()) {
                        factor_basis();
                        recompute_basics();
                        --pivots;
                        continue;
                    }
                    throw LpError("numerical-failure: unstable pivot");
                }
                apply_step(q, dir, t, d);
                const std::size_t out = basis[leave_pos];
                const double rate = -dir * leave_d;
                xval[out] = rate > 0.0 ? hi[out] : lo[out]; // snap exactly to the bound hit
                state[out] = rate > 0.0 ? VState::at_hi : VState::at_lo;
                bpos[out] = nv;
                basis[leave_pos] = q;
                bpos[q] = leave_pos;
                state[q] = VState::basic;

                etas.push_back({leave_pos, d});
                if (static_cast<int>(etas.size()) >= kRefactorEvery) {
                    factor_basis();
                    recompute_basics();
                }
            }

            const double obj = objective();
            if (obj < best_obj - 1e-12 * (1.0 + std::fabs(best_obj))) {
                best_obj = obj;
                stall = 0;
            } else if (++stall > kStallLimit) {
                bland = true;
            }
        }
    }

    void apply_step(std::size_t q, int dir, double t, const std::vector<double>& d) {
        if (t == 0.0) return;
        for (std::size_t i = 0; i < m; ++i) {
            if (d[i] == 0.0) continue;
            xval[basis[i]] -= dir * t * d[i];
        }
        xval[q] += dir * t;
    }
};

} // namespace

LpSolution solve(const LinearProgram& p) {
    // dimension checks up front
    if (p.c.size() != p.nvar || p.lb.size() != p.nvar || p.ub.size() != p.nvar)
        throw std::invalid_argument("lp dimension mismatch: cost/bounds vs nvar");
    for (const auto& e : p.a_eq)
        if (e.row >= p.b_eq.size() || e.col >= p.nvar)
            throw std::invalid_argument("lp dimension mismatch: a_eq entry out of range");
    for (const auto& e : p.a_ub)
        if (e.row >= p.b_ub.size() || e.col >= p.nvar)
            throw std::invalid_argument("lp dimension mismatch: a_ub entry out of range");
    for (double v : p.b_eq)
        if (!std::isfinite(v)) throw std::invalid_argument("lp b_eq not finite");
    for (double v : p.b_ub)
        if (!std::isfinite(v)) throw std::invalid_argument("lp b_ub not finite");

    LpSolution out;
    for (std::size_t j = 0; j < p.nvar; ++j) {
        if (p.lb[j] > p.ub[j]) {
            out.status = LpStatus::infeasible;
            return out;
        }
    }

    Simplex s(p);

    // initial nonbasic placement
    for (std::size_t j = 0; j < s.nv; ++j) {
        if (std::isfinite(s.lo[j])) {
            s.state[j] = VState::at_lo;
            s.xval[j] = s.lo[j];
        } else if (std::isfinite(s.hi[j])) {
            s.state[j] = VState::at_hi;
            s.xval[j] = s.hi[j];
        } else {
            s.state[j] = VState::free_nb;
            s.xval[j] = 0.0;
        }
    }

    // residuals decide the starting basis per row: slack where it already
    // fits, otherwise an artificial with the matching sign
    std::vector<double> resid(s.m);
    std::copy(s.b.begin(), s.b.end(), resid.begin());
    for (std::size_t j = 0; j < s.nx; ++j) {
        if (s.xval[j] == 0.0) continue;
        s.for_col(j, [&](std::size_t r, double v) { resid[r] -= v * s.xval[j]; });
    }
    s.basis.assign(s.m, 0);
    double art_total = 0.0;
    for (std::size_t i = 0; i < s.m; ++i) {
        const bool is_ub_row = i >= s.m_eq;
        if (is_ub_row && resid[i] >= 0.0) {
            const std::size_t slack = s.nx + (i - s.m_eq);
            s.basis[i] = slack;
            s.state[slack] = VState::basic;
            s.bpos[slack] = i;
            s.xval[slack] = resid[i];
        } else {
            const std::size_t art = s.nx + s.ns + i;
            s.art_sign[i] = (resid[i] >= 0.0) ? 1.0 : -1.0;
            s.hi[art] = kInf; // active in phase 1
            s.basis[i] = art;
            s.state[art] = VState::basic;
            s.bpos[art] = i;
            s.xval[art] = std::fabs(resid[i]);
            s.cost[art] = 1.0;
            art_total += std::fabs(resid[i]);
        }
    }

    // phase 1 only if any artificial is active
    if (art_total > 0.0) {
        if (!s.iterate()) throw LpError("numerical-failure: phase-1 unbounded");
        const double p1 = s.objective();
        double scale = 1.0;
        for (double v : s.b) scale = std::max(scale, std::fabs(v));
        if (p1 > 1e-8 * scale) {
            out.status = LpStatus::infeasible;
            out.iterations = s.pivots;
            return out;
        }
    }

    // phase 2: real costs, artificials pinned at zero
    for (std::size_t i = 0; i < s.na; ++i) {
        const std::size_t art = s.nx + s.ns + i;
        s.cost[art] = 0.0;
        s.hi[art] = 0.0;
        if (s.state[art] != VState::basic) {
            s.state[art] = VState::at_lo;
            s.xval[art] = 0.0;
        }
    }
    for (std::size_t j = 0; j < s.nx; ++j) s.cost[j] = p.c[j];
    for (std::size_t k = 0; k < s.ns; ++k) s.cost[s.nx + k] = 0.0;
    s.bland = false;

    if (!s.iterate()) {
        out.status = LpStatus::unbounded;
        out.iterations = s.pivots;
        return out;
    }

    // extract primal, duals, reduced costs
    out.status = LpStatus::optimal;
    out.iterations = s.pivots;
    out.x.assign(s.xval.begin(), s.xval.begin() + s.nx);
    out.objective = kern::dot(s.nx, p.c.data(), out.x.data());

    std::vector<double> y(s.m);
    s.duals(y);
    out.y_eq.assign(y.begin(), y.begin() + s.m_eq);
    out.y_ub.resize(s.m_ub);
    for (std::size_t k = 0; k < s.m_ub; ++k) {
        double v = -y[s.m_eq + k];
        if (std::fabs(v) < 1e-12) v = 0.0;
        out.y_ub[k] = v;
    }
    out.z_bounds.assign(s.nx, 0.0);
    for (std::size_t j = 0; j < s.nx; ++j)
        out.z_bounds[j] = (s.state[j] == VState::basic) ? 0.0 : s.reduced_cost(j, y);
    return out;
}

LpCheck check_solution(const LinearProgram& p, const LpSolution& sol) {
    LpCheck ck;
    if (sol.status != LpStatus::optimal) return ck;
    const std::size_t n = p.nvar;

    std::vector<double> req(p.b_eq.size(), 0.0), rub(p.b_ub.size(), 0.0);
    for (const auto& e : p.a_eq) req[e.row] += e.val * sol.x[e.col];
    for (const auto& e : p.a_ub) rub[e.row] += e.val * sol.x[e.col];

    for (std::size_t i = 0; i < req.size(); ++i)
        ck.primal_infeasibility = std::max(ck.primal_infeasibility, std::fabs(req[i] - p.b_eq[i]));
    for (std::size_t i = 0; i < rub.size(); ++i) {
        ck.primal_infeasibility = std::max(ck.primal_infeasibility, rub[i] - p.b_ub[i]);
        const double slackv = p.b_ub[i] - rub[i];
        ck.complementary_slackness =
            std::max(ck.complementary_slackness, std::fabs(sol.y_ub[i] * slackv));
        ck.dual_infeasibility = std::max(ck.dual_infeasibility, -sol.y_ub[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        ck.primal_infeasibility = std::max(ck.primal_infeasibility, p.lb[j] - sol.x[j]);
        ck.primal_infeasibility = std::max(ck.primal_infeasibility, sol.x[j] - p.ub[j]);
    }

    // dual objective via the bound terms the basic solution implies
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < p.b_eq.size(); ++i) dual_obj += sol.y_eq[i] * p.b_eq[i];
    for (std::size_t i = 0; i < p.b_ub.size(); ++i) dual_obj -= sol.y_ub[i] * p.b_ub[i];
    for (std::size_t j = 0; j < n; ++j) dual_obj += sol.z_bounds[j] * sol.x[j];
    ck.duality_gap = std::fabs(sol.objective - dual_obj);

    // reduced-cost sign conditions at the reported point; a fixed variable
    // (lb == ub) satisfies both bound conditions, so any sign is feasible
    for (std::size_t j = 0; j < n; ++j) {
        if (p.ub[j] - p.lb[j] < 1e-12) continue;
        const double z = sol.z_bounds[j];
        const double at_lb = std::fabs(sol.x[j] - p.lb[j]);
        const double at_ub = std::fabs(sol.x[j] - p.ub[j]);
        if (std::isfinite(p.lb[j]) && at_lb < 1e-7)
            ck.dual_infeasibility = std::max(ck.dual_infeasibility, -z);
        else if (std::isfinite(p.ub[j]) && at_ub < 1e-7)
            ck.dual_infeasibility = std::max(ck.dual_infeasibility, z);
        else
            ck.dual_infeasibility = std::max(ck.dual_infeasibility, std::fabs(z));
    }
    return ck;
}

} // namespace lmpsim::lp
