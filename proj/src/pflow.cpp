#include "lmpsim/pflow.hpp"

#include "lmpsim/kernels.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <string>

namespace lmpsim::pflow {

using netmodel::Branch;
using netmodel::Network;

namespace {

constexpr double kTol = 1e-8;
constexpr int kMaxIter = 30;

// Operating-point context shared by the solver and the sensitivity routines.
// The Jacobian is assembled from the complex relation S = diag(V) conj(Y V):
//   dS_i/dx_j = delta_ij * w_i * conj(I_i) + V_i * conj(Y_ij * w_j)
// with w_j = j*V_j for angle variables and V_j/|V_j| for magnitudes, which
// avoids per-entry trig and maps onto the jrow kernel.
struct Ctx {
    const Network* net = nullptr;
    std::size_t n = 0;
    std::size_t slack = 0;
    std::vector<std::size_t> pos; // bus index -> 0..n-2 among non-slack; slack = npos
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::vector<double> yr, yi; // Y-bus, split, row-major
    std::vector<double> vr, vi, vm;
    std::vector<double> ir, ii; // I = Y V

    // scratch for jrow
    std::vector<double> ctr, cti, cvr, cvi, rp, rq, rp2, rq2;

    std::size_t nx() const { return 2 * (n - 1); }

    void init(const Network& network) {
        net = &network;
        n = network.n_buses();
        slack = network.slack_index();
        pos.assign(n, npos);
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != slack) pos[i] = k++;

        const auto ybus = netmodel::build_admittance(network);
        yr.resize(n * n);
        yi.resize(n * n);
        for (std::size_t i = 0; i < n * n; ++i) {
            yr[i] = ybus.y[i].real();
            yi[i] = ybus.y[i].imag();
        }
        vr.resize(n);
        vi.resize(n);
        vm.resize(n);
        ir.resize(n);
        ii.resize(n);
        ctr.resize(n);
        cti.resize(n);
        cvr.resize(n);
        cvi.resize(n);
        rp.resize(n);
        rq.resize(n);
        rp2.resize(n);
        rq2.resize(n);
    }

    void set_state(const std::vector<double>& v_mag, const std::vector<double>& v_ang) {
        for (std::size_t i = 0; i < n; ++i) {
            vm[i] = v_mag[i];
            vr[i] = v_mag[i] * std::cos(v_ang[i]);
            vi[i] = v_mag[i] * std::sin(v_ang[i]);
        }
        refresh_currents();
    }

    void refresh_currents() {
        for (std::size_t i = 0; i < n; ++i)
            kern::cdot(n, &yr[i * n], &yi[i * n], vr.data(), vi.data(), &ir[i], &ii[i]);
        // per-column derivative factors: ct = conj(j V), cv = conj(V/|V|)
        for (std::size_t j = 0; j < n; ++j) {
            ctr[j] = -vi[j];
            cti[j] = -vr[j];
            cvr[j] = vr[j] / vm[j];
            cvi[j] = -vi[j] / vm[j];
        }
    }

    std::complex<double> v(std::size_t i) const { return {vr[i], vi[i]}; }
    std::complex<double> ibus(std::size_t i) const { return {ir[i], ii[i]}; }

    // computed complex power at bus i, pu
    std::complex<double> s_calc(std::size_t i) const { return v(i) * std::conj(ibus(i)); }

    // full-length gradient rows of (P_i, Q_i) wrt all theta and vmag columns,
    // including the diagonal terms; rows are over ALL buses, caller scatters.
    void power_rows(std::size_t i, double* p_th, double* q_th, double* p_vm, double* q_vm) {
        kern::jrow(n, vr[i], vi[i], &yr[i * n], &yi[i * n], ctr.data(), cti.data(), p_th, q_th);
        kern::jrow(n, vr[i], vi[i], &yr[i * n], &yi[i * n], cvr.data(), cvi.data(), p_vm, q_vm);
        const std::complex<double> ci = std::conj(ibus(i));
        const std::complex<double> dth = std::complex<double>(0, 1) * v(i) * ci;
        const std::complex<double> dvm = (v(i) / vm[i]) * ci;
        p_th[i] += dth.real();
        q_th[i] += dth.imag();
        p_vm[i] += dvm.real();
        q_vm[i] += dvm.imag();
    }

    // mismatch Jacobian over non-slack P/Q rows and theta/vmag columns
    void assemble_jacobian(dense::Matrix& jac) {
        const std::size_t m = n - 1;
        jac = dense::Matrix(2 * m, 2 * m);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == slack) continue;
            power_rows(i, rp.data(), rq.data(), rp2.data(), rq2.data());
            double* prow = jac.row(pos[i]);
            double* qrow = jac.row(m + pos[i]);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == slack) continue;
                prow[pos[j]] = rp[j];
                prow[m + pos[j]] = rp2[j];
                qrow[pos[j]] = rq[j];
                qrow[m + pos[j]] = rq2[j];
            }
        }
    }

    // gradient of Re(S_i) wrt the state vector (theta block then vmag block)
    void p_gradient(std::size_t i, std::vector<double>& g) {
        const std::size_t m = n - 1;
        g.assign(2 * m, 0.0);
        power_rows(i, rp.data(), rq.data(), rp2.data(), rq2.data());
        for (std::size_t j = 0; j < n; ++j) {
            if (j == slack) continue;
            g[pos[j]] = rp[j];
            g[m + pos[j]] = rp2[j];
        }
    }
};

// per-branch 2x2 admittance with the from-side tap convention
struct BranchY {
    std::complex<double> yff, yft, ytf, ytt;
};

BranchY branch_admittance(const Branch& br) {
    const std::complex<double> y = 1.0 / std::complex<double>(br.r, br.x);
    const std::complex<double> bc(0.0, br.b_shunt / 2.0);
    BranchY b;
    b.yff = (y + bc) / (br.tap * br.tap);
    b.yft = -y / br.tap;
    b.ytf = -y / br.tap;
    b.ytt = y + bc;
    return b;
}

void branch_flows(const Network& net, Ctx& ctx, PowerFlowSolution& sol) {
    const double base = net.base_mva;
    const std::size_t nb = net.branches.size();
    sol.branch_p_from_mw.assign(nb, 0.0);
    sol.branch_p_to_mw.assign(nb, 0.0);
    double loss = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
        const Branch& br = net.branches[k];
        const std::size_t f = net.bus_index(br.from_bus);
        const std::size_t t = net.bus_index(br.to_bus);
        const BranchY by = branch_admittance(br);
        const std::complex<double> vf = ctx.v(f), vt = ctx.v(t);
        const double pf = (vf * std::conj(by.yff * vf + by.yft * vt)).real() * base;
        const double pt = (vt * std::conj(by.ytt * vt + by.ytf * vf)).real() * base;
        sol.branch_p_from_mw[k] = pf;
        sol.branch_p_to_mw[k] = pt;
        loss += pf + pt;
    }
    sol.total_loss_mw = loss;
}

// gradient of a branch's from-side (and optionally to-side) pu flow wrt the
// state vector; accumulates into g (sized 2(n-1))
void add_branch_flow_gradient(const Network& net, Ctx& ctx, std::size_t k, bool from_side,
                              double scale, std::vector<double>& g) {
    const Branch& br = net.branches[k];
    const std::size_t f = net.bus_index(br.from_bus);
    const std::size_t t = net.bus_index(br.to_bus);
    const BranchY by = branch_admittance(br);
    const std::size_t a = from_side ? f : t; // metering end
    const std::size_t b = from_side ? t : f;
    const std::complex<double> yaa = from_side ? by.yff : by.ytt;
    const std::complex<double> yab = from_side ? by.yft : by.ytf;
    const std::complex<double> va = ctx.v(a), vb = ctx.v(b);
    const std::complex<double> ibr = yaa * va + yab * vb;
    const std::complex<double> jj(0.0, 1.0);

    // d/dtheta_a, d/dtheta_b, d/dvm_a, d/dvm_b of Re(va conj(ibr))
    const double dth_a = (jj * va * std::conj(ibr) + va * std::conj(yaa * jj * va)).real();
    const double dth_b = (va * std::conj(yab * jj * vb)).real();
    const double dvm_a =
        ((va / ctx.vm[a]) * std::conj(ibr) + va * std::conj(yaa * va / ctx.vm[a])).real();
    const double dvm_b = (va * std::conj(yab * vb / ctx.vm[b])).real();

    const std::size_t m = ctx.n - 1;
    if (a != ctx.slack) {
        g[ctx.pos[a]] += scale * dth_a;
        g[m + ctx.pos[a]] += scale * dvm_a;
    }
    if (b != ctx.slack) {
        g[ctx.pos[b]] += scale * dth_b;
        g[m + ctx.pos[b]] += scale * dvm_b;
    }
}

dense::LuFactor factor_jacobian(Ctx& ctx, int iteration) {
    dense::Matrix jac;
    ctx.assemble_jacobian(jac);
    dense::LuFactor lu = dense::lu_factor(std::move(jac));
    if (lu.singular)
        throw PowerFlowError("singular system at iteration " + std::to_string(iteration));
    return lu;
}

void require_converged(const PowerFlowSolution& sol, const char* what) {
    if (!sol.converged) throw PowerFlowError(std::string(what) + ": solution not converged");
}

} // namespace

PowerFlowSolution solve_ac(const Network& net, const InjectionSet& inj) {
    const std::size_t n = net.n_buses();
    if (inj.p_mw.size() != n || inj.q_mvar.size() != n)
        throw std::invalid_argument("injection dimensions do not match bus count");

    Ctx ctx;
    ctx.init(net);
    const std::size_t slack = ctx.slack;
    const std::size_t m = n - 1;
    const double base = net.base_mva;

    PowerFlowSolution sol;
    sol.v_mag.assign(n, 1.0);
    sol.v_ang.assign(n, 0.0);

    if (n == 1) {
        sol.converged = true;
        ctx.set_state(sol.v_mag, sol.v_ang);
        branch_flows(net, ctx, sol);
        return sol;
    }

    std::vector<double> ps(n), qs(n); // specified injections, pu
    for (std::size_t i = 0; i < n; ++i) {
        ps[i] = inj.p_mw[i] / base;
        qs[i] = inj.q_mvar[i] / base;
    }

    std::vector<double> mis(2 * m);
    auto mismatch_norm = [&]() {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == slack) continue;
            const std::complex<double> s = ctx.s_calc(i);
            mis[ctx.pos[i]] = s.real() - ps[i];
            mis[m + ctx.pos[i]] = s.imag() - qs[i];
            worst = std::max(worst, std::fabs(mis[ctx.pos[i]]));
            worst = std::max(worst, std::fabs(mis[m + ctx.pos[i]]));
        }
        return worst;
    };

    ctx.set_state(sol.v_mag, sol.v_ang);
    double norm = mismatch_norm();
    std::vector<double> step(2 * m), ang0(n), mag0(n);
    for (int it = 0; it < kMaxIter; ++it) {
        if (norm < kTol) {
            sol.converged = true;
            break;
        }
        dense::LuFactor lu = factor_jacobian(ctx, it + 1);
        for (std::size_t i = 0; i < 2 * m; ++i) step[i] = -mis[i];
        lu.solve(step.data());
        // backtrack when a full step grows the mismatch (far-from-solution
        // starts at heavy transfer levels otherwise limit-cycle)
        ang0 = sol.v_ang;
        mag0 = sol.v_mag;
        double alpha = 1.0;
        for (int ls = 0;; ++ls) {
            for (std::size_t i = 0; i < n; ++i) {
                if (i == slack) continue;
                sol.v_ang[i] = ang0[i] + alpha * step[ctx.pos[i]];
                sol.v_mag[i] = mag0[i] + alpha * step[m + ctx.pos[i]];
                if (sol.v_mag[i] < 1e-4) sol.v_mag[i] = 1e-4; // keep V/|V| terms finite
            }
            ctx.set_state(sol.v_mag, sol.v_ang);
            const double trial = mismatch_norm();
            if (trial < norm || ls >= 8) {
                norm = trial;
                break;
            }
            alpha *= 0.5;
        }
        sol.iterations = it + 1;
    }
    if (!sol.converged) sol.converged = mismatch_norm() < kTol;

    branch_flows(net, ctx, sol);
    return sol;
}

std::vector<double> loss_sensitivities(const Network& net, const PowerFlowSolution& sol) {
    require_converged(sol, "loss_sensitivities");
    Ctx ctx;
    ctx.init(net);
    ctx.set_state(sol.v_mag, sol.v_ang);
    const std::size_t n = ctx.n, m = n - 1;

    std::vector<double> s(n, 0.0);
    if (n == 1) return s;

    dense::LuFactor lu = factor_jacobian(ctx, 0);
    std::vector<double> g;
    ctx.p_gradient(ctx.slack, g); // grad of slack P wrt state
    lu.solve_transposed(g.data());
    // dPslack/dPspec_j = g[pos_j]; 1 MW in at j leaves (1 + that) MW of loss change
    for (std::size_t j = 0; j < n; ++j)
        if (j != ctx.slack) s[j] = 1.0 + g[ctx.pos[j]];
    (void)m;
    return s;
}

dense::Matrix shift_factors(const Network& net, const PowerFlowSolution& sol) {
    require_converged(sol, "shift_factors");
    Ctx ctx;
    ctx.init(net);
    ctx.set_state(sol.v_mag, sol.v_ang);
    const std::size_t n = ctx.n;
    const std::size_t nb = net.branches.size();

    dense::Matrix sf(nb, n);
    if (n == 1) return sf;
    dense::LuFactor lu = factor_jacobian(ctx, 0);

    std::vector<double> g(2 * (n - 1));
    for (std::size_t k = 0; k < nb; ++k) {
        std::fill(g.begin(), g.end(), 0.0);
        add_branch_flow_gradient(net, ctx, k, true, 1.0, g);
        lu.solve_transposed(g.data());
        for (std::size_t j = 0; j < n; ++j)
            sf(k, j) = (j == ctx.slack) ? 0.0 : g[ctx.pos[j]];
    }
    return sf;
}

std::vector<double> branch_loss_slopes(const Network& net, const PowerFlowSolution& sol) {
    require_converged(sol, "branch_loss_slopes");
    Ctx ctx;
    ctx.init(net);
    ctx.set_state(sol.v_mag, sol.v_ang);
    const std::size_t n = ctx.n;
    const std::size_t nb = net.branches.size();

    std::vector<double> slopes(nb, 0.0);
    if (n == 1) return slopes;
    dense::LuFactor lu = factor_jacobian(ctx, 0);

    std::vector<double> gf(2 * (n - 1)), gl(2 * (n - 1)), dir(2 * (n - 1));
    for (std::size_t k = 0; k < nb; ++k) {
        const Branch& br = net.branches[k];
        std::size_t probe = net.bus_index(br.to_bus);
        if (probe == ctx.slack) probe = net.bus_index(br.from_bus);
        if (probe == ctx.slack) continue; // both ends slack: no usable direction

        // state response to a unit P injection at the probe bus
        std::fill(dir.begin(), dir.end(), 0.0);
        dir[ctx.pos[probe]] = 1.0;
        lu.solve(dir.data());

        std::fill(gf.begin(), gf.end(), 0.0);
        add_branch_flow_gradient(net, ctx, k, true, 1.0, gf);
        std::fill(gl.begin(), gl.end(), 0.0);
        add_branch_flow_gradient(net, ctx, k, true, 1.0, gl);
        add_branch_flow_gradient(net, ctx, k, false, 1.0, gl);

        const double df = kern::dot(gf.size(), gf.data(), dir.data());
        const double dl = kern::dot(gl.size(), gl.data(), dir.data());
        slopes[k] = (std::fabs(df) > 1e-9) ? dl / df : 0.0;
    }
    return slopes;
}

} // namespace lmpsim::pflow
