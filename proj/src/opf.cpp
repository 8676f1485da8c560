#include "lmpsim/opf.hpp"

#include "lmpsim/dense.hpp"
#include "lmpsim/lpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lmpsim::opf {

namespace {

constexpr double kConvergedMw = 0.01; // dispatch settle tolerance between passes
constexpr double kAcceptMw = 1.0;     // residual oscillation tolerated at the cap
constexpr int kMaxSlp = 40;
constexpr double kTieEps = 1e-8;      // deterministic cost tie-breaking per generator
constexpr double kBindTol = 1e-5;     // reduced cost below this is not a binding limit

struct Anchors {
    std::vector<double> f0; // from-side branch flow, MW
    std::vector<double> l0; // branch loss at the anchor, MW
    std::vector<double> lp; // loss slope d(loss)/d(flow), dimensionless
};

pflow::InjectionSet injections_at(const DispatchProblem& pr, const std::vector<double>& dispatch) {
    const auto& net = *pr.network;
    pflow::InjectionSet inj;
    inj.p_mw.assign(net.n_buses(), 0.0);
    inj.q_mvar.assign(net.n_buses(), 0.0);
    for (std::size_t g = 0; g < net.generators.size(); ++g)
        inj.p_mw[net.bus_index(net.generators[g].bus)] += dispatch[g];
    for (std::size_t l = 0; l < net.loads.size(); ++l) {
        const auto& ld = net.loads[l];
        const std::size_t b = net.bus_index(ld.bus);
        inj.p_mw[b] -= pr.load_mw[l];
        inj.q_mvar[b] -= pr.load_mw[l] * std::tan(std::acos(ld.power_factor));
    }
    return inj;
}

// dispatch LP: generator variables plus branch-flow variables. Bus balances
// carry the tangent loss of each branch (arrival = (1 - l')f - const), and
// one reactance-weighted row per independent loop anchors the loop split at
// the AC solution, which pins every flow once injections are chosen.
lp::LinearProgram build_lp(const DispatchProblem& pr,
                           const std::vector<std::vector<netmodel::CycleEdge>>& cycles,
                           const Anchors& an, const std::vector<double>* box_center,
                           double trust) {
    const auto& net = *pr.network;
    const std::size_t nb = net.n_buses();
    const std::size_t ng = net.generators.size();
    const std::size_t nk = net.branches.size();

    lp::LinearProgram p;
    for (std::size_t g = 0; g < ng; ++g) {
        double lo = net.generators[g].p_min_mw;
        double hi = pr.gen_available_mw[g];
        // trust box around the last operating point once the merit order has
        // started flip-flopping; the grid unit stays free so balance always
        // has somewhere to go
        if (box_center != nullptr && std::isfinite(trust) && !net.generators[g].grid_priced) {
            lo = std::max(lo, (*box_center)[g] - trust);
            hi = std::min(hi, (*box_center)[g] + trust);
        }
        p.add_var(pr.gen_cost_gbp_mwh[g] + kTieEps * static_cast<double>(g + 1), lo, hi);
    }
    for (std::size_t k = 0; k < nk; ++k)
        p.add_var(0.0, -net.branches[k].reverse_limit_mw, net.branches[k].forward_limit_mw);

    std::vector<double> rhs(nb, 0.0);
    for (std::size_t l = 0; l < net.loads.size(); ++l)
        rhs[net.bus_index(net.loads[l].bus)] += pr.load_mw[l];
    for (std::size_t k = 0; k < nk; ++k)
        rhs[net.bus_index(net.branches[k].to_bus)] += an.l0[k] - an.lp[k] * an.f0[k];
    for (std::size_t i = 0; i < nb; ++i) p.add_eq_row(rhs[i]);

    for (std::size_t g = 0; g < ng; ++g)
        p.set_eq(net.bus_index(net.generators[g].bus), g, 1.0);
    for (std::size_t k = 0; k < nk; ++k) {
        p.set_eq(net.bus_index(net.branches[k].from_bus), ng + k, -1.0);
        p.set_eq(net.bus_index(net.branches[k].to_bus), ng + k, 1.0 - an.lp[k]);
    }
    for (const auto& cyc : cycles) {
        double target = 0.0;
        for (const auto& e : cyc)
            target += e.sign * net.branches[e.branch].x * an.f0[e.branch];
        const std::size_t row = p.add_eq_row(target);
        for (const auto& e : cyc)
            p.set_eq(row, ng + e.branch, e.sign * net.branches[e.branch].x);
    }
    return p;
}

} // namespace

OpfSolution solve_opf(const DispatchProblem& pr) {
    if (pr.network == nullptr) throw std::invalid_argument("dispatch problem has no network");
    const auto& net = *pr.network;
    const std::size_t ng = net.generators.size();
    const std::size_t nb = net.n_buses();
    const std::size_t nk = net.branches.size();
    if (pr.gen_available_mw.size() != ng || pr.gen_cost_gbp_mwh.size() != ng ||
        pr.load_mw.size() != net.loads.size())
        throw std::invalid_argument("dispatch problem dimension mismatch");
    for (std::size_t g = 0; g < ng; ++g)
        if (pr.gen_available_mw[g] < net.generators[g].p_min_mw - 1e-9)
            throw InfeasibleDispatch("infeasible dispatch");

    double avail = 0.0, load = 0.0;
    for (double v : pr.gen_available_mw) avail += v;
    for (double v : pr.load_mw) load += v;
    if (avail < load) throw InfeasibleDispatch("infeasible dispatch");

    const auto cycles = netmodel::cycle_basis(net);
    Anchors an{std::vector<double>(nk, 0.0), std::vector<double>(nk, 0.0),
               std::vector<double>(nk, 0.0)};

    std::vector<double> lp_disp(ng, 0.0), prev_lp(ng, 0.0), prev_step(ng, 0.0);
    std::vector<double> anchor;
    double damping = 1.0;
    double trust = std::numeric_limits<double>::infinity();
    lp::LpSolution sol;
    bool converged = false;
    int it = 0;

    while (it < kMaxSlp) {
        ++it;
        sol = lp::solve(build_lp(pr, cycles, an, anchor.empty() ? nullptr : &anchor, trust));
        if (sol.status == lp::LpStatus::infeasible) throw InfeasibleDispatch("infeasible dispatch");
        if (sol.status != lp::LpStatus::optimal)
            throw OpfError("numerical-failure: dispatch program unbounded");

        lp_disp.assign(sol.x.begin(), sol.x.begin() + ng);
        double delta = 0.0;
        for (std::size_t g = 0; g < ng; ++g)
            delta = std::max(delta, std::fabs(lp_disp[g] - prev_lp[g]));

        if (it > 1 && delta < kConvergedMw) {
            converged = true;
            break;
        }
        if (it == kMaxSlp) {
            if (delta > kAcceptMw) throw SlpDivergence("SLP divergence");
            converged = true; // settled within the realistic band, usable answer
            break;
        }

        // damp the anchor and shrink the trust box when successive passes
        // push dispatch back and forth; a persistent flip means the merit
        // order is degenerate at this price and only an interior point where
        // the marginal-loss premia equalize can settle
        double flip = 0.0;
        for (std::size_t g = 0; g < ng; ++g) flip += prev_step[g] * (lp_disp[g] - prev_lp[g]);
        if (it > 2 && flip < 0.0 && delta > kConvergedMw) {
            damping = std::max(damping * 0.5, 1.0 / 16.0);
            trust = std::isfinite(trust) ? trust * 0.25 : delta * 0.25;
        }
        for (std::size_t g = 0; g < ng; ++g) prev_step[g] = lp_disp[g] - prev_lp[g];
        prev_lp = lp_disp;

        const std::vector<double> anchor_prev = anchor.empty() ? lp_disp : anchor;
        pflow::PowerFlowSolution ac;
        double d = anchor.empty() ? 1.0 : damping;
        for (int attempt = 0;; ++attempt) {
            anchor = anchor_prev;
            for (std::size_t g = 0; g < ng; ++g) anchor[g] += d * (lp_disp[g] - anchor_prev[g]);
            try {
                ac = pflow::solve_ac(net, injections_at(pr, anchor));
                if (!ac.converged)
                    throw pflow::PowerFlowError("power flow did not converge");
                break;
            } catch (const pflow::PowerFlowError&) {
                if (attempt >= 2) throw;
                d *= 0.25; // pull the operating point back toward the last good one
            }
        }

        an.f0 = ac.branch_p_from_mw;
        for (std::size_t k = 0; k < nk; ++k)
            an.l0[k] = ac.branch_p_from_mw[k] + ac.branch_p_to_mw[k];
        an.lp = pflow::branch_loss_slopes(net, ac);
    }

    // final AC at the reported dispatch for flows, losses, and shift factors
    const pflow::PowerFlowSolution fac = pflow::solve_ac(net, injections_at(pr, lp_disp));
    if (!fac.converged) throw pflow::PowerFlowError("power flow did not converge");

    OpfSolution out;
    out.dispatch_mw = lp_disp;
    out.sl_iterations = it;
    out.converged = converged;
    out.total_loss_mw = fac.total_loss_mw;

    out.curtailed_mw.assign(ng, 0.0);
    for (std::size_t g = 0; g < ng; ++g)
        if (net.generators[g].profile_driven)
            out.curtailed_mw[g] = std::max(0.0, pr.gen_available_mw[g] - lp_disp[g]);

    out.lmp_gbp_mwh.assign(sol.y_eq.begin(), sol.y_eq.begin() + nb);
    const double energy = sol.y_eq[net.slack_index()];
    out.lmp_energy.assign(nb, energy);

    for (std::size_t k = 0; k < nk; ++k) {
        const double z = sol.z_bounds[ng + k];
        if (std::fabs(z) <= kBindTol) continue;
        out.binding_branches.push_back({k, z < 0.0 ? +1 : -1, std::fabs(z)});
    }

    out.lmp_congestion.assign(nb, 0.0);
    if (!out.binding_branches.empty()) {
        const dense::Matrix sf = pflow::shift_factors(net, fac);
        for (const auto& bb : out.binding_branches) {
            const double z = (bb.direction > 0 ? -1.0 : 1.0) * bb.shadow_price_gbp_mwh;
            for (std::size_t i = 0; i < nb; ++i) out.lmp_congestion[i] += z * sf(bb.branch, i);
        }
    }

    out.lmp_loss.assign(nb, 0.0);
    for (std::size_t i = 0; i < nb; ++i)
        out.lmp_loss[i] = out.lmp_gbp_mwh[i] - energy - out.lmp_congestion[i];
    return out;
}

std::vector<LmpComponentRow> decompose_lmp(const OpfSolution& s) {
    std::vector<LmpComponentRow> rows(s.lmp_gbp_mwh.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].bus = i;
        rows[i].energy = s.lmp_energy[i];
        rows[i].loss = s.lmp_loss[i];
        rows[i].congestion = s.lmp_congestion[i];
        rows[i].total = s.lmp_energy[i] + s.lmp_loss[i] + s.lmp_congestion[i];
    }
    return rows;
}

} // namespace lmpsim::opf
