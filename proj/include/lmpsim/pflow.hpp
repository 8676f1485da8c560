#pragma once

#include "lmpsim/dense.hpp"
#include "lmpsim/netmodel.hpp"

#include <stdexcept>
#include <vector>

// Newton-Raphson AC power flow plus the operating-point sensitivities the
// dispatch linearization needs: loss penalty factors, branch shift factors,
// and per-branch loss slopes.

namespace lmpsim::pflow {

struct PowerFlowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InjectionSet {
    std::vector<double> p_mw;   // net injection per bus (generation - load)
    std::vector<double> q_mvar; // slack entries are free and ignored
};

struct PowerFlowSolution {
    std::vector<double> v_mag; // pu
    std::vector<double> v_ang; // rad, slack = 0
    std::vector<double> branch_p_from_mw; // MW into the branch at the from side
    std::vector<double> branch_p_to_mw;   // MW into the branch at the to side
    double total_loss_mw = 0.0;           // sum over branches of (p_from + p_to)
    int iterations = 0;
    bool converged = false;
};

// Flat start, tolerance 1e-8 pu on the mismatch infinity norm, at most 30
// iterations, all non-slack buses PQ. Non-convergence is reported in the
// solution, not thrown; a singular Jacobian throws PowerFlowError naming the
// iteration.
PowerFlowSolution solve_ac(const netmodel::Network& net, const InjectionSet& inj);

// s_i = dPloss/dP_i for a 1 MW injection increase at bus i with the slack
// absorbing the residual; slack entry 0 by convention. Transposed-Jacobian
// adjoint at the solved operating point. Throws on unconverged input.
std::vector<double> loss_sensitivities(const netmodel::Network& net,
                                       const PowerFlowSolution& sol);

// (k, i) = d(from-side flow of branch k)/d(injection at bus i), slack column
// 0. MW per MW. Throws on unconverged input.
dense::Matrix shift_factors(const netmodel::Network& net, const PowerFlowSolution& sol);

// dLoss_k/dFlow_k per branch at the operating point, measured along an
// injection perturbation at the branch's to-side bus (from-side when the
// to side is the slack). Feeds the dispatch LP's loss linearization.
std::vector<double> branch_loss_slopes(const netmodel::Network& net,
                                       const PowerFlowSolution& sol);

} // namespace lmpsim::pflow
