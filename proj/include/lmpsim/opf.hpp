#pragma once

#include "lmpsim/netmodel.hpp"
#include "lmpsim/pflow.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lmpsim::opf {

struct OpfError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// load cannot be met under the available capacity and branch limits
struct InfeasibleDispatch : OpfError {
    using OpfError::OpfError;
};

// the linearization loop hit its iteration cap while still oscillating
struct SlpDivergence : OpfError {
    using OpfError::OpfError;
};

// one timestep's dispatch inputs, all in MW at the network's generator /
// load ordering
struct DispatchProblem {
    const netmodel::Network* network = nullptr;
    std::vector<double> gen_available_mw; // per generator upper bound
    std::vector<double> gen_cost_gbp_mwh; // grid units carry the import price
    std::vector<double> load_mw;          // per load, already demand-scaled
};

struct BindingBranch {
    std::size_t branch = 0;             // index into network.branches
    int direction = +1;                 // +1 forward limit, -1 reverse limit
    double shadow_price_gbp_mwh = 0.0;
};

struct OpfSolution {
    std::vector<double> dispatch_mw;     // per generator
    std::vector<double> lmp_gbp_mwh;     // per bus
    std::vector<double> lmp_energy;      // per bus
    std::vector<double> lmp_loss;        // per bus
    std::vector<double> lmp_congestion;  // per bus
    std::vector<double> curtailed_mw;    // per generator, zero unless profile-driven
    std::vector<BindingBranch> binding_branches;
    double total_loss_mw = 0.0;          // from the final AC solve
    int sl_iterations = 0;
    bool converged = false;
};

// sequential linear programming around AC power-flow solutions: dispatch LP
// with tangent losses and anchored loop flows, re-linearized at each AC
// solve until the dispatch settles
OpfSolution solve_opf(const DispatchProblem& problem);

struct LmpComponentRow {
    std::size_t bus = 0;
    double energy = 0.0;
    double loss = 0.0;
    double congestion = 0.0;
    double total = 0.0;
};

// per-bus component table; total always equals energy + loss + congestion
std::vector<LmpComponentRow> decompose_lmp(const OpfSolution& solution);

} // namespace lmpsim::opf
