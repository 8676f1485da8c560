#pragma once

#include "lmpsim/dense.hpp"
#include "lmpsim/netmodel.hpp"
#include "lmpsim/scenario.hpp"

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

// Scenario execution: one dispatch problem per half-hour, solved over a
// worker pool and merged in timestep order, so output is identical for any
// worker count. Results persist as a directory of CSV files.

namespace lmpsim::runner {

struct RunnerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// per-timestep solver outcome; error is empty when the solve succeeded
struct SolverMeta {
    int iterations = 0;
    bool converged = false;
    std::string error;
};

struct ResultSet {
    std::string scenario_label;
    std::vector<int> bus_ids;            // lmp column order
    std::vector<std::string> gen_labels; // dispatch / curtailed column order
    std::vector<double> mip_gbp_mwh;     // one per timestep
    dense::Matrix lmp;                   // timestep x bus, £/MWh
    dense::Matrix dispatch;              // timestep x generator, MW
    dense::Matrix curtailed;             // timestep x generator, MW
    std::vector<SolverMeta> meta;        // one per timestep

    std::size_t n_timesteps() const { return meta.size(); }
    std::size_t failures() const; // timesteps whose meta carries an error
};

// column label used in the generator matrices: g<idx>_<fuel>_b<bus>
std::string gen_label(std::size_t idx, const netmodel::Generator& g);

// Executes sc over `workers` threads. Failed timesteps get their error
// recorded in meta and NaN rows in the matrices; a stderr warning fires when
// more than 0.1% of timesteps fail.
ResultSet run(const scenario::Scenario& sc, int workers = 1);

// writes <out_dir>/<label>/{lmp,dispatch,curtailed,meta}.csv and returns the
// run directory
std::filesystem::path save_results(const ResultSet& rs,
                                   const std::filesystem::path& out_dir);

// reads back a directory produced by save_results
ResultSet load_results(const std::filesystem::path& run_dir);

} // namespace lmpsim::runner
