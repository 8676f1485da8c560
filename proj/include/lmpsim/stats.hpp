#pragma once

#include "lmpsim/dense.hpp"
#include "lmpsim/netmodel.hpp"
#include "lmpsim/runner.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Price statistics over a ResultSet: per-voltage-level summaries, per-bus
// temporal volatility, and day extraction for plotting. Failed timesteps are
// excluded everywhere.

namespace lmpsim::stats {

struct StatsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VoltageLevelSummary {
    int voltage_level = 0;    // kV
    double mean_lmp = 0.0;    // over all (bus, timestep) cells
    double spatial_std = 0.0; // mean over timesteps of the cross-bus population std
    double min_lmp = 0.0;
    double max_lmp = 0.0;
    double zero_pct = 0.0;    // % of cells with |lmp| < 1e-6, skipping mip <= 0 steps
    bool single_bus = false;  // spatial_std is trivially 0 at this level
};

// one row per voltage level present in the network, highest kV first
std::vector<VoltageLevelSummary> level_summary(const runner::ResultSet& rs,
                                               const netmodel::Network& net);

// population standard deviation of one bus's price series
double temporal_std(const runner::ResultSet& rs, int bus_id);

// rows follow bus_ids in call order; 48 half-hour columns of day day_index
dense::Matrix daily_slice(const runner::ResultSet& rs,
                          const std::vector<int>& bus_ids, std::size_t day_index);

// header `voltage_level,mean,spatial_std,min,max,zero_pct`
std::string summary_csv(const std::vector<VoltageLevelSummary>& rows);

} // namespace lmpsim::stats
