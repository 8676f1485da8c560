#include "lmpsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace lmpsim::stats {

namespace {

constexpr double kZeroTol = 1e-6; // £/MWh below which a price counts as zero

std::vector<std::size_t> converged_steps(const runner::ResultSet& rs) {
    std::vector<std::size_t> ts;
    for (std::size_t t = 0; t < rs.n_timesteps(); ++t)
        if (rs.meta[t].converged) ts.push_back(t);
    return ts;
}

double population_std(const double* v, std::size_t n) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += v[i];
    mean /= double(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += (v[i] - mean) * (v[i] - mean);
    return std::sqrt(sq / double(n));
}

} // namespace

std::vector<VoltageLevelSummary> level_summary(const runner::ResultSet& rs,
                                               const netmodel::Network& net) {
    const auto ts = converged_steps(rs);
    if (ts.empty()) throw StatsError("no converged timesteps");

    // bus columns grouped by voltage level, highest first
    std::map<int, std::vector<std::size_t>, std::greater<int>> level_cols;
    for (std::size_t j = 0; j < rs.bus_ids.size(); ++j) {
        if (!net.has_bus(rs.bus_ids[j]))
            throw StatsError("unknown bus " + std::to_string(rs.bus_ids[j]));
        level_cols[net.buses[net.bus_index(rs.bus_ids[j])].voltage_level].push_back(j);
    }

    std::vector<VoltageLevelSummary> rows;
    std::vector<double> at_t;
    for (const auto& [kv, cols] : level_cols) {
        VoltageLevelSummary s;
        s.voltage_level = kv;
        s.single_bus = cols.size() == 1;
        s.min_lmp = 1e300;
        s.max_lmp = -1e300;

        double sum = 0.0, std_sum = 0.0;
        std::size_t cells = 0, zero_cells = 0, priced_cells = 0;
        for (std::size_t t : ts) {
            at_t.clear();
            for (std::size_t j : cols) {
                const double v = rs.lmp(t, j);
                at_t.push_back(v);
                sum += v;
                ++cells;
                s.min_lmp = std::min(s.min_lmp, v);
                s.max_lmp = std::max(s.max_lmp, v);
                if (rs.mip_gbp_mwh[t] > 0.0) {
                    ++priced_cells;
                    if (std::fabs(v) < kZeroTol) ++zero_cells;
                }
            }
            if (!s.single_bus) std_sum += population_std(at_t.data(), at_t.size());
        }
        s.mean_lmp = sum / double(cells);
        s.spatial_std = s.single_bus ? 0.0 : std_sum / double(ts.size());
        s.zero_pct =
            priced_cells ? 100.0 * double(zero_cells) / double(priced_cells) : 0.0;
        rows.push_back(s);
    }
    return rows;
}

double temporal_std(const runner::ResultSet& rs, int bus_id) {
    std::size_t col = rs.bus_ids.size();
    for (std::size_t j = 0; j < rs.bus_ids.size(); ++j)
        if (rs.bus_ids[j] == bus_id) {
            col = j;
            break;
        }
    if (col == rs.bus_ids.size())
        throw StatsError("unknown bus " + std::to_string(bus_id));

    const auto ts = converged_steps(rs);
    if (ts.size() < 2) throw StatsError("need at least 2 converged timesteps");
    std::vector<double> series;
    series.reserve(ts.size());
    for (std::size_t t : ts) series.push_back(rs.lmp(t, col));
    return population_std(series.data(), series.size());
}

dense::Matrix daily_slice(const runner::ResultSet& rs,
                          const std::vector<int>& bus_ids,
                          std::size_t day_index) {
    if ((day_index + 1) * 48 > rs.n_timesteps())
        throw StatsError("day " + std::to_string(day_index) + " out of range for a " +
                         std::to_string(rs.n_timesteps()) + "-timestep run");
    dense::Matrix out(bus_ids.size(), 48);
    for (std::size_t r = 0; r < bus_ids.size(); ++r) {
        std::size_t col = rs.bus_ids.size();
        for (std::size_t j = 0; j < rs.bus_ids.size(); ++j)
            if (rs.bus_ids[j] == bus_ids[r]) {
                col = j;
                break;
            }
        if (col == rs.bus_ids.size())
            throw StatsError("unknown bus " + std::to_string(bus_ids[r]));
        for (std::size_t h = 0; h < 48; ++h)
            out(r, h) = rs.lmp(day_index * 48 + h, col);
    }
    return out;
}

std::string summary_csv(const std::vector<VoltageLevelSummary>& rows) {
    std::string out = "voltage_level,mean,spatial_std,min,max,zero_pct\n";
    char buf[160];
    for (const auto& s : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      s.voltage_level, s.mean_lmp, s.spatial_std, s.min_lmp,
                      s.max_lmp, s.zero_pct);
        out += buf;
    }
    return out;
}

} // namespace lmpsim::stats
