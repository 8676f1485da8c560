#pragma once

#include "lmpsim/netmodel.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmpsim::scenario {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// half-hourly aligned input series; a full year is 17,520 entries
struct ProfileSet {
    std::vector<std::string> timestamps;
    std::vector<double> demand_factor; // peak-normalized, (0, 1]
    std::vector<double> pv_cf;         // [0, 1]
    std::vector<double> wind_cf;       // [0, 1]
    std::vector<double> mip_gbp_mwh;   // may be negative

    std::size_t size() const { return timestamps.size(); }
};

enum class CapacityCase { current, future };

const char* to_string(CapacityCase c);
CapacityCase capacity_case_from_string(const std::string& s); // throws ScenarioError

// installed MW per fuel and voltage level for one capacity case
struct CapacityTable {
    struct Cell {
        netmodel::Fuel fuel;
        int voltage_level; // kV
        double mw;
    };
    std::vector<Cell> cells;

    double at(netmodel::Fuel f, int kv) const;
    double fuel_total(netmodel::Fuel f) const;
    double total() const; // all non-grid capacity
};

CapacityTable capacity_table(CapacityCase c);

// one end-to-end run request; [start, end) indexes half-hours in the profile.
// Empty network_file means "build the fixture for capacity_case in memory";
// empty profile_file means "synthesize_year(profile_seed)".
struct Scenario {
    std::string network_file;
    std::string profile_file;
    CapacityCase capacity_case = CapacityCase::current;
    std::uint64_t profile_seed = 1;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string label;
};

// CSV with header `timestamp,demand_factor,pv_cf,wind_cf,mip_gbp_mwh`;
// errors carry the offending data row number
ProfileSet load_profiles(const std::filesystem::path& path);
void save_profiles(const ProfileSet& ps, const std::filesystem::path& path);

// deterministic synthetic year: seasonal + diurnal demand (max exactly 1),
// daylight-windowed pv, smooth autocorrelated wind, and a market price with
// peak-demand spikes above 90 and calm-night dips below 0 (dips only occur
// when pv and wind are both exactly zero, so nothing curtailable is online)
ProfileSet synthesize_year(std::uint64_t seed);

// compact multi-voltage study network whose installed capacity per fuel and
// level matches capacity_table(c); peak demand 300 MW at 400 kV, 1550 MW at
// 33 kV, 10.6 MW at 11 kV
netmodel::Network build_fixture(CapacityCase c);

// ids used by tests and docs to address fixture landmarks
constexpr int kFixtureGridBus = 1;        // slack / boundary price bus
constexpr int kFixtureDeepestBus = 65;    // end of the 11 kV feeder
constexpr int kFixturePocketHead = 50;    // 33 kV side of the limited transformer

} // namespace lmpsim::scenario
