#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lmpsim/netmodel.hpp"
#include "lmpsim/runner.hpp"
#include "lmpsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace lmpsim;
namespace fs = std::filesystem;

namespace {

std::size_t bus_col(const runner::ResultSet& rs, int bus_id) {
    const auto it = std::find(rs.bus_ids.begin(), rs.bus_ids.end(), bus_id);
    REQUIRE(it != rs.bus_ids.end());
    return static_cast<std::size_t>(it - rs.bus_ids.begin());
}

// small two-bus network that turns infeasible once demand outgrows the
// transformer rating plus the local unit
netmodel::Network import_limited_net() {
    using namespace netmodel;
    Network net;
    Bus b1;
    b1.id = 1;
    b1.name = "gsp";
    b1.voltage_level = 132;
    b1.role = Role::slack;
    b1.region_tag = "t";
    Bus b2 = b1;
    b2.id = 2;
    b2.name = "town";
    b2.voltage_level = 33;
    b2.role = Role::load_only;
    net.buses = {b1, b2};

    Branch br;
    br.from_bus = 1;
    br.to_bus = 2;
    br.r = 0.005;
    br.x = 0.05;
    br.forward_limit_mw = 80.0;
    br.reverse_limit_mw = 80.0;
    br.is_transformer = true;
    net.branches = {br};

    Generator grid;
    grid.bus = 1;
    grid.p_min_mw = -500.0;
    grid.p_max_mw = 500.0;
    grid.fuel = Fuel::grid;
    grid.grid_priced = true;
    Generator bio;
    bio.bus = 2;
    bio.p_max_mw = 10.0;
    bio.fuel = Fuel::biomass;
    bio.marginal_cost_gbp_mwh = 20.0;
    net.generators = {grid, bio};

    Load l;
    l.bus = 2;
    l.p_peak_mw = 100.0;
    net.loads = {l};
    net.finalize();
    return net;
}

void write_profiles_3(const fs::path& file) {
    std::ofstream out(file);
    out << "timestamp,demand_factor,pv_cf,wind_cf,mip_gbp_mwh\n"
           "2025-06-01T10:00,0.5,0.0,0.0,40.0\n"
           "2025-06-01T10:30,1.0,0.0,0.0,40.0\n"
           "2025-06-01T11:00,0.5,0.0,0.0,40.0\n";
}

} // namespace

TEST_CASE("generator labels encode index, fuel and bus") {
    netmodel::Generator g;
    g.bus = 53;
    g.fuel = netmodel::Fuel::pv;
    CHECK(runner::gen_label(3, g) == "g3_pv_b53");
    g.bus = 1;
    g.fuel = netmodel::Fuel::grid;
    CHECK(runner::gen_label(0, g) == "g0_grid_b1");
}

TEST_CASE("boundary bus clears at the import price on a quiet step") {
    scenario::Scenario sc;
    sc.capacity_case = scenario::CapacityCase::current;
    sc.profile_seed = 1;
    sc.start = 20; // 10:00 on the first day
    sc.end = 21;
    sc.label = "one_step";
    const auto rs = runner::run(sc);

    REQUIRE(rs.n_timesteps() == 1);
    CHECK(rs.failures() == 0);
    CHECK(rs.meta[0].converged);
    CHECK(rs.scenario_label == "one_step");
    CHECK(rs.bus_ids.size() == 37);
    CHECK(rs.gen_labels.size() == 24);
    CHECK(rs.lmp.rows == 1);
    CHECK(rs.lmp.cols == 37);

    // with the boundary unit strictly inside its band, the slack-bus price
    // must track the market index exactly
    const auto j = bus_col(rs, scenario::kFixtureGridBus);
    CHECK(std::fabs(rs.lmp(0, j) - rs.mip_gbp_mwh[0]) < 1e-6);
}

TEST_CASE("worker pool output is identical for any worker count") {
    scenario::Scenario sc;
    sc.capacity_case = scenario::CapacityCase::current;
    sc.profile_seed = 1;
    sc.start = 9600; // a full mid-year day
    sc.end = 9648;
    sc.label = "day";
    const auto a = runner::run(sc, 1);
    const auto b = runner::run(sc, 2);

    REQUIRE(a.lmp.a.size() == b.lmp.a.size());
    CHECK(std::memcmp(a.lmp.a.data(), b.lmp.a.data(), a.lmp.a.size() * sizeof(double)) ==
          0);
    CHECK(std::memcmp(a.dispatch.a.data(), b.dispatch.a.data(),
                      a.dispatch.a.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(a.curtailed.a.data(), b.curtailed.a.data(),
                      a.curtailed.a.size() * sizeof(double)) == 0);
    CHECK(a.mip_gbp_mwh == b.mip_gbp_mwh);
    REQUIRE(a.meta.size() == b.meta.size());
    for (std::size_t t = 0; t < a.meta.size(); ++t) {
        CHECK(a.meta[t].converged == b.meta[t].converged);
        CHECK(a.meta[t].iterations == b.meta[t].iterations);
        CHECK(a.meta[t].error == b.meta[t].error);
    }
}

TEST_CASE("result directory round trips through save and load") {
    const fs::path dir = fs::temp_directory_path() / "lmpsim_runner_roundtrip";
    fs::remove_all(dir);
    fs::create_directories(dir);

    scenario::Scenario sc;
    sc.capacity_case = scenario::CapacityCase::current;
    sc.profile_seed = 1;
    sc.start = 9600;
    sc.end = 9648;
    sc.label = "day";
    const auto rs = runner::run(sc);

    const auto run_dir = runner::save_results(rs, dir);
    CHECK(run_dir == dir / "day");
    for (const char* name : {"lmp.csv", "dispatch.csv", "curtailed.csv", "meta.csv"})
        CHECK(fs::exists(run_dir / name));

    // one header plus one line per timestep
    std::ifstream in(run_dir / "lmp.csv");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 49);

    const auto back = runner::load_results(run_dir);
    CHECK(back.scenario_label == "day");
    CHECK(back.bus_ids == rs.bus_ids);
    CHECK(back.gen_labels == rs.gen_labels);
    REQUIRE(back.n_timesteps() == rs.n_timesteps());
    for (std::size_t t = 0; t < rs.n_timesteps(); ++t) {
        CHECK(std::fabs(back.mip_gbp_mwh[t] - rs.mip_gbp_mwh[t]) <=
              1e-9 * std::fabs(rs.mip_gbp_mwh[t]));
        CHECK(back.meta[t].converged == rs.meta[t].converged);
        CHECK(back.meta[t].iterations == rs.meta[t].iterations);
        for (std::size_t j = 0; j < rs.lmp.cols; ++j)
            CHECK(std::fabs(back.lmp(t, j) - rs.lmp(t, j)) <=
                  1e-9 * std::max(1.0, std::fabs(rs.lmp(t, j))));
        for (std::size_t j = 0; j < rs.dispatch.cols; ++j)
            CHECK(std::fabs(back.dispatch(t, j) - rs.dispatch(t, j)) <=
                  1e-9 * std::max(1.0, std::fabs(rs.dispatch(t, j))));
    }
    fs::remove_all(dir);
}

TEST_CASE("a timestep that cannot be served is recorded, not fatal") {
    const fs::path dir = fs::temp_directory_path() / "lmpsim_runner_fail";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const auto net = import_limited_net();
    REQUIRE(netmodel::validate(net).pass);
    netmodel::save_network(net, dir / "net.json");
    write_profiles_3(dir / "profiles.csv");

    scenario::Scenario sc;
    sc.network_file = (dir / "net.json").string();
    sc.profile_file = (dir / "profiles.csv").string();
    sc.start = 0;
    sc.end = 3;
    sc.label = "fail_mid";
    const auto rs = runner::run(sc); // must not throw

    REQUIRE(rs.n_timesteps() == 3);
    CHECK(rs.failures() == 1);
    CHECK(rs.meta[0].converged);
    CHECK(rs.meta[2].converged);
    CHECK_FALSE(rs.meta[1].converged);
    CHECK(rs.meta[1].error.find("infeasible") != std::string::npos);
    for (std::size_t j = 0; j < rs.lmp.cols; ++j) CHECK(std::isnan(rs.lmp(1, j)));
    for (std::size_t j = 0; j < rs.dispatch.cols; ++j) {
        CHECK(std::isnan(rs.dispatch(1, j)));
        CHECK(std::isnan(rs.curtailed(1, j)));
    }
    // good neighbours are untouched
    for (std::size_t j = 0; j < rs.lmp.cols; ++j) {
        CHECK(std::isfinite(rs.lmp(0, j)));
        CHECK(std::isfinite(rs.lmp(2, j)));
    }

    // the failure survives a save/load cycle
    const auto run_dir = runner::save_results(rs, dir);
    const auto back = runner::load_results(run_dir);
    CHECK(back.failures() == 1);
    CHECK(back.meta[1].error == rs.meta[1].error);
    CHECK(std::isnan(back.lmp(1, 0)));
    fs::remove_all(dir);
}

TEST_CASE("scenario and directory errors carry their cause") {
    SUBCASE("bad worker count") {
        scenario::Scenario sc;
        sc.start = 0;
        sc.end = 1;
        CHECK_THROWS_WITH_AS(runner::run(sc, 0),
                             doctest::Contains("worker count must be >= 1"),
                             runner::RunnerError);
    }
    SUBCASE("empty range") {
        scenario::Scenario sc;
        sc.start = 5;
        sc.end = 5;
        CHECK_THROWS_WITH_AS(runner::run(sc), doctest::Contains("empty timestep range"),
                             runner::RunnerError);
    }
    SUBCASE("range past the profile end") {
        scenario::Scenario sc;
        sc.start = 17519;
        sc.end = 17521;
        CHECK_THROWS_WITH_AS(runner::run(sc), doctest::Contains("timestep range ends at"),
                             runner::RunnerError);
    }
    SUBCASE("invalid network file") {
        const fs::path dir = fs::temp_directory_path() / "lmpsim_runner_badnet";
        fs::remove_all(dir);
        fs::create_directories(dir);
        auto net = import_limited_net();
        net.branches[0].x = 0.0; // breaks validation, not parsing
        netmodel::save_network(net, dir / "net.json");
        scenario::Scenario sc;
        sc.network_file = (dir / "net.json").string();
        sc.start = 0;
        sc.end = 1;
        CHECK_THROWS_WITH_AS(runner::run(sc), doctest::Contains("invalid network:"),
                             runner::RunnerError);
        fs::remove_all(dir);
    }
    SUBCASE("corrupted result directory") {
        const fs::path dir = fs::temp_directory_path() / "lmpsim_runner_corrupt";
        fs::remove_all(dir);
        fs::create_directories(dir / "day");
        auto write = [&](const char* name, const std::string& body) {
            std::ofstream out(dir / "day" / name);
            out << body;
        };
        write("lmp.csv", "t,1\n0,10\n");
        write("dispatch.csv", "t,g0_grid_b1\n0,10\n");
        write("curtailed.csv", "t,g0_ccgt_b9\n0,0\n"); // column name mismatch
        write("meta.csv", "t,mip_gbp_mwh,sl_iterations,converged,error\n0,40,2,1,\n");
        CHECK_THROWS_WITH_AS(runner::load_results(dir / "day"),
                             doctest::Contains("generator columns disagree"),
                             runner::RunnerError);

        write("curtailed.csv", "t,g0_grid_b1\n0,0\n0,0\n"); // one row too many
        CHECK_THROWS_WITH_AS(runner::load_results(dir / "day"),
                             doctest::Contains("row counts disagree"),
                             runner::RunnerError);

        write("curtailed.csv", "t,g0_grid_b1\n0,0\n");
        write("meta.csv", "step,mip,iters,conv,err\n");
        CHECK_THROWS_WITH_AS(runner::load_results(dir / "day"),
                             doctest::Contains("bad header in"), runner::RunnerError);
        fs::remove_all(dir);
    }
}

TEST_CASE("solver notes with commas and quotes survive the meta csv") {
    const fs::path dir = fs::temp_directory_path() / "lmpsim_runner_quote";
    fs::remove_all(dir);
    fs::create_directories(dir);

    runner::ResultSet rs;
    rs.scenario_label = "quoted";
    rs.bus_ids = {1};
    rs.gen_labels = {"g0_grid_b1"};
    rs.mip_gbp_mwh = {40.0};
    rs.lmp = dense::Matrix(1, 1);
    rs.dispatch = dense::Matrix(1, 1);
    rs.curtailed = dense::Matrix(1, 1);
    runner::SolverMeta sm;
    sm.error = "solver said \"no\", twice";
    rs.meta = {sm};

    const auto run_dir = runner::save_results(rs, dir);
    const auto back = runner::load_results(run_dir);
    REQUIRE(back.meta.size() == 1);
    CHECK(back.meta[0].error == sm.error);
    fs::remove_all(dir);
}
