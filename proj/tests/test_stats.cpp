#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lmpsim/netmodel.hpp"
#include "lmpsim/runner.hpp"
#include "lmpsim/stats.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

using namespace lmpsim;

namespace {

// ids 1..n mapped onto the given voltage levels, all load-only except a
// slack at the front; just enough network for the level lookups
netmodel::Network level_net(const std::vector<int>& levels) {
    netmodel::Network net;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        netmodel::Bus b;
        b.id = int(i) + 1;
        b.name = "B" + std::to_string(b.id);
        b.voltage_level = levels[i];
        b.role = i == 0 ? netmodel::Role::slack : netmodel::Role::load_only;
        b.region_tag = "t";
        net.buses.push_back(b);
    }
    net.finalize();
    return net;
}

runner::ResultSet result_grid(const std::vector<int>& bus_ids,
                              const std::vector<double>& mip,
                              const std::vector<std::vector<double>>& lmp_rows) {
    runner::ResultSet rs;
    rs.scenario_label = "hand";
    rs.bus_ids = bus_ids;
    rs.mip_gbp_mwh = mip;
    rs.lmp = dense::Matrix(lmp_rows.size(), bus_ids.size());
    rs.dispatch = dense::Matrix(lmp_rows.size(), 0);
    rs.curtailed = dense::Matrix(lmp_rows.size(), 0);
    for (std::size_t t = 0; t < lmp_rows.size(); ++t)
        for (std::size_t j = 0; j < bus_ids.size(); ++j) rs.lmp(t, j) = lmp_rows[t][j];
    runner::SolverMeta ok;
    ok.converged = true;
    ok.iterations = 2;
    rs.meta.assign(lmp_rows.size(), ok);
    return rs;
}

void fail_step(runner::ResultSet& rs, std::size_t t) {
    rs.meta[t].converged = false;
    rs.meta[t].error = "infeasible dispatch";
    for (std::size_t j = 0; j < rs.lmp.cols; ++j)
        rs.lmp(t, j) = std::numeric_limits<double>::quiet_NaN();
}

} // namespace

TEST_CASE("cross-bus spread averages the per-step deviations") {
    // step one: prices 40/42 -> std 1; step two: 40/46 -> std 3; mean exactly 2
    const auto net = level_net({33, 33});
    const auto rs = result_grid({1, 2}, {40.0, 40.0}, {{40.0, 42.0}, {40.0, 46.0}});
    const auto rows = stats::level_summary(rs, net);

    REQUIRE(rows.size() == 1);
    CHECK(rows[0].voltage_level == 33);
    CHECK_FALSE(rows[0].single_bus);
    CHECK(rows[0].spatial_std == 2.0);
    CHECK(rows[0].mean_lmp == doctest::Approx(42.0).epsilon(1e-15));
    CHECK(rows[0].min_lmp == 40.0);
    CHECK(rows[0].max_lmp == 46.0);
    CHECK(rows[0].zero_pct == 0.0);
}

TEST_CASE("zero-price share counts only steps with a positive market price") {
    // 5 steps x 2 buses; the mip<=0 step is skipped, leaving 8 priced cells
    // of which 3 sit below the zero tolerance: exactly 37.5 percent
    const auto net = level_net({33, 33});
    const auto rs = result_grid({1, 2}, {40.0, 40.0, 40.0, 40.0, -1.0},
                                {{0.0, 10.0},
                                 {0.0, 10.0},
                                 {3e-7, 10.0},
                                 {10.0, 10.0},
                                 {0.0, 0.0}});
    const auto rows = stats::level_summary(rs, net);

    REQUIRE(rows.size() == 1);
    CHECK(rows[0].zero_pct == 37.5);
    // the skipped step still feeds the plain aggregates
    CHECK(rows[0].mean_lmp == doctest::Approx((50.0 + 3e-7) / 10.0).epsilon(1e-15));
    CHECK(rows[0].min_lmp == 0.0);
    CHECK(rows[0].max_lmp == 10.0);
}

TEST_CASE("levels report highest voltage first and flag single-bus groups") {
    const auto net = level_net({132, 33, 33, 11});
    const auto rs = result_grid({1, 2, 3, 4}, {40.0},
                                {{30.0, 31.0, 33.0, 35.0}});
    const auto rows = stats::level_summary(rs, net);

    REQUIRE(rows.size() == 3);
    CHECK(rows[0].voltage_level == 132);
    CHECK(rows[1].voltage_level == 33);
    CHECK(rows[2].voltage_level == 11);
    CHECK(rows[0].single_bus);
    CHECK(rows[0].spatial_std == 0.0);
    CHECK(rows[2].single_bus);
    CHECK_FALSE(rows[1].single_bus);
    CHECK(rows[1].spatial_std == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("summary statistics ignore bus column order") {
    const auto net = level_net({33, 33, 33});
    const auto a = result_grid({1, 2, 3}, {40.0, 40.0},
                               {{10.0, 20.0, 60.0}, {0.0, 5.0, 40.0}});
    const auto b = result_grid({3, 1, 2}, {40.0, 40.0},
                               {{60.0, 10.0, 20.0}, {40.0, 0.0, 5.0}});
    const auto ra = stats::level_summary(a, net);
    const auto rb = stats::level_summary(b, net);

    REQUIRE(ra.size() == rb.size());
    CHECK(ra[0].spatial_std == rb[0].spatial_std);
    CHECK(ra[0].mean_lmp == rb[0].mean_lmp);
    CHECK(ra[0].zero_pct == rb[0].zero_pct);
    CHECK(ra[0].min_lmp == rb[0].min_lmp);
    CHECK(ra[0].max_lmp == rb[0].max_lmp);
}

TEST_CASE("failed timesteps drop out of every aggregate") {
    const auto net = level_net({33, 33});
    auto rs = result_grid({1, 2}, {40.0, 40.0, 40.0},
                          {{10.0, 10.0}, {20.0, 20.0}, {0.0, 0.0}});
    fail_step(rs, 2);

    const auto rows = stats::level_summary(rs, net);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_lmp == 15.0);
    CHECK(rows[0].min_lmp == 10.0);
    CHECK(rows[0].zero_pct == 0.0);
    CHECK(stats::temporal_std(rs, 1) == 5.0); // population std of {10, 20}

    fail_step(rs, 0);
    fail_step(rs, 1);
    CHECK_THROWS_WITH_AS(stats::level_summary(rs, net),
                         doctest::Contains("no converged timesteps"), stats::StatsError);
}

TEST_CASE("per-bus volatility is the population deviation of its series") {
    const auto net = level_net({33});
    const auto rs = result_grid({1}, {40.0, 40.0, 40.0, 40.0},
                                {{1.0}, {2.0}, {3.0}, {4.0}});
    CHECK(stats::temporal_std(rs, 1) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK_THROWS_WITH_AS(stats::temporal_std(rs, 99), doctest::Contains("unknown bus 99"),
                         stats::StatsError);

    const auto one = result_grid({1}, {40.0}, {{1.0}});
    CHECK_THROWS_WITH_AS(stats::temporal_std(one, 1),
                         doctest::Contains("need at least 2 converged timesteps"),
                         stats::StatsError);
}

TEST_CASE("day extraction slices 48 half-hours in caller bus order") {
    std::vector<std::vector<double>> lmp_rows(96, std::vector<double>(2));
    for (std::size_t t = 0; t < 96; ++t) {
        lmp_rows[t][0] = double(t);
        lmp_rows[t][1] = 1000.0 + double(t);
    }
    const auto rs = result_grid({7, 9}, std::vector<double>(96, 40.0), lmp_rows);

    const auto day1 = stats::daily_slice(rs, {9, 7}, 1);
    REQUIRE(day1.rows == 2);
    REQUIRE(day1.cols == 48);
    CHECK(day1(0, 0) == 1048.0); // first requested bus, 00:00 of day 1
    CHECK(day1(1, 0) == 48.0);
    CHECK(day1(1, 47) == 95.0);

    CHECK_THROWS_WITH_AS(stats::daily_slice(rs, {7}, 2),
                         doctest::Contains("day 2 out of range for a 96-timestep run"),
                         stats::StatsError);
    CHECK_THROWS_WITH_AS(stats::daily_slice(rs, {8}, 0),
                         doctest::Contains("unknown bus 8"), stats::StatsError);
}

TEST_CASE("summary csv lists one row per level under a fixed header") {
    const auto net = level_net({132, 33, 33});
    const auto rs = result_grid({1, 2, 3}, {40.0}, {{30.0, 25.0, 26.0}});
    const auto csv = stats::summary_csv(stats::level_summary(rs, net));

    CHECK(csv.rfind("voltage_level,mean,spatial_std,min,max,zero_pct\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 3); // header plus two levels
    CHECK(csv.find("\n132,") != std::string::npos);
    CHECK(csv.find("\n33,") != std::string::npos);
}
