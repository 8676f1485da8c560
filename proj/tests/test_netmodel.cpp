#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lmpsim/netmodel.hpp"

#include <algorithm>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace lmpsim::netmodel;

namespace {

Bus mk_bus(int id, int kv, Role role) {
    Bus b;
    b.id = id;
    b.name = "B" + std::to_string(id);
    b.voltage_level = kv;
    b.role = role;
    b.region_tag = "t";
    return b;
}

Branch mk_branch(int f, int t, double r, double x, double b, double lim, double tap = 1.0,
                 bool is_tx = false) {
    Branch br;
    br.from_bus = f;
    br.to_bus = t;
    br.r = r;
    br.x = x;
    br.b_shunt = b;
    br.tap = tap;
    br.forward_limit_mw = lim;
    br.reverse_limit_mw = lim;
    br.is_transformer = is_tx;
    return br;
}

Network three_bus() {
    Network net;
    net.buses = {mk_bus(1, 132, Role::slack), mk_bus(2, 132, Role::load_only),
                 mk_bus(3, 33, Role::load_only)};
    net.branches = {mk_branch(1, 2, 0.01, 0.10, 0.2, 100.0),
                    mk_branch(2, 3, 0.005, 0.05, 0.0, 80.0, 0.95, true)};
    Generator g;
    g.bus = 1;
    g.p_min_mw = -500.0;
    g.p_max_mw = 500.0;
    g.fuel = Fuel::grid;
    g.grid_priced = true;
    Generator bio;
    bio.bus = 2;
    bio.p_max_mw = 10.0;
    bio.fuel = Fuel::biomass;
    net.generators = {g, bio};
    Load l;
    l.bus = 3;
    l.p_peak_mw = 50.0;
    net.loads = {l};
    net.finalize();
    return net;
}

bool has_violation(const ValidationReport& rep, const std::string& needle) {
    return std::any_of(rep.violations.begin(), rep.violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

} // namespace

TEST_CASE("bus lookup and slack resolution") {
    auto net = three_bus();
    CHECK(net.n_buses() == 3);
    CHECK(net.bus_index(1) == 0);
    CHECK(net.bus_index(3) == 2);
    CHECK(net.has_bus(2));
    CHECK_FALSE(net.has_bus(99));
    CHECK_THROWS_WITH_AS(net.bus_index(99), "unknown bus 99", NetworkError);
    CHECK(net.slack_index() == 0);

    net.buses[1].role = Role::slack;
    CHECK_THROWS_WITH_AS(net.slack_index(), "multiple slack buses", NetworkError);
    net.buses[0].role = Role::load_only;
    net.buses[1].role = Role::load_only;
    CHECK_THROWS_WITH_AS(net.slack_index(), "no slack bus", NetworkError);
}

TEST_CASE("admittance matrix follows the from-side tap convention") {
    auto net = three_bus();
    auto y = build_admittance(net);
    REQUIRE(y.n == 3);

    using cd = std::complex<double>;
    const cd ya = 1.0 / cd(0.01, 0.10);
    const cd yb = 1.0 / cd(0.005, 0.05);
    const cd jb2(0.0, 0.1); // half of branch A's 0.2 charging
    const double tap = 0.95;

    const cd want11 = ya + jb2;
    const cd want12 = -ya;
    const cd want22 = ya + jb2 + yb / (tap * tap);
    const cd want23 = -yb / tap;
    const cd want33 = yb;

    auto close = [](cd got, cd want) {
        return std::abs(got - want) < 1e-12 * std::max(1.0, std::abs(want));
    };
    CHECK(close(y.at(0, 0), want11));
    CHECK(close(y.at(0, 1), want12));
    CHECK(close(y.at(1, 0), want12));
    CHECK(close(y.at(1, 1), want22));
    CHECK(close(y.at(1, 2), want23));
    CHECK(close(y.at(2, 1), want23));
    CHECK(close(y.at(2, 2), want33));
    CHECK(std::abs(y.at(0, 2)) == 0.0);
    CHECK(std::abs(y.at(2, 0)) == 0.0);
}

TEST_CASE("admittance rejects zero impedance and disconnection") {
    auto net = three_bus();
    net.branches[0].r = 0.0;
    net.branches[0].x = 0.0;
    CHECK_THROWS_WITH_AS(build_admittance(net), "zero-impedance branch 1-2", NetworkError);

    auto net2 = three_bus();
    net2.branches.pop_back(); // bus 3 floats
    CHECK_FALSE(connected_from_slack(net2));
    CHECK_THROWS_WITH_AS(build_admittance(net2), "disconnected", NetworkError);
    CHECK(connected_from_slack(three_bus()));
}

TEST_CASE("validate accepts the hand network and reports specific faults") {
    CHECK(validate(three_bus()).pass);

    auto dup = three_bus();
    dup.buses.push_back(mk_bus(2, 33, Role::load_only));
    auto rep = validate(dup);
    CHECK_FALSE(rep.pass);
    CHECK(has_violation(rep, "duplicate bus id 2"));

    auto two_slack = three_bus();
    two_slack.buses[1].role = Role::slack;
    CHECK(has_violation(validate(two_slack), "slack count 2 != 1"));

    auto bad_branch = three_bus();
    bad_branch.branches[0].to_bus = 99;
    CHECK(has_violation(validate(bad_branch), "branch 0: unknown bus 99"));

    auto bad_level = three_bus();
    bad_level.buses[2].voltage_level = 66;
    CHECK(has_violation(validate(bad_level), "voltage_level 66 not in {400,132,33,11}"));

    auto bad_x = three_bus();
    bad_x.branches[1].x = 0.0;
    CHECK(has_violation(validate(bad_x), "branch 1: x = 0"));

    auto asym = three_bus();
    asym.branches[0].reverse_limit_mw = 50.0; // plain line, not a transformer
    CHECK(has_violation(validate(asym), "asymmetric limits on a non-transformer"));

    auto bad_pf = three_bus();
    bad_pf.loads[0].power_factor = 1.2;
    CHECK(has_violation(validate(bad_pf), "load 0: power_factor outside (0,1]"));

    auto bad_gen = three_bus();
    bad_gen.generators[0].grid_priced = false;
    CHECK(has_violation(validate(bad_gen), "generator 0: grid unit must be grid-priced"));

    auto unreachable = three_bus();
    unreachable.branches.pop_back();
    CHECK(has_violation(validate(unreachable), "bus 3 unreachable from slack"));
}

TEST_CASE("cycle basis sizes and closure") {
    // a radial network has no cycles
    CHECK(cycle_basis(three_bus()).empty());

    // add 1-3 to close a triangle: exactly one independent cycle, three edges
    auto net = three_bus();
    net.branches.push_back(mk_branch(1, 3, 0.02, 0.2, 0.0, 60.0));
    net.finalize();
    auto cycles = cycle_basis(net);
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0].size() == 3);

    // every cycle must come back to its starting bus: signed endpoints cancel
    std::vector<int> net_degree(4, 0); // per bus id 1..3
    for (const auto& e : cycles[0]) {
        const auto& br = net.branches[e.branch];
        net_degree[br.from_bus] += e.sign;
        net_degree[br.to_bus] -= e.sign;
    }
    for (int d : net_degree) CHECK(d == 0);
}

TEST_CASE("json round trip preserves every field") {
    auto net = three_bus();
    const std::string text = network_to_json(net);
    auto back = network_from_json(text);

    CHECK(back.base_mva == net.base_mva);
    REQUIRE(back.buses.size() == net.buses.size());
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        CHECK(back.buses[i].id == net.buses[i].id);
        CHECK(back.buses[i].name == net.buses[i].name);
        CHECK(back.buses[i].voltage_level == net.buses[i].voltage_level);
        CHECK(back.buses[i].role == net.buses[i].role);
        CHECK(back.buses[i].region_tag == net.buses[i].region_tag);
    }
    REQUIRE(back.branches.size() == net.branches.size());
    for (std::size_t i = 0; i < net.branches.size(); ++i) {
        CHECK(back.branches[i].from_bus == net.branches[i].from_bus);
        CHECK(back.branches[i].to_bus == net.branches[i].to_bus);
        CHECK(back.branches[i].r == net.branches[i].r);
        CHECK(back.branches[i].x == net.branches[i].x);
        CHECK(back.branches[i].b_shunt == net.branches[i].b_shunt);
        CHECK(back.branches[i].tap == net.branches[i].tap);
        CHECK(back.branches[i].forward_limit_mw == net.branches[i].forward_limit_mw);
        CHECK(back.branches[i].reverse_limit_mw == net.branches[i].reverse_limit_mw);
        CHECK(back.branches[i].is_transformer == net.branches[i].is_transformer);
    }
    REQUIRE(back.generators.size() == 2);
    CHECK(back.generators[0].p_min_mw == -500.0);
    CHECK(back.generators[0].grid_priced);
    CHECK(back.generators[0].fuel == Fuel::grid);
    CHECK(back.generators[1].fuel == Fuel::biomass);
    CHECK(back.generators[1].p_max_mw == 10.0);
    REQUIRE(back.loads.size() == 1);
    CHECK(back.loads[0].p_peak_mw == 50.0);
    CHECK(back.loads[0].power_factor == net.loads[0].power_factor);
    CHECK(back.bus_index(3) == 2); // lookups work without an extra finalize
}

TEST_CASE("json parsing is strict") {
    CHECK_THROWS_AS(network_from_json("["), NetworkError);
    CHECK_THROWS_AS(network_from_json("[1,2]"), NetworkError);

    auto text = network_to_json(three_bus());
    auto hacked = text;
    hacked.insert(hacked.find("\"base_mva\""), "\"surprise\": 1, ");
    CHECK_THROWS_WITH_AS(network_from_json(hacked), "top level: unknown key \"surprise\"",
                         NetworkError);

    CHECK_THROWS_AS(network_from_json("{\"base_mva\": 100.0}"), NetworkError);
}

TEST_CASE("network file io") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "lmpsim_netmodel_test";
    fs::create_directories(dir);
    const fs::path file = dir / "net.json";

    auto net = three_bus();
    save_network(net, file);
    auto back = load_network(file);
    CHECK(back.n_buses() == 3);
    CHECK(back.branches.size() == 2);

    CHECK_THROWS_AS(load_network(dir / "absent.json"), NetworkError);
    fs::remove_all(dir);
}
