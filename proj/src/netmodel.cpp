#include "lmpsim/netmodel.hpp"

#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace lmpsim::netmodel {

const char* to_string(Role r) {
    switch (r) {
    case Role::slack: return "slack";
    case Role::generator: return "generator";
    case Role::load_only: return "load-only";
    }
    return "?";
}

const char* to_string(Fuel f) {
    switch (f) {
    case Fuel::ocgt: return "ocgt";
    case Fuel::ccgt: return "ccgt";
    case Fuel::wind: return "wind";
    case Fuel::pv: return "pv";
    case Fuel::biomass: return "biomass";
    case Fuel::grid: return "grid";
    }
    return "?";
}

void Network::finalize() {
    index_.clear();
    index_.reserve(buses.size());
    for (std::size_t i = 0; i < buses.size(); ++i) index_.emplace(buses[i].id, i);
}

std::size_t Network::bus_index(int id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw NetworkError("unknown bus " + std::to_string(id));
    return it->second;
}

std::size_t Network::slack_index() const {
    std::size_t found = buses.size();
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].role == Role::slack) {
            if (found != buses.size()) throw NetworkError("multiple slack buses");
            found = i;
        }
    }
    if (found == buses.size()) throw NetworkError("no slack bus");
    return found;
}

namespace {

// adjacency over bus indices; returns reach set from start
std::vector<bool> reachable(const Network& net, std::size_t start) {
    const std::size_t n = net.n_buses();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const Branch& br : net.branches) {
        if (!net.has_bus(br.from_bus) || !net.has_bus(br.to_bus)) continue;
        const std::size_t f = net.bus_index(br.from_bus);
        const std::size_t t = net.bus_index(br.to_bus);
        adj[f].push_back(t);
        adj[t].push_back(f);
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> q;
    seen[start] = true;
    q.push(start);
    while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop();
        for (std::size_t v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                q.push(v);
            }
    }
    return seen;
}

} // namespace

bool connected_from_slack(const Network& net) {
    if (net.buses.empty()) return false;
    std::size_t slack = net.buses.size();
    for (std::size_t i = 0; i < net.buses.size(); ++i)
        if (net.buses[i].role == Role::slack) {
            slack = i;
            break;
        }
    if (slack == net.buses.size()) return false;
    const auto seen = reachable(net, slack);
    for (bool s : seen)
        if (!s) return false;
    return true;
}

ValidationReport validate(const Network& net) {
    ValidationReport rep;
    auto fail = [&rep](const std::string& msg) {
        rep.pass = false;
        rep.violations.push_back(msg);
    };

    if (net.base_mva != 100.0) fail("base_mva " + std::to_string(net.base_mva) + " != 100");

    // bus ids unique, one slack, voltage levels from the fixed set
    std::set<int> ids;
    int slack_count = 0;
    static const std::set<int> levels{400, 132, 33, 11};
    for (const Bus& b : net.buses) {
        if (!ids.insert(b.id).second) fail("duplicate bus id " + std::to_string(b.id));
        if (b.role == Role::slack) ++slack_count;
        if (!levels.count(b.voltage_level))
            fail("bus " + std::to_string(b.id) + ": voltage_level " +
                 std::to_string(b.voltage_level) + " not in {400,132,33,11}");
    }
    if (slack_count != 1) fail("slack count " + std::to_string(slack_count) + " != 1");

    auto known = [&ids](int id) { return ids.count(id) != 0; };

    for (std::size_t i = 0; i < net.branches.size(); ++i) {
        const Branch& br = net.branches[i];
        const std::string tag = "branch " + std::to_string(i);
        if (!known(br.from_bus)) fail(tag + ": unknown bus " + std::to_string(br.from_bus));
        if (!known(br.to_bus)) fail(tag + ": unknown bus " + std::to_string(br.to_bus));
        if (br.x == 0.0) fail(tag + ": x = 0");
        if (br.r < 0.0) fail(tag + ": r < 0");
        if (!(br.forward_limit_mw > 0.0) || !(br.reverse_limit_mw > 0.0))
            fail(tag + ": limits must be > 0");
        if (br.forward_limit_mw != br.reverse_limit_mw && !br.is_transformer)
            fail(tag + ": asymmetric limits on a non-transformer");
        if (br.tap <= 0.0) fail(tag + ": tap <= 0");
    }

    double nongrid_pmax = 0.0;
    for (std::size_t i = 0; i < net.generators.size(); ++i) {
        const Generator& g = net.generators[i];
        const std::string tag = "generator " + std::to_string(i);
        if (!known(g.bus)) fail(tag + ": unknown bus " + std::to_string(g.bus));
        if (g.p_min_mw > g.p_max_mw) fail(tag + ": p_min > p_max");
        if (g.p_min_mw < 0.0 && g.fuel != Fuel::grid)
            fail(tag + ": negative p_min on non-grid unit");
        if ((g.fuel == Fuel::wind || g.fuel == Fuel::pv) && !g.profile_driven)
            fail(tag + ": wind/pv must be profile-driven");
        if (g.fuel == Fuel::grid && !g.grid_priced)
            fail(tag + ": grid unit must be grid-priced");
        if (g.fuel != Fuel::grid) nongrid_pmax += g.p_max_mw;
    }
    if (!net.generators.empty() && !(std::isfinite(nongrid_pmax) && nongrid_pmax > 0.0))
        fail("sum of non-grid p_max not positive/finite");

    double peak = 0.0;
    for (std::size_t i = 0; i < net.loads.size(); ++i) {
        const Load& l = net.loads[i];
        const std::string tag = "load " + std::to_string(i);
        if (!known(l.bus)) fail(tag + ": unknown bus " + std::to_string(l.bus));
        if (l.p_peak_mw < 0.0) fail(tag + ": p_peak < 0");
        if (!(l.power_factor > 0.0) || l.power_factor > 1.0)
            fail(tag + ": power_factor outside (0,1]");
        peak += l.p_peak_mw;
    }
    if (!net.loads.empty() && !(std::isfinite(peak) && peak > 0.0))
        fail("sum of p_peak not positive/finite");

    // connectivity, only meaningful once the structural checks hold
    if (slack_count == 1 && rep.pass) {
        std::size_t slack = 0;
        for (std::size_t i = 0; i < net.buses.size(); ++i)
            if (net.buses[i].role == Role::slack) slack = i;
        const auto seen = reachable(net, slack);
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (!seen[i])
                fail("bus " + std::to_string(net.buses[i].id) + " unreachable from slack");
    }

    return rep;
}

ComplexNodalMatrix build_admittance(const Network& net) {
    const std::size_t n = net.n_buses();
    if (!connected_from_slack(net)) throw NetworkError("disconnected");

    ComplexNodalMatrix m;
    m.n = n;
    m.y.assign(n * n, {0.0, 0.0});
    for (const Branch& br : net.branches) {
        if (br.r == 0.0 && br.x == 0.0)
            throw NetworkError("zero-impedance branch " + std::to_string(br.from_bus) + "-" +
                               std::to_string(br.to_bus));
        const std::size_t f = net.bus_index(br.from_bus);
        const std::size_t t = net.bus_index(br.to_bus);
        const std::complex<double> y = 1.0 / std::complex<double>(br.r, br.x);
        const std::complex<double> bc(0.0, br.b_shunt / 2.0);
        const double tap = br.tap;
        m.at(f, f) += (y + bc) / (tap * tap);
        m.at(f, t) += -y / tap;
        m.at(t, f) += -y / tap;
        m.at(t, t) += y + bc;
    }
    return m;
}

std::vector<std::vector<CycleEdge>> cycle_basis(const Network& net) {
    const std::size_t n = net.n_buses();
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n); // (neighbor, branch)
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        const Branch& br = net.branches[k];
        const std::size_t f = net.bus_index(br.from_bus);
        const std::size_t t = net.bus_index(br.to_bus);
        adj[f].emplace_back(t, k);
        adj[t].emplace_back(f, k);
    }

    const std::size_t root = net.slack_index();
    std::vector<int> depth(n, -1);
    std::vector<std::size_t> parent_bus(n, 0), parent_branch(n, 0);
    std::vector<bool> in_tree(net.branches.size(), false);
    std::queue<std::size_t> q;
    depth[root] = 0;
    q.push(root);
    while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop();
        for (auto [v, k] : adj[u]) {
            if (depth[v] < 0) {
                depth[v] = depth[u] + 1;
                parent_bus[v] = u;
                parent_branch[v] = k;
                in_tree[k] = true;
                q.push(v);
            }
        }
    }

    // orientation helper: +1 if walking branch k out of bus u goes from->to
    auto sign_from = [&net](std::size_t k, std::size_t u) {
        return net.bus_index(net.branches[k].from_bus) == u ? 1 : -1;
    };

    std::vector<std::vector<CycleEdge>> cycles;
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        if (in_tree[k]) continue;
        std::size_t a = net.bus_index(net.branches[k].from_bus);
        std::size_t b = net.bus_index(net.branches[k].to_bus);
        if (a == b) continue; // self-loop carries no cycle constraint
        // cycle runs along the chord from->to, then back up the tree to->from
        std::vector<CycleEdge> cyc;
        cyc.push_back({k, 1});
        std::vector<CycleEdge> up_a; // path a -> LCA, traversed upward
        std::size_t ua = a, ub = b;
        std::vector<CycleEdge> down_b; // path b -> LCA
        while (depth[ua] > depth[ub]) {
            up_a.push_back({parent_branch[ua], sign_from(parent_branch[ua], parent_bus[ua])});
            ua = parent_bus[ua];
        }
        while (depth[ub] > depth[ua]) {
            down_b.push_back({parent_branch[ub], sign_from(parent_branch[ub], ub)});
            ub = parent_bus[ub];
        }
        while (ua != ub) {
            up_a.push_back({parent_branch[ua], sign_from(parent_branch[ua], parent_bus[ua])});
            ua = parent_bus[ua];
            down_b.push_back({parent_branch[ub], sign_from(parent_branch[ub], ub)});
            ub = parent_bus[ub];
        }
        // walk b up to the LCA (same direction as the cycle), then LCA down to a;
        // up_a entries already carry the downward (parent->child) sign
        for (const CycleEdge& e : down_b) cyc.push_back(e);
        for (auto it = up_a.rbegin(); it != up_a.rend(); ++it) cyc.push_back(*it);
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

} // namespace lmpsim::netmodel
