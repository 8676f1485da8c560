#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

// Per-unit network data model: buses, branches/transformers, generators,
// loads, with validation, Y-bus construction, topology helpers, and the JSON
// file format used by the CLI.

namespace lmpsim::netmodel {

struct NetworkError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Role { slack, generator, load_only };
enum class Fuel { ocgt, ccgt, wind, pv, biomass, grid };

const char* to_string(Role r);
const char* to_string(Fuel f);

struct Bus {
    int id = 0;
    std::string name;
    int voltage_level = 0; // kV, one of 400/132/33/11
    Role role = Role::load_only;
    std::string region_tag;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;       // pu on system base
    double x = 0.0;       // pu
    double b_shunt = 0.0; // pu total line charging
    double tap = 1.0;     // ratio, 1.0 for lines
    double forward_limit_mw = 0.0; // flow from -> to
    double reverse_limit_mw = 0.0; // flow to -> from
    bool is_transformer = false;
};

struct Generator {
    int bus = 0;
    double p_min_mw = 0.0; // may be negative for grid boundary units
    double p_max_mw = 0.0;
    bool grid_priced = false;            // cost tracks the market index price
    double marginal_cost_gbp_mwh = 0.0;  // ignored when grid_priced
    Fuel fuel = Fuel::grid;
    bool profile_driven = false; // wind/pv: availability scales with capacity factor
};

struct Load {
    int bus = 0;
    double p_peak_mw = 0.0;
    double power_factor = 0.95; // in (0, 1]
};

struct Network {
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::vector<Load> loads;

    // index lookups (file order preserved); built lazily by finalize()
    std::size_t bus_index(int id) const;
    bool has_bus(int id) const { return index_.count(id) != 0; }
    std::size_t slack_index() const; // throws if absent/ambiguous
    std::size_t n_buses() const { return buses.size(); }

    // call after mutating buses to refresh the id map
    void finalize();

private:
    std::unordered_map<int, std::size_t> index_;
};

struct ValidationReport {
    bool pass = true;
    std::vector<std::string> violations;
};

ValidationReport validate(const Network& net);

struct ComplexNodalMatrix {
    std::size_t n = 0;
    std::vector<std::complex<double>> y; // row-major n x n

    std::complex<double>& at(std::size_t i, std::size_t j) { return y[i * n + j]; }
    const std::complex<double>& at(std::size_t i, std::size_t j) const { return y[i * n + j]; }
};

// Standard Y-bus with the from-side tap convention:
//   Yff += (y + jb/2)/tap^2, Yft = Ytf += -y/tap, Ytt += y + jb/2.
// Throws NetworkError on a zero-impedance branch or a disconnected graph.
ComplexNodalMatrix build_admittance(const Network& net);

// true when every bus is reachable from the slack over the branch set
bool connected_from_slack(const Network& net);

// One entry per independent cycle: the chord branch plus the tree path that
// closes it. sign = +1 when the cycle traverses the branch from->to.
struct CycleEdge {
    std::size_t branch = 0;
    int sign = 1;
};
std::vector<std::vector<CycleEdge>> cycle_basis(const Network& net);

// JSON file format (see README): top-level keys base_mva/buses/branches/
// generators/loads, snake_case field names exactly as the structs above,
// unknown keys rejected.
Network network_from_json(const std::string& text);
std::string network_to_json(const Network& net);
Network load_network(const std::filesystem::path& file);
void save_network(const Network& net, const std::filesystem::path& file);

} // namespace lmpsim::netmodel
