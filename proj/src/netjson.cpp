#include "lmpsim/netmodel.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

// JSON reader/writer for the network file format. Strict: unknown keys are
// rejected so typos fail loudly instead of silently defaulting.

namespace lmpsim::netmodel {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void bail(const std::string& where, const std::string& what) {
    throw NetworkError(where + ": " + what);
}

void check_keys(const ordered_json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) bail(where, "unknown key \"" + it.key() + "\"");
    }
}

double num_field(const ordered_json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) bail(where, std::string("missing key \"") + key + "\"");
    if (!it->is_number()) bail(where, std::string("\"") + key + "\" must be a number");
    return it->get<double>();
}

double num_field_or(const ordered_json& obj, const std::string& where, const char* key,
                    double dflt) {
    auto it = obj.find(key);
    if (it == obj.end()) return dflt;
    if (!it->is_number()) bail(where, std::string("\"") + key + "\" must be a number");
    return it->get<double>();
}

int int_field(const ordered_json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) bail(where, std::string("missing key \"") + key + "\"");
    if (!it->is_number_integer()) bail(where, std::string("\"") + key + "\" must be an integer");
    return it->get<int>();
}

std::string str_field_or(const ordered_json& obj, const std::string& where, const char* key,
                         const std::string& dflt) {
    auto it = obj.find(key);
    if (it == obj.end()) return dflt;
    if (!it->is_string()) bail(where, std::string("\"") + key + "\" must be a string");
    return it->get<std::string>();
}

bool bool_field_or(const ordered_json& obj, const std::string& where, const char* key,
                   bool dflt) {
    auto it = obj.find(key);
    if (it == obj.end()) return dflt;
    if (!it->is_boolean()) bail(where, std::string("\"") + key + "\" must be a boolean");
    return it->get<bool>();
}

Role parse_role(const std::string& s, const std::string& where) {
    if (s == "slack") return Role::slack;
    if (s == "generator") return Role::generator;
    if (s == "load-only") return Role::load_only;
    bail(where, "role \"" + s + "\" not one of slack/generator/load-only");
}

Fuel parse_fuel(const std::string& s, const std::string& where) {
    if (s == "ocgt") return Fuel::ocgt;
    if (s == "ccgt") return Fuel::ccgt;
    if (s == "wind") return Fuel::wind;
    if (s == "pv") return Fuel::pv;
    if (s == "biomass") return Fuel::biomass;
    if (s == "grid") return Fuel::grid;
    bail(where, "fuel \"" + s + "\" not one of ocgt/ccgt/wind/pv/biomass/grid");
}

} // namespace

Network network_from_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw NetworkError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw NetworkError("top level must be an object");
    check_keys(doc, "top level", {"base_mva", "buses", "branches", "generators", "loads"});

    Network net;
    net.base_mva = num_field(doc, "top level", "base_mva");

    for (const char* key : {"buses", "branches", "generators", "loads"}) {
        auto it = doc.find(key);
        if (it == doc.end()) bail("top level", std::string("missing key \"") + key + "\"");
        if (!it->is_array()) bail("top level", std::string("\"") + key + "\" must be an array");
    }

    std::size_t i = 0;
    for (const auto& jb : doc["buses"]) {
        const std::string where = "bus " + std::to_string(i++);
        check_keys(jb, where, {"id", "name", "voltage_level", "role", "region_tag"});
        Bus b;
        b.id = int_field(jb, where, "id");
        b.name = str_field_or(jb, where, "name", "");
        b.voltage_level = int_field(jb, where, "voltage_level");
        auto role_it = jb.find("role");
        if (role_it == jb.end()) bail(where, "missing key \"role\"");
        if (!role_it->is_string()) bail(where, "\"role\" must be a string");
        b.role = parse_role(role_it->get<std::string>(), where);
        b.region_tag = str_field_or(jb, where, "region_tag", "");
        net.buses.push_back(std::move(b));
    }

    i = 0;
    for (const auto& jb : doc["branches"]) {
        const std::string where = "branch " + std::to_string(i++);
        check_keys(jb, where,
                   {"from_bus", "to_bus", "r", "x", "b_shunt", "tap", "forward_limit_mw",
                    "reverse_limit_mw", "is_transformer"});
        Branch br;
        br.from_bus = int_field(jb, where, "from_bus");
        br.to_bus = int_field(jb, where, "to_bus");
        br.r = num_field(jb, where, "r");
        br.x = num_field(jb, where, "x");
        br.b_shunt = num_field_or(jb, where, "b_shunt", 0.0);
        br.tap = num_field_or(jb, where, "tap", 1.0);
        br.forward_limit_mw = num_field(jb, where, "forward_limit_mw");
        br.reverse_limit_mw = num_field(jb, where, "reverse_limit_mw");
        br.is_transformer = bool_field_or(jb, where, "is_transformer", false);
        net.branches.push_back(br);
    }

    i = 0;
    for (const auto& jg : doc["generators"]) {
        const std::string where = "generator " + std::to_string(i++);
        check_keys(jg, where,
                   {"bus", "p_min_mw", "p_max_mw", "marginal_cost_gbp_mwh", "fuel",
                    "profile_driven"});
        Generator g;
        g.bus = int_field(jg, where, "bus");
        g.p_min_mw = num_field(jg, where, "p_min_mw");
        g.p_max_mw = num_field(jg, where, "p_max_mw");
        auto fit = jg.find("fuel");
        if (fit == jg.end()) bail(where, "missing key \"fuel\"");
        if (!fit->is_string()) bail(where, "\"fuel\" must be a string");
        g.fuel = parse_fuel(fit->get<std::string>(), where);
        auto cit = jg.find("marginal_cost_gbp_mwh");
        if (cit == jg.end()) bail(where, "missing key \"marginal_cost_gbp_mwh\"");
        if (cit->is_string()) {
            if (cit->get<std::string>() != "grid-priced")
                bail(where, "\"marginal_cost_gbp_mwh\" must be a number or \"grid-priced\"");
            g.grid_priced = true;
            g.marginal_cost_gbp_mwh = 0.0;
        } else if (cit->is_number()) {
            g.grid_priced = false;
            g.marginal_cost_gbp_mwh = cit->get<double>();
        } else {
            bail(where, "\"marginal_cost_gbp_mwh\" must be a number or \"grid-priced\"");
        }
        g.profile_driven = bool_field_or(jg, where, "profile_driven",
                                         g.fuel == Fuel::wind || g.fuel == Fuel::pv);
        net.generators.push_back(g);
    }

    i = 0;
    for (const auto& jl : doc["loads"]) {
        const std::string where = "load " + std::to_string(i++);
        check_keys(jl, where, {"bus", "p_peak_mw", "power_factor"});
        Load l;
        l.bus = int_field(jl, where, "bus");
        l.p_peak_mw = num_field(jl, where, "p_peak_mw");
        l.power_factor = num_field(jl, where, "power_factor");
        net.loads.push_back(l);
    }

    net.finalize();
    return net;
}

std::string network_to_json(const Network& net) {
    ordered_json doc;
    doc["base_mva"] = net.base_mva;
    doc["buses"] = ordered_json::array();
    for (const Bus& b : net.buses) {
        ordered_json j;
        j["id"] = b.id;
        j["name"] = b.name;
        j["voltage_level"] = b.voltage_level;
        j["role"] = to_string(b.role);
        j["region_tag"] = b.region_tag;
        doc["buses"].push_back(std::move(j));
    }
    doc["branches"] = ordered_json::array();
    for (const Branch& br : net.branches) {
        ordered_json j;
        j["from_bus"] = br.from_bus;
        j["to_bus"] = br.to_bus;
        j["r"] = br.r;
        j["x"] = br.x;
        j["b_shunt"] = br.b_shunt;
        j["tap"] = br.tap;
        j["forward_limit_mw"] = br.forward_limit_mw;
        j["reverse_limit_mw"] = br.reverse_limit_mw;
        j["is_transformer"] = br.is_transformer;
        doc["branches"].push_back(std::move(j));
    }
    doc["generators"] = ordered_json::array();
    for (const Generator& g : net.generators) {
        ordered_json j;
        j["bus"] = g.bus;
        j["p_min_mw"] = g.p_min_mw;
        j["p_max_mw"] = g.p_max_mw;
        if (g.grid_priced)
            j["marginal_cost_gbp_mwh"] = "grid-priced";
        else
            j["marginal_cost_gbp_mwh"] = g.marginal_cost_gbp_mwh;
        j["fuel"] = to_string(g.fuel);
        j["profile_driven"] = g.profile_driven;
        doc["generators"].push_back(std::move(j));
    }
    doc["loads"] = ordered_json::array();
    for (const Load& l : net.loads) {
        ordered_json j;
        j["bus"] = l.bus;
        j["p_peak_mw"] = l.p_peak_mw;
        j["power_factor"] = l.power_factor;
        doc["loads"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

Network load_network(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw NetworkError("cannot open " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return network_from_json(ss.str());
    } catch (const NetworkError& e) {
        throw NetworkError(file.string() + ": " + e.what());
    }
}

void save_network(const Network& net, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw NetworkError("cannot write " + file.string());
    out << network_to_json(net);
    if (!out) throw NetworkError("write failed: " + file.string());
}

} // namespace lmpsim::netmodel
