#include "lmpsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace lmpsim::scenario {

const char* to_string(CapacityCase c) {
    return c == CapacityCase::current ? "current" : "future";
}

CapacityCase capacity_case_from_string(const std::string& s) {
    if (s == "current") return CapacityCase::current;
    if (s == "future") return CapacityCase::future;
    throw ScenarioError("unknown capacity case \"" + s + "\"");
}

double CapacityTable::at(netmodel::Fuel f, int kv) const {
    double v = 0.0;
    for (const auto& c : cells)
        if (c.fuel == f && c.voltage_level == kv) v += c.mw;
    return v;
}

double CapacityTable::fuel_total(netmodel::Fuel f) const {
    double v = 0.0;
    for (const auto& c : cells)
        if (c.fuel == f) v += c.mw;
    return v;
}

double CapacityTable::total() const {
    double v = 0.0;
    for (const auto& c : cells)
        if (c.fuel != netmodel::Fuel::grid) v += c.mw;
    return v;
}

CapacityTable capacity_table(CapacityCase c) {
    using netmodel::Fuel;
    CapacityTable t;
    // gas split is shared by both cases
    t.cells.push_back({Fuel::ccgt, 400, 745.0});
    t.cells.push_back({Fuel::ocgt, 400, 300.0});
    if (c == CapacityCase::current) {
        t.cells.push_back({Fuel::wind, 132, 118.8});
        t.cells.push_back({Fuel::wind, 33, 145.2});
        t.cells.push_back({Fuel::pv, 132, 88.2});
        t.cells.push_back({Fuel::pv, 33, 891.8});
        t.cells.push_back({Fuel::biomass, 132, 109.74});
        t.cells.push_back({Fuel::biomass, 33, 244.26});
    } else {
        // 33 and 11 kV shares are given for the enlarged case; the remainder
        // stays at 132 kV, mirroring the current-case split
        t.cells.push_back({Fuel::wind, 132, 116.564});
        t.cells.push_back({Fuel::wind, 33, 242.54});
        t.cells.push_back({Fuel::wind, 11, 2.896});
        t.cells.push_back({Fuel::pv, 132, 84.853});
        t.cells.push_back({Fuel::pv, 33, 1504.94});
        t.cells.push_back({Fuel::pv, 11, 11.207});
        t.cells.push_back({Fuel::biomass, 132, 106.358});
        t.cells.push_back({Fuel::biomass, 33, 387.66});
        t.cells.push_back({Fuel::biomass, 11, 2.982});
    }
    return t;
}

// ---------------------------------------------------------------- fixture

namespace {

struct GenSpec {
    int bus;
    netmodel::Fuel fuel;
    double current_mw; // <= 0 means absent in the current case
    double future_mw;
};

netmodel::Generator make_gen(int bus, netmodel::Fuel fuel, double p_max) {
    netmodel::Generator g;
    g.bus = bus;
    g.p_min_mw = 0.0;
    g.p_max_mw = p_max;
    g.fuel = fuel;
    switch (fuel) {
    case netmodel::Fuel::ocgt: g.marginal_cost_gbp_mwh = 150.0; break;
    case netmodel::Fuel::ccgt: g.marginal_cost_gbp_mwh = 50.0; break;
    default: g.marginal_cost_gbp_mwh = 0.0; break; // short-run cost of renewables
    }
    g.profile_driven = (fuel == netmodel::Fuel::wind || fuel == netmodel::Fuel::pv);
    return g;
}

} // namespace

netmodel::Network build_fixture(CapacityCase c) {
    using netmodel::Fuel;
    using netmodel::Role;
    netmodel::Network net;
    net.base_mva = 100.0;

    auto bus = [&](int id, const char* name, int kv, Role role, const char* region) {
        netmodel::Bus b;
        b.id = id;
        b.name = name;
        b.voltage_level = kv;
        b.role = role;
        b.region_tag = region;
        net.buses.push_back(b);
    };

    // 400 kV boundary and spine
    bus(1, "GRID1", 400, Role::slack, "grid");
    bus(2, "GRID2", 400, Role::load_only, "grid");
    bus(3, "SPINE3", 400, Role::generator, "spine");
    bus(4, "SPINE4", 400, Role::generator, "spine");
    // 132 kV ring between the two supply points, plus one spur
    bus(10, "RING10", 132, Role::load_only, "ring");
    bus(11, "RING11", 132, Role::load_only, "ring");
    bus(12, "RING12", 132, Role::generator, "ring");
    bus(13, "RING13", 132, Role::generator, "ring");
    bus(14, "RING14", 132, Role::generator, "ring");
    bus(15, "RING15", 132, Role::generator, "ring");
    bus(16, "SPUR16", 132, Role::generator, "spur");
    // 33 kV groups behind 132/33 transformers
    bus(20, "S2-20", 33, Role::generator, "s2");
    bus(21, "S2-21", 33, Role::generator, "s2");
    bus(22, "S2-22", 33, Role::generator, "s2");
    bus(23, "S2-23", 33, Role::generator, "s2");
    bus(30, "S3-30", 33, Role::generator, "s3");
    bus(31, "S3-31", 33, Role::generator, "s3");
    bus(32, "S3-32", 33, Role::generator, "s3");
    bus(33, "S3-33", 33, Role::generator, "s3");
    bus(40, "S4-40", 33, Role::generator, "s4");
    bus(41, "S4-41", 33, Role::generator, "s4");
    bus(42, "S4-42", 33, Role::generator, "s4");
    bus(43, "S4-43", 33, Role::generator, "s4");
    // export-limited 33 kV pocket
    bus(50, "PKT50", 33, Role::generator, "pocket");
    bus(51, "PKT51", 33, Role::generator, "pocket");
    bus(52, "PKT52", 33, Role::load_only, "pocket");
    bus(53, "PKT53", 33, Role::generator, "pocket");
    bus(54, "PKT54", 33, Role::load_only, "pocket");
    bus(55, "PKT55", 33, Role::generator, "pocket");
    // 11 kV feeder hanging off the pocket
    bus(60, "FDR60", 11, Role::load_only, "feeder");
    bus(61, "FDR61", 11, Role::load_only, "feeder");
    bus(62, "FDR62", 11, Role::load_only, "feeder");
    bus(63, "FDR63", 11, Role::load_only, "feeder");
    bus(64, "FDR64", 11, Role::load_only, "feeder");
    bus(65, "FDR65", 11, Role::load_only, "feeder");
    bus(66, "FDR66", 11, Role::load_only, "feeder");
    bus(67, "FDR67", 11, Role::load_only, "feeder");

    auto line = [&](int f, int t, double r, double x, double b, double fwd, double rev) {
        netmodel::Branch br;
        br.from_bus = f;
        br.to_bus = t;
        br.r = r;
        br.x = x;
        br.b_shunt = b;
        br.forward_limit_mw = fwd;
        br.reverse_limit_mw = rev;
        net.branches.push_back(br);
    };
    auto tx = [&](int f, int t, double r, double x, double fwd, double rev) {
        netmodel::Branch br;
        br.from_bus = f;
        br.to_bus = t;
        br.r = r;
        br.x = x;
        br.forward_limit_mw = fwd;
        br.reverse_limit_mw = rev;
        br.is_transformer = true;
        net.branches.push_back(br);
    };

    line(1, 4, 0.0004, 0.0045, 0.2, 2500, 2500);
    line(4, 3, 0.0004, 0.0042, 0.2, 2500, 2500);
    line(3, 2, 0.0003, 0.0035, 0.2, 2500, 2500);
    tx(4, 10, 0.0006, 0.008, 1200, 1200);
    tx(3, 11, 0.0006, 0.008, 1200, 1200);
    line(10, 12, 0.0020, 0.013, 0.10, 800, 800);
    line(12, 13, 0.0024, 0.015, 0.10, 800, 800);
    line(13, 11, 0.0020, 0.013, 0.10, 800, 800);
    line(10, 14, 0.0022, 0.014, 0.10, 800, 800);
    line(14, 15, 0.0024, 0.015, 0.10, 800, 800);
    line(15, 11, 0.0021, 0.013, 0.10, 800, 800);
    line(14, 16, 0.0028, 0.016, 0.06, 400, 400);
    tx(12, 20, 0.0020, 0.015, 900, 700);
    tx(13, 30, 0.0020, 0.015, 900, 700);
    tx(15, 40, 0.0020, 0.015, 900, 700);
    // the constrained boundary: reverse capacity sized so the enlarged
    // pocket (542.085 MW of DG against a 260.6 MW peak load) saturates the
    // export path on the strongest solar half-hours once line losses inside
    // the pocket are paid, triggering non-firm curtailment
    tx(14, 50, 0.0025, 0.020, 600, 360);
    line(20, 21, 0.004, 0.005, 0.04, 450, 450);
    line(21, 22, 0.006, 0.0075, 0.04, 450, 450);
    line(20, 23, 0.005, 0.006, 0.04, 450, 450);
    line(30, 31, 0.004, 0.005, 0.04, 450, 450);
    line(31, 32, 0.006, 0.0075, 0.04, 450, 450);
    line(30, 33, 0.005, 0.006, 0.04, 450, 450);
    line(40, 41, 0.004, 0.005, 0.04, 450, 450);
    line(41, 42, 0.006, 0.0075, 0.04, 450, 450);
    line(40, 43, 0.005, 0.006, 0.04, 450, 450);
    line(50, 51, 0.005, 0.006, 0.03, 600, 600);
    line(51, 52, 0.007, 0.0085, 0.03, 600, 600);
    line(51, 53, 0.006, 0.0075, 0.03, 600, 600);
    line(53, 54, 0.009, 0.011, 0.03, 600, 600);
    line(52, 55, 0.008, 0.010, 0.03, 600, 600);
    // feeder boundary: reverse capacity below the feeder's possible DG
    // surplus (~13.5 MW on bright days), so enlarged-case rooftop output is
    // curtailed locally on strong solar half-hours; never binds at night
    tx(52, 60, 0.040, 0.35, 30, 6);
    line(60, 61, 0.12, 0.060, 0.0, 15, 15);
    line(61, 62, 0.10, 0.050, 0.0, 15, 15);
    line(62, 63, 0.08, 0.040, 0.0, 15, 15);
    line(63, 64, 0.06, 0.030, 0.0, 15, 15);
    line(64, 65, 0.05, 0.025, 0.0, 15, 15);
    line(62, 66, 0.09, 0.045, 0.0, 15, 15);
    line(66, 67, 0.07, 0.035, 0.0, 15, 15);

    // grid boundary unit: slack-bus import/export priced at the market index
    {
        netmodel::Generator g;
        g.bus = kFixtureGridBus;
        g.p_min_mw = -3000.0;
        g.p_max_mw = 3000.0;
        g.grid_priced = true;
        g.fuel = Fuel::grid;
        net.generators.push_back(g);
    }
    net.generators.push_back(make_gen(3, Fuel::ccgt, 745.0));
    net.generators.push_back(make_gen(4, Fuel::ocgt, 300.0));

    const bool fut = (c == CapacityCase::future);
    // DG placement; per fuel x level sums reproduce capacity_table(c).
    // Pocket 33 kV PV comes last so cost tie-breaking sheds it first.
    const GenSpec dg[] = {
        {12, Fuel::wind, 59.4, 58.282},  {15, Fuel::wind, 59.4, 58.282},
        {13, Fuel::pv, 88.2, 84.853},    {14, Fuel::biomass, 54.87, 53.179},
        {16, Fuel::biomass, 54.87, 53.179},
        {20, Fuel::biomass, 70.0, 110.0}, {21, Fuel::wind, 40.0, 70.0},
        {22, Fuel::pv, 240.0, 400.0},    {23, Fuel::pv, 30.0, 100.0},
        {30, Fuel::biomass, 64.26, 107.66}, {31, Fuel::pv, 150.0, 300.0},
        {32, Fuel::pv, 81.8, 84.94},     {33, Fuel::wind, 40.2, 63.54},
        {40, Fuel::biomass, 70.0, 110.0}, {41, Fuel::pv, 110.0, 120.0},
        {42, Fuel::pv, 60.0, 80.0},      {43, Fuel::wind, 40.0, 64.0},
        {50, Fuel::biomass, 40.0, 60.0}, {51, Fuel::wind, 25.0, 45.0},
        {61, Fuel::biomass, -1.0, 2.982}, {63, Fuel::pv, -1.0, 6.0},
        {64, Fuel::wind, -1.0, 2.896},   {66, Fuel::pv, -1.0, 5.207},
        {53, Fuel::pv, 120.0, 230.0},    {55, Fuel::pv, 100.0, 190.0},
    };
    for (const auto& s : dg) {
        const double mw = fut ? s.future_mw : s.current_mw;
        if (mw > 0.0) net.generators.push_back(make_gen(s.bus, s.fuel, mw));
    }

    auto load = [&](int b, double p) {
        netmodel::Load ld;
        ld.bus = b;
        ld.p_peak_mw = p;
        ld.power_factor = 0.98;
        net.loads.push_back(ld);
    };
    load(3, 150.0);
    load(4, 150.0);
    load(20, 150.0);
    load(21, 150.0);
    load(22, 90.0);
    load(23, 50.0);
    load(30, 150.0);
    load(31, 140.0);
    load(32, 90.0);
    load(33, 50.0);
    load(40, 150.0);
    load(41, 130.0);
    load(42, 100.0);
    load(43, 50.0);
    load(50, 60.0);
    load(51, 50.0);
    load(52, 45.0);
    load(53, 40.0);
    load(54, 35.0);
    load(55, 20.0);
    load(60, 1.8);
    load(61, 1.6);
    load(62, 1.5);
    load(63, 1.4);
    load(64, 1.3);
    load(65, 1.2);
    load(66, 1.0);
    load(67, 0.8);

    net.finalize();
    return net;
}

// ---------------------------------------------------------------- profiles

namespace {

const char* kHeader = "timestamp,demand_factor,pv_cf,wind_cf,mip_gbp_mwh";

double parse_num(const std::string& cell, std::size_t row, const char* col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ScenarioError("row " + std::to_string(row) + ": non-numeric " + col + " \"" +
                            cell + "\"");
    }
}

} // namespace

ProfileSet load_profiles(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open profile file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ScenarioError("empty profile file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw ScenarioError("bad profile header, expected \"" + std::string(kHeader) + "\"");

    ProfileSet ps;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (cells.size() != 5)
            throw ScenarioError("row " + std::to_string(row) + ": expected 5 columns, got " +
                                std::to_string(cells.size()));
        const double df = parse_num(cells[1], row, "demand_factor");
        const double pv = parse_num(cells[2], row, "pv_cf");
        const double wf = parse_num(cells[3], row, "wind_cf");
        const double mip = parse_num(cells[4], row, "mip_gbp_mwh");
        if (df <= 0.0 || df > 1.0)
            throw ScenarioError("row " + std::to_string(row) + ": demand_factor out of range");
        if (pv < 0.0 || pv > 1.0)
            throw ScenarioError("row " + std::to_string(row) + ": pv_cf out of range");
        if (wf < 0.0 || wf > 1.0)
            throw ScenarioError("row " + std::to_string(row) + ": wind_cf out of range");
        if (!ps.timestamps.empty() && cells[0] <= ps.timestamps.back())
            throw ScenarioError("row " + std::to_string(row) + ": timestamp not increasing");
        ps.timestamps.push_back(cells[0]);
        ps.demand_factor.push_back(df);
        ps.pv_cf.push_back(pv);
        ps.wind_cf.push_back(wf);
        ps.mip_gbp_mwh.push_back(mip);
    }
    if (ps.size() == 0) throw ScenarioError("profile file has no data rows");
    return ps;
}

void save_profiles(const ProfileSet& ps, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write profile file " + path.string());
    out << kHeader << "\n";
    char buf[128];
    for (std::size_t t = 0; t < ps.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.2f", ps.timestamps[t].c_str(),
                      ps.demand_factor[t], ps.pv_cf[t], ps.wind_cf[t], ps.mip_gbp_mwh[t]);
        out << buf << "\n";
    }
    if (!out.good()) throw ScenarioError("short write to " + path.string());
}

namespace {

// deterministic standard normals: hand-rolled Box-Muller on a fixed-order
// mt19937_64 stream, so the series never depends on library internals
struct NormalStream {
    std::mt19937_64 rng;
    bool have_spare = false;
    double spare = 0.0;

    explicit NormalStream(std::uint64_t seed) : rng(seed) {}

    double uniform() {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare = r * std::sin(2.0 * std::numbers::pi * u2);
        have_spare = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }
};

std::string stamp(int day, int half_hour) {
    static const int days_in_month[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int month = 0, dom = day;
    while (dom >= days_in_month[month]) {
        dom -= days_in_month[month];
        ++month;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "2015-%02d-%02dT%02d:%02d", month + 1, dom + 1, half_hour / 2,
                  (half_hour % 2) * 30);
    return buf;
}

} // namespace

ProfileSet synthesize_year(std::uint64_t seed) {
    constexpr int kDays = 365;
    constexpr int kSteps = kDays * 48;
    constexpr double kPi = std::numbers::pi;
    NormalStream ns(seed);

    // day-scale weather first, then the per-timestep streams, in fixed order
    std::vector<double> wind_slow(kDays), pv_quality(kDays);
    double wq = 0.0, pq = 0.0;
    for (int d = 0; d < kDays; ++d) {
        wq = 0.82 * wq + 0.57 * ns.normal();
        wind_slow[d] = wq;
        pq = 0.55 * pq + 0.83 * ns.normal();
        pv_quality[d] = 0.30 + 0.70 / (1.0 + std::exp(-1.2 * pq));
    }

    std::vector<double> df_raw(kSteps), pv(kSteps), wind(kSteps), mn_s(kSteps);
    double wf = 0.0, dn = 0.0, mn = 0.0;
    std::vector<double> spike_u(kSteps), dip_u(kSteps);
    for (int t = 0; t < kSteps; ++t) {
        const int d = t / 48;
        const int h = t % 48;
        const double seas = 0.5 * (1.0 + std::cos(2.0 * kPi * (d - 10) / 365.0));
        const double solar = 0.5 * (1.0 + std::cos(2.0 * kPi * (d - 171) / 365.0));

        wf = 0.93 * wf + 0.36 * ns.normal();
        dn = 0.95 * dn + 0.31 * ns.normal();
        mn = 0.90 * mn + 0.44 * ns.normal();
        spike_u[t] = ns.uniform();
        dip_u[t] = ns.uniform();

        const double diurn = 0.56 + 0.30 * std::exp(-0.5 * std::pow((h - 35.5) / 4.0, 2)) +
                             0.13 * std::exp(-0.5 * std::pow((h - 17.0) / 5.0, 2)) -
                             0.07 * std::exp(-0.5 * std::pow((h - 7.0) / 6.0, 2));
        df_raw[t] = (0.44 + 0.40 * seas) * (diurn / 0.861) * (1.0 + 0.035 * dn);

        const double halfspan = 9.0 + 6.5 * solar;
        const double u = (h - 25.0) / halfspan;
        const double bell = (u > -1.0 && u < 1.0) ? std::pow(std::cos(0.5 * kPi * u), 1.6) : 0.0;
        pv[t] = std::min(1.0, 1.06 * (0.52 + 0.48 * solar) * pv_quality[d] * bell);

        // calm spells clamp to exactly zero; negative prices are only allowed
        // there, so nothing curtailable exists when the price dips below cost
        const double wz = 0.37 + 0.17 * seas + 0.23 * (0.9 * wind_slow[d] + 0.55 * wf);
        wind[t] = (wz < 0.12) ? 0.0 : std::min(wz, 0.95);

        mn_s[t] = mn;
    }

    // peak-normalize demand, then apply the floor
    const double df_max = *std::max_element(df_raw.begin(), df_raw.end());
    ProfileSet ps;
    for (int t = 0; t < kSteps; ++t) {
        const int d = t / 48;
        const double df = std::max(0.34, df_raw[t] / df_max);

        double m = 40.0 + 40.0 * (df - 0.60) + 7.0 * mn_s[t];
        if (df > 0.90) m += (df - 0.90) / 0.10 * (38.0 + 18.0 * spike_u[t]);
        if (wind[t] == 0.0 && pv[t] == 0.0 && df < 0.45)
            m -= (0.45 - df) / 0.11 * (46.0 + 16.0 * dip_u[t]);
        else
            m = std::max(m, 0.5);
        m = std::round(m * 100.0) / 100.0;

        ps.timestamps.push_back(stamp(d, t % 48));
        ps.demand_factor.push_back(df);
        ps.pv_cf.push_back(pv[t]);
        ps.wind_cf.push_back(wind[t]);
        ps.mip_gbp_mwh.push_back(m);
    }
    return ps;
}

} // namespace lmpsim::scenario
