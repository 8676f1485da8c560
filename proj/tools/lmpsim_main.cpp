#include "lmpsim/netmodel.hpp"
#include "lmpsim/runner.hpp"
#include "lmpsim/scenario.hpp"
#include "lmpsim/stats.hpp"
#include "lmpsim/svgplot.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace {

using namespace lmpsim;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path);
}

netmodel::Network network_for(const std::string& network_file,
                              const std::string& case_name) {
    if (!network_file.empty()) return netmodel::load_network(network_file);
    return scenario::build_fixture(scenario::capacity_case_from_string(case_name));
}

int cmd_fixture(const std::string& case_name, const std::string& out_path) {
    auto net = scenario::build_fixture(scenario::capacity_case_from_string(case_name));
    auto report = netmodel::validate(net);
    if (!report.pass) {
        for (const auto& v : report.violations)
            std::fprintf(stderr, "violation: %s\n", v.c_str());
        return 1;
    }
    netmodel::save_network(net, out_path);
    std::printf("wrote %s (%zu buses, %zu branches, %zu generators)\n",
                out_path.c_str(), net.buses.size(), net.branches.size(),
                net.generators.size());
    return 0;
}

int cmd_profiles(std::uint64_t seed, const std::string& out_path) {
    auto ps = scenario::synthesize_year(seed);
    scenario::save_profiles(ps, out_path);
    std::printf("wrote %s (%zu half-hours)\n", out_path.c_str(), ps.size());
    return 0;
}

int cmd_run(const scenario::Scenario& sc, int workers, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rs = runner::run(sc, workers);
    auto dir = runner::save_results(rs, out_dir);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s: %zu timesteps, %zu failed, %.1f s -> %s\n",
                rs.scenario_label.c_str(), rs.n_timesteps(), rs.failures(), secs,
                dir.string().c_str());
    if (rs.failures() * 1000 > rs.n_timesteps()) return 1;
    return 0;
}

int cmd_stats(const std::string& run_dir, const std::string& network_file,
              const std::string& case_name, const std::string& out_path) {
    auto rs = runner::load_results(run_dir);
    auto net = network_for(network_file, case_name);
    auto rows = stats::level_summary(rs, net);
    auto csv = stats::summary_csv(rows);
    std::fputs(csv.c_str(), stdout);
    if (!out_path.empty()) write_text(out_path, csv);
    return 0;
}

int cmd_plot(const std::string& run_dir, const std::string& kind,
             const std::vector<int>& buses, std::size_t day,
             const std::string& network_file, const std::string& case_name,
             const std::string& out_path) {
    auto rs = runner::load_results(run_dir);
    std::string svg;
    if (kind == "daily") {
        auto slice = stats::daily_slice(rs, buses, day);
        std::vector<svgplot::Series> series(buses.size());
        for (std::size_t r = 0; r < buses.size(); ++r) {
            series[r].label = std::to_string(buses[r]);
            series[r].y.assign(slice.row(r), slice.row(r) + 48);
        }
        svg = svgplot::line_chart(
            rs.scenario_label + " day " + std::to_string(day) + " (£/MWh)",
            series);
    } else if (kind == "yearly") {
        std::vector<svgplot::Series> series(buses.size());
        for (std::size_t r = 0; r < buses.size(); ++r) {
            std::size_t col = rs.bus_ids.size();
            for (std::size_t j = 0; j < rs.bus_ids.size(); ++j)
                if (rs.bus_ids[j] == buses[r]) {
                    col = j;
                    break;
                }
            if (col == rs.bus_ids.size())
                throw stats::StatsError("unknown bus " + std::to_string(buses[r]));
            series[r].label = std::to_string(buses[r]);
            series[r].y.resize(rs.n_timesteps());
            for (std::size_t t = 0; t < rs.n_timesteps(); ++t)
                series[r].y[t] = rs.lmp(t, col);
        }
        svg = svgplot::line_chart(rs.scenario_label + " (£/MWh)", series);
    } else { // level-bars
        auto net = network_for(network_file, case_name);
        auto rows = stats::level_summary(rs, net);
        std::vector<std::string> labels;
        std::vector<double> values;
        for (const auto& r : rows) {
            labels.push_back(std::to_string(r.voltage_level) + " kV");
            values.push_back(r.mean_lmp);
        }
        svg = svgplot::bar_chart(rs.scenario_label + " mean LMP by voltage level",
                                 labels, values);
    }
    write_text(out_path, svg);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"locational marginal price simulation toolkit"};
    app.require_subcommand(1);

    std::string case_name = "current", out_path, network_file, profile_file;
    std::string run_dir, kind = "daily", label = "run";
    std::uint64_t seed = 1;
    std::size_t start = 0, end = 17520, day = 0;
    int workers = 1;
    std::vector<int> buses;

    auto add_case = [&](CLI::App* c) {
        c->add_option("--case", case_name, "capacity case")
            ->check(CLI::IsMember({"current", "future"}));
    };

    auto* fx = app.add_subcommand("fixture", "write the study network as JSON");
    add_case(fx);
    fx->add_option("-o,--out", out_path, "output JSON file")->required();

    auto* pr = app.add_subcommand("profiles", "write a synthetic profile year as CSV");
    pr->add_option("--seed", seed, "random stream seed");
    pr->add_option("-o,--out", out_path, "output CSV file")->required();

    auto* rn = app.add_subcommand("run", "solve a scenario and write result CSVs");
    add_case(rn);
    rn->add_option("--network", network_file, "network JSON (default: built-in fixture)");
    rn->add_option("--profiles", profile_file, "profile CSV (default: synthesized year)");
    rn->add_option("--seed", seed, "seed for the synthesized profiles");
    rn->add_option("--start", start, "first half-hour index");
    rn->add_option("--end", end, "one past the last half-hour index");
    rn->add_option("--label", label, "run directory name");
    rn->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 1024));
    rn->add_option("-o,--out", out_path, "parent directory for the run")->required();

    auto* st = app.add_subcommand("stats", "per-voltage-level summary of a run");
    add_case(st);
    st->add_option("--run", run_dir, "run directory")->required();
    st->add_option("--network", network_file, "network JSON (default: built-in fixture)");
    st->add_option("-o,--out", out_path, "also write the CSV here");

    auto* pl = app.add_subcommand("plot", "render a run as an SVG chart");
    add_case(pl);
    pl->add_option("--run", run_dir, "run directory")->required();
    pl->add_option("--kind", kind, "chart kind")
        ->check(CLI::IsMember({"daily", "yearly", "level-bars"}));
    pl->add_option("--buses", buses, "bus ids to plot")->delimiter(',');
    pl->add_option("--day", day, "day index for --kind daily");
    pl->add_option("--network", network_file, "network JSON (default: built-in fixture)");
    pl->add_option("-o,--out", out_path, "output SVG file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (pl->parsed() && kind != "level-bars" && buses.empty()) {
        std::fprintf(stderr, "plot --kind %s requires --buses\n", kind.c_str());
        return 2;
    }

    try {
        if (fx->parsed()) return cmd_fixture(case_name, out_path);
        if (pr->parsed()) return cmd_profiles(seed, out_path);
        if (rn->parsed()) {
            scenario::Scenario sc;
            sc.network_file = network_file;
            sc.profile_file = profile_file;
            sc.capacity_case = scenario::capacity_case_from_string(case_name);
            sc.profile_seed = seed;
            sc.start = start;
            sc.end = end;
            sc.label = label;
            return cmd_run(sc, workers, out_path);
        }
        if (st->parsed()) return cmd_stats(run_dir, network_file, case_name, out_path);
        if (pl->parsed())
            return cmd_plot(run_dir, kind, buses, day, network_file, case_name,
                            out_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
