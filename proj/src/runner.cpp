#include "lmpsim/runner.hpp"

#include "lmpsim/lpsolve.hpp"
#include "lmpsim/opf.hpp"
#include "lmpsim/pflow.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace lmpsim::runner {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// minimal CSV quoting for the free-text error column
std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

void write_matrix_csv(const std::filesystem::path& file,
                      const std::vector<std::string>& col_names,
                      const dense::Matrix& m) {
    std::ofstream out(file);
    if (!out) throw RunnerError("cannot write " + file.string());
    out << "t," << join(col_names, ",") << "\n";
    char buf[32];
    for (std::size_t t = 0; t < m.rows; ++t) {
        out << t;
        for (std::size_t j = 0; j < m.cols; ++j) {
            std::snprintf(buf, sizeof buf, "%.10g", m(t, j));
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw RunnerError("failed writing " + file.string());
}

std::vector<std::string> read_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw RunnerError("cannot open " + file.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

dense::Matrix read_matrix_csv(const std::filesystem::path& file,
                              std::vector<std::string>& col_names) {
    auto lines = read_lines(file);
    if (lines.empty()) throw RunnerError("empty file " + file.string());
    auto header = split_csv(lines[0]);
    if (header.empty() || header[0] != "t")
        throw RunnerError("bad header in " + file.string());
    col_names.assign(header.begin() + 1, header.end());
    dense::Matrix m(lines.size() - 1, col_names.size());
    for (std::size_t t = 0; t + 1 < lines.size(); ++t) {
        auto cells = split_csv(lines[t + 1]);
        if (cells.size() != header.size())
            throw RunnerError("bad row " + std::to_string(t) + " in " + file.string());
        for (std::size_t j = 0; j < m.cols; ++j) m(t, j) = std::stod(cells[j + 1]);
    }
    return m;
}

} // namespace

std::size_t ResultSet::failures() const {
    std::size_t n = 0;
    for (const auto& sm : meta)
        if (!sm.error.empty()) ++n;
    return n;
}

std::string gen_label(std::size_t idx, const netmodel::Generator& g) {
    return "g" + std::to_string(idx) + "_" + netmodel::to_string(g.fuel) + "_b" +
           std::to_string(g.bus);
}

ResultSet run(const scenario::Scenario& sc, int workers) {
    if (workers < 1) throw RunnerError("worker count must be >= 1");

    netmodel::Network net = sc.network_file.empty()
                                ? scenario::build_fixture(sc.capacity_case)
                                : netmodel::load_network(sc.network_file);
    auto report = netmodel::validate(net);
    if (!report.pass)
        throw RunnerError("invalid network: " + join(report.violations, "; "));

    scenario::ProfileSet ps = sc.profile_file.empty()
                                  ? scenario::synthesize_year(sc.profile_seed)
                                  : scenario::load_profiles(sc.profile_file);
    if (sc.end <= sc.start) throw RunnerError("empty timestep range");
    if (sc.end > ps.size())
        throw RunnerError("timestep range ends at " + std::to_string(sc.end) +
                          " but the profile has " + std::to_string(ps.size()) +
                          " rows");

    const std::size_t nt = sc.end - sc.start;
    const std::size_t nbus = net.buses.size();
    const std::size_t ngen = net.generators.size();

    ResultSet rs;
    rs.scenario_label = sc.label.empty() ? "run" : sc.label;
    rs.bus_ids.reserve(nbus);
    for (const auto& b : net.buses) rs.bus_ids.push_back(b.id);
    rs.gen_labels.reserve(ngen);
    for (std::size_t gi = 0; gi < ngen; ++gi)
        rs.gen_labels.push_back(gen_label(gi, net.generators[gi]));
    rs.mip_gbp_mwh.assign(nt, 0.0);
    rs.lmp = dense::Matrix(nt, nbus);
    rs.dispatch = dense::Matrix(nt, ngen);
    rs.curtailed = dense::Matrix(nt, ngen);
    rs.meta.assign(nt, SolverMeta{});

    auto solve_one = [&](std::size_t t) {
        const std::size_t a = sc.start + t;
        rs.mip_gbp_mwh[t] = ps.mip_gbp_mwh[a];

        opf::DispatchProblem prob;
        prob.network = &net;
        prob.gen_available_mw.resize(ngen);
        prob.gen_cost_gbp_mwh.resize(ngen);
        for (std::size_t gi = 0; gi < ngen; ++gi) {
            const auto& g = net.generators[gi];
            double avail = g.p_max_mw;
            if (g.profile_driven)
                avail *= (g.fuel == netmodel::Fuel::pv) ? ps.pv_cf[a] : ps.wind_cf[a];
            prob.gen_available_mw[gi] = avail;
            prob.gen_cost_gbp_mwh[gi] =
                g.grid_priced ? ps.mip_gbp_mwh[a] : g.marginal_cost_gbp_mwh;
        }
        prob.load_mw.resize(net.loads.size());
        for (std::size_t li = 0; li < net.loads.size(); ++li)
            prob.load_mw[li] = net.loads[li].p_peak_mw * ps.demand_factor[a];

        auto& sm = rs.meta[t];
        try {
            opf::OpfSolution sol = opf::solve_opf(prob);
            sm.iterations = sol.sl_iterations;
            sm.converged = sol.converged;
            for (std::size_t j = 0; j < nbus; ++j) rs.lmp(t, j) = sol.lmp_gbp_mwh[j];
            for (std::size_t j = 0; j < ngen; ++j) {
                rs.dispatch(t, j) = sol.dispatch_mw[j];
                rs.curtailed(t, j) = sol.curtailed_mw[j];
            }
        } catch (const std::exception& e) {
            sm.iterations = 0;
            sm.converged = false;
            sm.error = e.what();
            for (std::size_t j = 0; j < nbus; ++j) rs.lmp(t, j) = kNan;
            for (std::size_t j = 0; j < ngen; ++j) {
                rs.dispatch(t, j) = kNan;
                rs.curtailed(t, j) = kNan;
            }
        }
    };

    const std::size_t nworkers = std::min<std::size_t>(workers, nt);
    if (nworkers <= 1) {
        for (std::size_t t = 0; t < nt; ++t) solve_one(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (std::size_t w = 0; w < nworkers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
                    if (t >= nt) return;
                    solve_one(t);
                }
            });
        for (auto& th : pool) th.join();
    }

    const std::size_t bad = rs.failures();
    if (bad * 1000 > nt)
        std::fprintf(stderr, "warning: %zu of %zu timesteps failed to solve\n", bad,
                     nt);
    return rs;
}

std::filesystem::path save_results(const ResultSet& rs,
                                   const std::filesystem::path& out_dir) {
    const auto dir = out_dir / rs.scenario_label;
    std::filesystem::create_directories(dir);

    std::vector<std::string> bus_names;
    bus_names.reserve(rs.bus_ids.size());
    for (int id : rs.bus_ids) bus_names.push_back(std::to_string(id));
    write_matrix_csv(dir / "lmp.csv", bus_names, rs.lmp);
    write_matrix_csv(dir / "dispatch.csv", rs.gen_labels, rs.dispatch);
    write_matrix_csv(dir / "curtailed.csv", rs.gen_labels, rs.curtailed);

    std::ofstream out(dir / "meta.csv");
    if (!out) throw RunnerError("cannot write " + (dir / "meta.csv").string());
    out << "t,mip_gbp_mwh,sl_iterations,converged,error\n";
    char buf[32];
    for (std::size_t t = 0; t < rs.meta.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.10g", rs.mip_gbp_mwh[t]);
        out << t << ',' << buf << ',' << rs.meta[t].iterations << ','
            << (rs.meta[t].converged ? 1 : 0) << ',' << csv_quote(rs.meta[t].error)
            << "\n";
    }
    if (!out) throw RunnerError("failed writing " + (dir / "meta.csv").string());
    return dir;
}

ResultSet load_results(const std::filesystem::path& run_dir) {
    ResultSet rs;
    rs.scenario_label = run_dir.filename().string();

    std::vector<std::string> bus_names;
    rs.lmp = read_matrix_csv(run_dir / "lmp.csv", bus_names);
    rs.bus_ids.reserve(bus_names.size());
    for (const auto& s : bus_names) rs.bus_ids.push_back(std::stoi(s));
    rs.dispatch = read_matrix_csv(run_dir / "dispatch.csv", rs.gen_labels);
    std::vector<std::string> check;
    rs.curtailed = read_matrix_csv(run_dir / "curtailed.csv", check);
    if (check != rs.gen_labels)
        throw RunnerError("generator columns disagree between dispatch.csv and "
                          "curtailed.csv in " +
                          run_dir.string());

    auto lines = read_lines(run_dir / "meta.csv");
    if (lines.empty() || split_csv(lines[0]) !=
                             std::vector<std::string>{"t", "mip_gbp_mwh",
                                                      "sl_iterations", "converged",
                                                      "error"})
        throw RunnerError("bad header in " + (run_dir / "meta.csv").string());
    for (std::size_t t = 0; t + 1 < lines.size(); ++t) {
        auto cells = split_csv(lines[t + 1]);
        if (cells.size() != 5)
            throw RunnerError("bad row " + std::to_string(t) + " in " +
                              (run_dir / "meta.csv").string());
        rs.mip_gbp_mwh.push_back(std::stod(cells[1]));
        SolverMeta sm;
        sm.iterations = std::stoi(cells[2]);
        sm.converged = cells[3] == "1";
        sm.error = cells[4];
        rs.meta.push_back(sm);
    }
    if (rs.lmp.rows != rs.meta.size() || rs.dispatch.rows != rs.meta.size() ||
        rs.curtailed.rows != rs.meta.size())
        throw RunnerError("row counts disagree across CSVs in " + run_dir.string());
    return rs;
}

} // namespace lmpsim::runner
