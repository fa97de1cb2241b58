// isoyamabe: nodal solutions of the singular Yamabe ODE on [0, pi] by double
// shooting, with energy tables and phase-plane diagnostics.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isoyamabe/energy.hpp"
#include "isoyamabe/limit.hpp"
#include "isoyamabe/matcher.hpp"
#include "isoyamabe/problem.hpp"
#include "isoyamabe/shooting.hpp"
#include "isoyamabe/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace isoyamabe;

namespace {

// exit-code contract: 0 ok, 1 invalid input, 2 not found, 3 budget exhausted
constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotFound = 2;
constexpr int kExitBudget = 3;

struct SpecFlags {
    int n = 3, ell = 2, m1 = 1, m2 = 1;
};

struct ConfigFlags {
    IntegratorConfig config;
    double scan_max = 400.0;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
    cmd->add_option("--n", f.n, "sphere dimension (>= 3)");
    cmd->add_option("--ell", f.ell, "number of distinct principal curvatures {1,2,3,4,6}");
    cmd->add_option("--m1", f.m1, "first multiplicity");
    cmd->add_option("--m2", f.m2, "second multiplicity");
}

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
    cmd->add_option("--eps0", f.config.eps0, "series-start offset from the singular endpoints");
    cmd->add_option("--rtol", f.config.rtol, "relative integration tolerance");
    cmd->add_option("--atol", f.config.atol, "absolute integration tolerance");
    cmd->add_option("--max-step", f.config.max_step, "maximum integrator step");
    cmd->add_option("--zero-tol", f.config.zero_tol, "zero/extremum refinement tolerance");
    cmd->add_option("--scan-max", f.scan_max, "largest shooting parameter scanned");
}

json config_json(const IntegratorConfig& c, double scan_max) {
    return json{{"eps0", c.eps0},         {"rtol", c.rtol},
                {"atol", c.atol},         {"max_step", c.max_step},
                {"zero_tol", c.zero_tol}, {"scan_max", scan_max}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << j.dump(2) << "\n";
}

unsigned worker_cap() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ISOYAMABE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

class Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

json solution_json(const NodalSolution& sol, double scan_max) {
    json j;
    j["n"] = sol.spec.n;
    j["ell"] = sol.spec.ell;
    j["m1"] = sol.spec.m1;
    j["m2"] = sol.spec.m2;
    j["k"] = sol.k;
    j["d"] = sol.d;
    j["c"] = sol.c;
    j["parity_sign"] = sol.parity_sign;
    j["residual"] = sol.match_residual;
    j["energy"] = sol.energy;          // null when ell != 2 (NaN serializes to null)
    j["yamabe_value"] = sol.yamabe_value;
    j["zeroes"] = sol.zeroes;
    j["config"] = config_json(sol.config, scan_max);
    return j;
}

// ----------------------------------------------------------------- solve ---

int cmd_solve(const SpecFlags& sf, const ConfigFlags& cf, int k, const std::string& out_dir,
              bool all_seeds) {
    Stopwatch watch;
    const ProblemSpec spec = make_problem(sf.n, sf.ell, sf.m1, sf.m2);
    fs::create_directories(out_dir);

    std::vector<NodalSolution> sols;
    if (all_seeds) {
        sols = find_all_nodal(spec, cf.config, k, cf.scan_max);
    } else {
        sols.push_back(find_nodal(spec, cf.config, k, cf.scan_max));
    }

    json manifest;
    manifest["command"] = "solve";
    manifest["tool_version"] = kVersion;
    json outputs = json::array();
    json solutions = json::array();
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const std::string suffix = all_seeds ? "_seed" + std::to_string(i) : "";
        const fs::path csv = fs::path(out_dir) / ("solution_k" + std::to_string(k) + suffix + ".csv");
        write_trajectory_csv(csv.string(), sols[i].profile);
        outputs.push_back(csv.string());
        solutions.push_back(solution_json(sols[i], cf.scan_max));
    }
    manifest.update(solutions[0]);  // primary solution fields at the top level
    if (all_seeds) manifest["all_solutions"] = solutions;
    manifest["outputs"] = outputs;
    manifest["wall_time_s"] = watch.seconds();

    const fs::path mpath = fs::path(out_dir) / ("manifest_k" + std::to_string(k) + ".json");
    write_json(mpath, manifest);

    std::printf("k=%d: d=%.12g c=%.12g residual=%.3g zeroes=%zu", k, sols[0].d, sols[0].c,
                sols[0].match_residual, sols[0].zeroes.size());
    if (spec.ell == 2)
        std::printf(" energy=%.10g ratio=%.6g", sols[0].energy, sols[0].energy / c_n_value(spec.n));
    std::printf("\n  wrote %s\n", mpath.string().c_str());
    return kExitOk;
}

// ----------------------------------------------------------------- table ---

struct TableRow {
    int n, kdim, mdim;
};

// the nine ell = 2 product-sphere rows with n <= 7
constexpr TableRow kTableRows[] = {{3, 2, 2}, {4, 2, 3}, {5, 2, 4}, {5, 3, 3}, {6, 2, 5},
                                   {6, 3, 4}, {7, 2, 6}, {7, 3, 5}, {7, 4, 4}};

struct RowResult {
    TableRow row;
    bool ok = false;
    std::string error;
    double c_n = 0, E = 0, ratio = 0, yamabe = 0, d = 0, c = 0, residual = 0;
};

RowResult run_table_row(const TableRow& row, const IntegratorConfig& config, double scan_max) {
    RowResult res;
    res.row = row;
    res.c_n = c_n_value(row.n);
    try {
        // multiplicities: the sin-weight exponent kdim-1 matches h(0) = m1
        const ProblemSpec spec = make_problem(row.n, 2, row.kdim - 1, row.mdim - 1);
        const NodalSolution sol = find_nodal(spec, config, 1, scan_max);
        res.E = sol.energy;
        res.ratio = sol.energy / res.c_n;
        res.yamabe = sol.yamabe_value;
        res.d = sol.d;
        res.c = sol.c;
        res.residual = sol.match_residual;
        res.ok = true;
    } catch (const std::exception& e) {
        res.error = e.what();
        for (char& ch : res.error)
            if (ch == ',' || ch == '\n') ch = ';';
    }
    return res;
}

int cmd_table(const ConfigFlags& cf, const std::string& out_file) {
    Stopwatch watch;
    const unsigned workers = worker_cap();
    const int nrows = static_cast<int>(std::size(kTableRows));
    std::vector<RowResult> results(nrows);

    // rows are independent; futures are collected in row order so the output
    // does not depend on the worker count
    std::vector<std::future<RowResult>> futs(nrows);
    unsigned in_flight = 0;
    int next = 0, done = 0;
    while (done < nrows) {
        while (next < nrows && in_flight < workers) {
            futs[next] = std::async(std::launch::async, run_table_row, kTableRows[next],
                                    cf.config, cf.scan_max);
            ++next;
            ++in_flight;
        }
        results[done] = futs[done].get();
        ++done;
        --in_flight;
    }

    if (const fs::path parent = fs::path(out_file).parent_path(); !parent.empty())
        fs::create_directories(parent);
    std::ofstream os(out_file);
    if (!os) throw Error("cannot open " + out_file + " for writing");
    os << "n,k,m,c_n,E,ratio,yamabe,status\n";
    char buf[256];
    bool all_ok = true;
    for (const RowResult& r : results) {
        if (r.ok) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,ok\n", r.row.n,
                          r.row.kdim, r.row.mdim, r.c_n, r.E, r.ratio, r.yamabe);
        } else {
            std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.17g,,,,failed:%s\n", r.row.n, r.row.kdim,
                          r.row.mdim, r.c_n, r.error.c_str());
            all_ok = false;
        }
        os << buf;
    }
    os.close();

    json manifest;
    manifest["command"] = "table";
    manifest["tool_version"] = kVersion;
    manifest["config"] = config_json(cf.config, cf.scan_max);
    json rows = json::array();
    for (const RowResult& r : results) {
        json jr{{"n", r.row.n}, {"k", r.row.kdim}, {"m", r.row.mdim}, {"c_n", r.c_n}};
        if (r.ok) {
            jr["E"] = r.E;
            jr["ratio"] = r.ratio;
            jr["yamabe"] = r.yamabe;
            jr["d"] = r.d;
            jr["c"] = r.c;
            jr["residual"] = r.residual;
            jr["status"] = "ok";
        } else {
            jr["status"] = "failed: " + r.error;
        }
        rows.push_back(jr);
    }
    manifest["rows"] = rows;
    manifest["outputs"] = json::array({out_file});
    manifest["wall_time_s"] = watch.seconds();
    write_json(fs::path(out_file).replace_extension(".manifest.json"), manifest);

    for (const RowResult& r : results) {
        if (r.ok)
            std::printf("n=%d k=%d m=%d  c_n=%-8.4g E=%-9.6g E/c_n=%.4g\n", r.row.n, r.row.kdim,
                        r.row.mdim, r.c_n, r.E, r.ratio);
        else
            std::printf("n=%d k=%d m=%d  FAILED: %s\n", r.row.n, r.row.kdim, r.row.mdim,
                        r.error.c_str());
    }
    return all_ok ? kExitOk : kExitNotFound;
}

// -------------------------------------------------------------- diagnose ---

int cmd_diagnose(const SpecFlags& sf, const ConfigFlags& cf, const std::string& out_dir,
                 int exit_count, double limit_H0, double limit_p, double limit_K,
                 std::vector<double> ladder, std::vector<double> deltas, double gap_K,
                 int scan_budget) {
    Stopwatch watch;
    const ProblemSpec spec = make_problem(sf.n, sf.ell, sf.m1, sf.m2);
    fs::create_directories(out_dir);
    json report;
    report["command"] = "diagnose";
    report["tool_version"] = kVersion;
    report["spec"] = {{"n", spec.n}, {"ell", spec.ell}, {"m1", spec.m1}, {"m2", spec.m2}};
    report["config"] = config_json(cf.config, cf.scan_max);
    json outputs = json::array();

    // shooting-curve scans
    auto grid = [&](double hi) {
        const int npts = std::max(33, static_cast<int>(64.0 * std::log10(std::max(hi, 2.0))));
        std::vector<double> g(npts);
        for (int i = 0; i < npts; ++i) g[i] = std::pow(hi, i / (npts - 1.0));
        g.front() = 1.0;
        return g;
    };
    const CurveScan scan_R =
        scan_curve(spec, cf.config, CurveSide::R, grid(cf.scan_max), scan_budget);
    const CurveScan scan_S =
        scan_curve(spec, cf.config, CurveSide::S, grid(cf.scan_max), scan_budget);
    const fs::path rpath = fs::path(out_dir) / "scan_R.csv";
    const fs::path spath = fs::path(out_dir) / "scan_S.csv";
    write_scan_csv(rpath.string(), scan_R);
    write_scan_csv(spath.string(), scan_S);
    outputs.push_back(rpath.string());
    outputs.push_back(spath.string());

    double thmin = 0.0, thmax = 0.0;
    for (const PhasePoint& p : scan_R.points) thmin = std::min(thmin, p.theta);
    for (const PhasePoint& p : scan_S.points) thmax = std::max(thmax, p.theta);
    report["scan"] = {{"theta_min", thmin}, {"vartheta_max", thmax},
                      {"points_R", scan_R.params.size()}, {"points_S", scan_S.params.size()}};

    // exit times and the monotone radius diagnostic
    auto exit_json = [&](const CurveScan& scan) {
        const ExitTimes et = exit_times(scan, exit_count);
        bool inc = true, dec = true;
        for (std::size_t i = 0; i + 1 < et.radii.size(); ++i) {
            inc &= et.radii[i] < et.radii[i + 1];
            dec &= et.radii[i] > et.radii[i + 1];
        }
        return json{{"params", et.params},
                    {"radii", et.radii},
                    {"radii_monotone", inc || dec},
                    {"first_radius_le_1", et.radii.empty() ? false : et.radii[0] <= 1.0 + 1e-12}};
    };
    report["exit_times_R"] = exit_json(scan_R);
    report["exit_times_S"] = exit_json(scan_S);

    // limit problem: bubble oracle in the critical case, zero count otherwise
    {
        json lim;
        lim["H0"] = limit_H0;
        lim["p"] = limit_p;
        lim["K"] = limit_K;
        lim["subcritical"] = subcritical_check(limit_H0, limit_p);
        const Trajectory v0 = solve_limit(LimitConfig{limit_H0, limit_p, limit_K});
        lim["zeroes"] = v0.zeroes.size();
        const double crit_gap = (limit_p + 1.0) / (limit_p - 1.0) - 0.5 * (limit_H0 + 1.0);
        if (std::fabs(crit_gap) < 1e-12) {
            // critical case: compare against the closed-form profile
            const double nn = limit_H0 + 1.0;
            double err = 0.0;
            for (int i = 0; i <= 2000; ++i) {
                const double r = std::min(limit_K, 20.0) * i / 2000.0;
                const double bubble = std::pow(1.0 + r * r / (nn * (nn - 2.0)), -0.5 * (nn - 2.0));
                err = std::max(err, std::fabs(v0.eval_w(r) - bubble));
            }
            lim["bubble_max_error"] = err;
            lim["bubble_oracle_pass"] = err <= 1e-8;
        }
        const fs::path vpath = fs::path(out_dir) / "limit_v0.csv";
        {
            std::ofstream os(vpath);
            os << "r,v,vp\n";
            char buf[96];
            for (const ODEState& s : v0.samples) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.r, s.w, s.wp);
                os << buf;
            }
        }
        outputs.push_back(vpath.string());
        report["limit"] = lim;
    }

    // zero growth along the ladder
    {
        std::sort(ladder.begin(), ladder.end());
        const std::vector<int> counts =
            zero_growth_check(spec, cf.config, spec.a0 / 2.0, ladder);
        bool nondec = true;
        for (std::size_t i = 0; i + 1 < counts.size(); ++i) nondec &= counts[i] <= counts[i + 1];
        report["zero_growth"] = {{"eps", spec.a0 / 2.0},
                                 {"ladder", ladder},
                                 {"counts", counts},
                                 {"nondecreasing", nondec}};
    }

    // rescaled convergence toward the limit profile
    if (!deltas.empty()) {
        std::sort(deltas.begin(), deltas.end());
        const Trajectory v0 =
            solve_limit(LimitConfig{static_cast<double>(spec.m1), spec.p, gap_K * 1.2});
        json gaps = json::array();
        double prev = 0.0;
        bool decreasing = true;
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            const double delta = deltas[i];
            const double dshoot = std::pow(delta, 2.0 / (spec.p - 1.0));
            const Trajectory w = integrate_forward(spec, cf.config, dshoot);
            const RescaledTrajectory z = rescale_z(spec, cf.config, delta, w, gap_K);
            const double gap = convergence_gap(z.traj, v0, gap_K);
            gaps.push_back(json{{"delta", delta}, {"gap", gap}, {"truncated", z.truncated}});
            if (i > 0 && gap >= prev) decreasing = false;
            prev = gap;
        }
        report["convergence"] = {{"K", gap_K}, {"gaps", gaps}, {"strictly_decreasing", decreasing}};
    }

    report["outputs"] = outputs;
    report["wall_time_s"] = watch.seconds();
    write_json(fs::path(out_dir) / "diagnose.json", report);
    std::printf("diagnose: theta range [%.4g, %.4g], reports in %s\n", thmin, thmax,
                out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nodal solutions of the singular Yamabe ODE by double shooting"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    SpecFlags sf;
    ConfigFlags cf;
    int k = 1;
    std::string out_dir = ".";
    std::string table_out = "table.csv";
    bool all_seeds = false;
    int exit_count = 3;
    double limit_H0 = 1.0, limit_p = 5.0, limit_K = 100.0, gap_K = 5.0;
    int scan_budget = 20000;
    std::vector<double> ladder{10.0, 100.0, 1000.0};
    std::vector<double> deltas{10.0, 30.0, 100.0};

    CLI::App* solve = app.add_subcommand("solve", "find a solution with exactly k zeroes");
    add_spec_flags(solve, sf);
    add_config_flags(solve, cf);
    solve->add_option("--k", k, "prescribed number of zeroes");
    solve->add_option("--out", out_dir, "output directory");
    solve->add_flag("--all-seeds", all_seeds, "refine every seed, not just the smallest d");

    CLI::App* table = app.add_subcommand("table", "energies of the one-zero solutions, ell = 2, n <= 7");
    add_config_flags(table, cf);
    table->add_option("--out", table_out, "output CSV path");

    CLI::App* diag = app.add_subcommand("diagnose", "curve scans, exit times, limit-problem checks");
    add_spec_flags(diag, sf);
    add_config_flags(diag, cf);
    diag->add_option("--out", out_dir, "output directory");
    diag->add_option("--exit-count", exit_count, "number of exit times per side");
    diag->add_option("--limit-H0", limit_H0, "limit-problem coefficient H0");
    diag->add_option("--limit-p", limit_p, "limit-problem exponent p");
    diag->add_option("--limit-K", limit_K, "limit-problem horizon K");
    diag->add_option("--ladder", ladder, "d ladder for the zero-growth check");
    diag->add_option("--deltas", deltas, "rescaling indices for the convergence check");
    diag->add_option("--gap-K", gap_K, "horizon for the convergence gaps");
    diag->add_option("--scan-budget", scan_budget, "sample budget per curve scan");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (solve->parsed()) return cmd_solve(sf, cf, k, out_dir, all_seeds);
        if (table->parsed()) return cmd_table(cf, table_out);
        if (diag->parsed())
            return cmd_diagnose(sf, cf, out_dir, exit_count, limit_H0, limit_p, limit_K, ladder,
                                deltas, gap_K, scan_budget);
    } catch (const InvalidSpecError& e) {
        std::fprintf(stderr, "invalid spec: %s\n", e.what());
        return kExitInvalid;
    } catch (const InvalidArgumentError& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return kExitInvalid;
    } catch (const ScanBudgetError& e) {
        std::fprintf(stderr, "budget exhausted: %s\n", e.what());
        return kExitBudget;
    } catch (const NotFoundError& e) {
        std::fprintf(stderr, "not found: %s\n", e.what());
        return kExitNotFound;
    } catch (const ScanRangeError& e) {
        std::fprintf(stderr, "scan range too narrow: %s\n", e.what());
        return kExitNotFound;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNotFound;
    }
    return kExitInvalid;
}
