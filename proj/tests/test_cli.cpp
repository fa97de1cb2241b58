#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef CLI_BIN
#error "CLI_BIN must point at the command-line binary"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(CLI_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("solve writes a solution and a manifest") {
    TempDir dir("iyb_cli_solve");
    CHECK(run("solve --n 3 --ell 2 --m1 1 --m2 1 --k 1 --out " + dir.path.string()) == 0);

    const json m = json::parse(slurp(dir.path / "manifest_k1.json"));
    CHECK(m["command"] == "solve");
    CHECK(m["n"] == 3);
    CHECK(m["k"] == 1);
    CHECK(m["parity_sign"] == -1);
    CHECK(m["zeroes"].size() == 1);
    CHECK(std::fabs(m["energy"].get<double>() - 323.8142403) < 1e-3);
    CHECK(m.contains("wall_time_s"));

    const std::string csv = slurp(dir.path / "solution_k1.csv");
    CHECK(csv.rfind("r,w,wp\n", 0) == 0);
}

TEST_CASE("exit codes follow the contract") {
    TempDir dir("iyb_cli_codes");
    const std::string out = " --out " + dir.path.string();
    // radial geometry is refused as invalid input
    CHECK(run("solve --n 3 --ell 1 --m1 2 --m2 2 --k 1" + out) == 1);
    // broken multiplicity relation
    CHECK(run("solve --n 4 --ell 2 --m1 1 --m2 3 --k 1" + out) == 1);
    // unknown flag
    CHECK(run("solve --bogus 3" + out) == 1);
    // unreachable zero count within a tiny scan range
    CHECK(run("solve --n 3 --ell 2 --m1 1 --m2 1 --k 6 --scan-max 2" + out) == 2);
}

TEST_CASE("constant solution through the CLI") {
    TempDir dir("iyb_cli_k0");
    CHECK(run("solve --n 4 --ell 2 --m1 1 --m2 2 --k 0 --out " + dir.path.string()) == 0);
    const json m = json::parse(slurp(dir.path / "manifest_k0.json"));
    const double cn = 8.0 * 3.14159265358979323846 * 3.14159265358979323846 / 3.0;
    CHECK(std::fabs(m["energy"].get<double>() / cn - 1.0) <= 1e-9);
    CHECK(m["zeroes"].empty());
}

TEST_CASE("identical flags produce identical outputs") {
    TempDir a("iyb_cli_det_a"), b("iyb_cli_det_b");
    const std::string flags = "solve --n 4 --ell 2 --m1 1 --m2 2 --k 2 --out ";
    REQUIRE(run(flags + a.path.string()) == 0);
    REQUIRE(run(flags + b.path.string()) == 0);
    CHECK(slurp(a.path / "solution_k2.csv") == slurp(b.path / "solution_k2.csv"));

    json ma = json::parse(slurp(a.path / "manifest_k2.json"));
    json mb = json::parse(slurp(b.path / "manifest_k2.json"));
    ma.erase("wall_time_s");  // run-dependent
    mb.erase("wall_time_s");
    ma.erase("outputs");  // carries the (deliberately different) --out path
    mb.erase("outputs");
    CHECK(ma.dump() == mb.dump());
}

TEST_CASE("manifest round trip reproduces the run") {
    TempDir a("iyb_cli_rt_a"), b("iyb_cli_rt_b");
    REQUIRE(run("solve --n 5 --ell 2 --m1 2 --m2 2 --k 1 --out " + a.path.string()) == 0);
    const json m = json::parse(slurp(a.path / "manifest_k1.json"));

    std::ostringstream cmd;
    cmd << "solve --n " << m["n"].get<int>() << " --ell " << m["ell"].get<int>() << " --m1 "
        << m["m1"].get<int>() << " --m2 " << m["m2"].get<int>() << " --k " << m["k"].get<int>()
        << " --eps0 " << m["config"]["eps0"].get<double>() << " --rtol "
        << m["config"]["rtol"].get<double>() << " --atol " << m["config"]["atol"].get<double>()
        << " --scan-max " << m["config"]["scan_max"].get<double>() << " --out "
        << b.path.string();
    REQUIRE(run(cmd.str()) == 0);
    const json m2 = json::parse(slurp(b.path / "manifest_k1.json"));
    CHECK(std::fabs(m2["residual"].get<double>() - m["residual"].get<double>()) <=
          1e-12 * (1.0 + std::fabs(m["residual"].get<double>())));
    CHECK(std::fabs(m2["energy"].get<double>() - m["energy"].get<double>()) <=
          1e-12 * std::fabs(m["energy"].get<double>()));
}

TEST_CASE("all-seeds mode writes one file per refined solution") {
    TempDir dir("iyb_cli_seeds");
    CHECK(run("solve --n 3 --ell 2 --m1 1 --m2 1 --k 1 --all-seeds --out " + dir.path.string()) ==
          0);
    const json m = json::parse(slurp(dir.path / "manifest_k1.json"));
    REQUIRE(m.contains("all_solutions"));
    CHECK(m["all_solutions"].size() >= 1);
    CHECK(fs::exists(dir.path / "solution_k1_seed0.csv"));
}

TEST_CASE("table output does not depend on the worker count") {
    TempDir a("iyb_cli_tab_a"), b("iyb_cli_tab_b");
    const fs::path ca = a.path / "table.csv", cb = b.path / "table.csv";
    REQUIRE(run("table --out " + ca.string()) == 0);
    {
        const std::string cmd = "ISOYAMABE_THREADS=1 " + std::string(CLI_BIN) + " table --out " +
                                cb.string() + " >/dev/null 2>&1";
        REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    }
    CHECK(slurp(ca) == slurp(cb));
}

TEST_CASE("scan budget exhaustion exits with code 3") {
    TempDir dir("iyb_cli_budget");
    CHECK(run("diagnose --n 3 --ell 2 --m1 1 --m2 1 --scan-max 40 --scan-budget 4 --out " +
              dir.path.string()) == 3);
}

TEST_CASE("diagnose emits scan and report files") {
    TempDir dir("iyb_cli_diag");
    CHECK(run("diagnose --n 3 --ell 2 --m1 1 --m2 1 --scan-max 20 --exit-count 1 "
              "--ladder 10 --ladder 100 --limit-H0 2 --limit-p 5 --limit-K 20 --out " +
              dir.path.string()) == 0);
    CHECK(fs::exists(dir.path / "scan_R.csv"));
    CHECK(fs::exists(dir.path / "scan_S.csv"));
    const json rep = json::parse(slurp(dir.path / "diagnose.json"));
    CHECK(rep["exit_times_R"]["radii_monotone"] == true);
    CHECK(rep["exit_times_R"]["first_radius_le_1"] == true);
    CHECK(rep["limit"]["bubble_oracle_pass"] == true);
    CHECK(rep["zero_growth"]["counts"] == json::array({2, 20}));
    CHECK(rep["convergence"]["strictly_decreasing"] == true);
}
