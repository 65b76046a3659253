#include <doctest.h>

#include "core/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace ndsym;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("ndsym_test_" + tag);
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json heat_symbol() {
    return json{{"kind", "multiplier"}, {"psi", {{"type", "quadratic"}}}};
}

json sine_symbol(double L) {
    return json{{"kind", "separable"},
                {"psi", {{"type", "stable"}, {"alpha", 1.5}, {"scale", 1.0}}},
                {"phi", {{"amp", 0.5}, {"freq", 2.0 * kPi / L}}},
                {"m", 1.5},
                {"m_lower", 1.5}};
}

} // namespace

TEST_CASE("building blocks parse from JSON") {
    Psi p = psi_from_json(json{{"type", "stable"}, {"alpha", 1.5}, {"scale", 2.0}});
    CHECK(p.at1(2.0).real() == doctest::Approx(2.0 * std::pow(2.0, 1.5)));
    CHECK_THROWS_AS(psi_from_json(json{{"type", "nope"}}), ConfigError);

    TimeDependentSymbol a = symbol_from_json(heat_symbol());
    CHECK(a.at1(0.0, 0.3, 2.0).real() == doctest::Approx(4.0));
    CHECK(a.x_independent);
    CHECK_THROWS_AS(symbol_from_json(json{{"kind", "mystery"}}), ConfigError);
    // an empty spec falls back to the heat multiplier
    TimeDependentSymbol dflt = symbol_from_json(json::object());
    CHECK(dflt.x_independent);
    CHECK(dflt.at1(0.0, 0.0, 2.0).real() == doctest::Approx(4.0));

    TorusGrid g = grid_from_json(json{{"d", 1}, {"n", 64}, {"L", 20.0}});
    CHECK(g.n == 64);
    CHECK_THROWS_AS(grid_from_json(json{{"d", 1}, {"n", 63}, {"L", 20.0}}), ConfigError);

    GridFunction u = u0_from_json(json{{"type", "constant"}, {"value", 2.0}}, g);
    CHECK(u.values[5] == cplx(2.0, 0.0));
    CHECK_THROWS_AS(u0_from_json(json{{"type", "spline"}}, g), ConfigError);
}

TEST_CASE("evolve: artifacts, metrics, and byte-identical reruns") {
    TempDir dir("evolve");
    json cfg{{"command", "evolve"},
             {"symbol", heat_symbol()},
             {"grid", {{"d", 1}, {"n", 64}, {"L", 20.0}}},
             {"time", {{"s", 0.0}, {"t", 0.5}, {"slices", 4}}},
             {"u0", {{"type", "gaussian"}, {"sigma", 1.0}}}};

    RunResult res = run_command(cfg, dir.str());
    CHECK(res.passed);
    CHECK(res.summary.at("command") == "evolve");
    CHECK(res.summary.at("passed") == true);
    CHECK(res.summary.at("versions").at("ndsym") == kVersion);
    CHECK(res.summary.at("metrics").contains("l2_norm"));
    CHECK(fs::exists(dir.path / "solution.csv"));
    CHECK(fs::exists(dir.path / "summary.json"));

    std::string solution = slurp(dir.path / "solution.csv");
    std::string summary = slurp(dir.path / "summary.json");
    CHECK(solution.rfind("# 1,64,20", 0) == 0); // grid comment header

    TempDir dir2("evolve2");
    run_command(cfg, dir2.str());
    CHECK(slurp(dir2.path / "solution.csv") == solution);
    CHECK(slurp(dir2.path / "summary.json") == summary);
}

TEST_CASE("configuration errors throw before artifacts are written") {
    TempDir dir("cfgerr");
    CHECK_THROWS_AS(run_command(json{{"command", "warp"}}, dir.str()), ConfigError);
    CHECK_THROWS_AS(run_command(json{{"command", 7}}, dir.str()), ConfigError);
    CHECK_THROWS_AS(run_command(json::array(), dir.str()), ConfigError);
    // evolve without a grid
    CHECK_THROWS_AS(run_command(json{{"command", "evolve"}, {"symbol", heat_symbol()}},
                                dir.str()),
                    ConfigError);
    CHECK_FALSE(fs::exists(dir.path / "summary.json"));
}

TEST_CASE("check-symbol passes for a conservative symbol and fails beyond the range") {
    TempDir dir("check");
    json cfg{{"command", "check-symbol"},
             {"symbol", sine_symbol(20.0)},
             {"samples", 5000},
             {"seed", 11}};
    RunResult res = run_command(cfg, dir.str());
    CHECK(res.passed);
    CHECK(res.summary.at("seed") == 11);
    CHECK(fs::exists(dir.path / "report.json"));

    // amp > 1 makes Re a change sign: the assumption screen must fail
    json bad = cfg;
    bad["symbol"]["phi"]["amp"] = 1.5;
    TempDir dir2("check2");
    RunResult res2 = run_command(bad, dir2.str());
    CHECK_FALSE(res2.passed);
    CHECK(res2.summary.at("passed") == false);
    CHECK(fs::exists(dir2.path / "summary.json")); // failed checks still report
}

TEST_CASE("verify-decomposition: multiplier degeneracy gives vanishing residuals") {
    TempDir dir("decomp");
    json cfg{{"command", "verify-decomposition"},
             {"symbol", {{"kind", "multiplier"},
                         {"psi", {{"type", "stable"}, {"alpha", 1.5}, {"scale", 1.0}}},
                         {"m", 1.5},
                         {"m_lower", 1.5}}},
             {"grid", {{"d", 1}, {"n", 32}, {"L", 20.0}}},
             {"time", {{"s", 0.0}, {"t", 0.1}}},
             {"k", 3}};
    RunResult res = run_command(cfg, dir.str());
    CHECK(res.passed);
    double resid = res.summary.at("metrics").at("identity_residual").get<double>();
    CHECK(resid <= 1e-9);
    // k = 3 also exercises the telescoped identity
    CHECK(res.summary.at("metrics").contains("fujiwara_residual"));
    CHECK(res.summary.at("metrics").at("fujiwara_residual").get<double>() <= 1e-9);
    CHECK(fs::exists(dir.path / "report.json"));
}

TEST_CASE("convergence: heat symbol converges and leaves a trace") {
    TempDir dir("conv");
    json cfg{{"command", "convergence"},
             {"symbol", heat_symbol()},
             {"grid", {{"d", 1}, {"n", 64}, {"L", 20.0}}},
             {"time", {{"s", 0.0}, {"t", 0.5}}},
             {"tol", 1e-6}};
    RunResult res = run_command(cfg, dir.str());
    CHECK(res.passed);
    CHECK(fs::exists(dir.path / "trace.csv"));
    CHECK(fs::exists(dir.path / "symbol.csv"));
    std::string trace = slurp(dir.path / "trace.csv");
    CHECK(trace.rfind("k,mesh,delta,runtime_ms", 0) == 0);
    CHECK(res.summary.at("metrics").at("delta_final").get<double>() <= 1e-6);
}

TEST_CASE("kernel: stochastic diagnostics land in the metrics") {
    TempDir dir("kernel");
    json cfg{{"command", "kernel"},
             {"symbol", heat_symbol()},
             {"grid", {{"d", 1}, {"n", 32}, {"L", 20.0}}},
             {"time", {{"s", 0.0}, {"t", 0.25}, {"slices", 2}}},
             {"smoothing", 0.0}};
    RunResult res = run_command(cfg, dir.str());
    CHECK(res.passed);
    CHECK(res.summary.at("metrics").at("row_sum_dev").get<double>() <= 1e-6);
    std::string csv = slurp(dir.path / "kernel.csv");
    CHECK(csv.rfind("# 0,0.25,32,20", 0) == 0);
}

TEST_CASE("sample: ensemble artifacts and seeded determinism") {
    json cfg{{"command", "sample"},
             {"symbol", heat_symbol()},
             {"grid", {{"d", 1}, {"n", 32}, {"L", 20.0}}},
             {"time", {{"s", 0.0}, {"t", 0.5}}},
             {"steps", 2},
             {"smoothing", 0.0},
             {"n_paths", 100},
             {"seed", 77}};
    TempDir dir("sample");
    RunResult res = run_command(cfg, dir.str());
    CHECK(res.passed);
    CHECK(res.summary.at("seed") == 77);
    CHECK(fs::exists(dir.path / "ensemble.csv"));
    CHECK(fs::exists(dir.path / "seed.json"));
    std::string csv = slurp(dir.path / "ensemble.csv");
    CHECK(csv.rfind("path,step,time,x", 0) == 0);

    TempDir dir2("sample2");
    run_command(cfg, dir2.str());
    CHECK(slurp(dir2.path / "ensemble.csv") == csv);
}

TEST_CASE("compose and cross-validate run end to end") {
    TempDir dir("compose");
    json cfg{{"command", "compose"},
             {"symbol", heat_symbol()},
             {"symbol2", {{"kind", "multiplier"},
                          {"psi", {{"type", "stable"}, {"alpha", 1.5}, {"scale", 1.0}}},
                          {"m", 1.5},
                          {"m_lower", 1.5}}},
             {"grid", {{"d", 1}, {"n", 32}, {"L", 20.0}}},
             {"eps", 0.0}};
    RunResult res = run_command(cfg, dir.str());
    CHECK(res.passed);
    CHECK(fs::exists(dir.path / "symbol.csv"));

    TempDir dir2("xval");
    json cfg2{{"command", "cross-validate"},
              {"symbol", sine_symbol(20.0)},
              {"grid", {{"d", 1}, {"n", 32}, {"L", 20.0}}},
              {"time", {{"s", 0.0}, {"t", 0.1}}},
              {"J", 1},
              {"slices", 8},
              {"u0", {{"type", "gaussian"}, {"sigma", 1.0}}},
              {"tol", 0.1}};
    RunResult res2 = run_command(cfg2, dir2.str());
    CHECK(res2.passed);
    CHECK(fs::exists(dir2.path / "cross_validate.csv"));
    std::string csv = slurp(dir2.path / "cross_validate.csv");
    CHECK(csv.rfind("J,k,distance,residual_ts,residual_levi", 0) == 0);
}

TEST_CASE("verify-family summary carries the axiom constants") {
    TempDir dir("family");
    json cfg{{"command", "verify-family"},
             {"symbol", heat_symbol()},
             {"grid", {{"d", 1}, {"n", 64}, {"L", 20.0}}},
             {"time", {{"r", 0.0}, {"s", 0.25}, {"t", 0.5}}},
             {"slices", 2}};
    RunResult res = run_command(cfg, dir.str());
    CHECK(res.passed);
    CHECK(res.summary.at("metrics").contains("chapman_kolmogorov"));
    CHECK(res.summary.at("metrics").at("chapman_kolmogorov").get<double>() <= 1e-8);
}
