#include "runner.hpp"

#include "decomposition.hpp"
#include "markov.hpp"
#include "parametrix.hpp"
#include "pdo.hpp"
#include "timeslice.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ndsym {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const json& need(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing config key: ") + key);
    return j.at(key);
}

double num(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
    return v.get<double>();
}

double num_or(const json& j, const char* key, double dflt) {
    return j.contains(key) ? num(j, key) : dflt;
}

int integer(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    return v.get<int>();
}

int integer_or(const json& j, const char* key, int dflt) {
    return j.contains(key) ? integer(j, key) : dflt;
}

std::uint64_t seed_or(const json& j, const char* key, std::uint64_t dflt) {
    if (!j.contains(key)) return dflt;
    const json& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError("seed must be an integer");
    return v.get<std::uint64_t>();
}

vecd vec_of(const json& v, const char* key) {
    if (!v.is_array()) throw ConfigError(std::string(key) + " must be an array of numbers");
    vecd out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(std::string(key) + " must be numeric");
        out.push_back(e.get<double>());
    }
    return out;
}

void write_text(const fs::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary);
    f << body;
    if (!f) throw std::runtime_error("failed to write " + p.string());
}

std::string csv_grid_function(const GridFunction& u) {
    std::ostringstream os;
    os << "# " << u.grid.d << "," << u.grid.n << "," << fmt(u.grid.L) << "\n";
    for (int i = 0; i < u.grid.size(); ++i)
        os << i << "," << fmt(u.values[i].real()) << "," << fmt(u.values[i].imag()) << "\n";
    return os.str();
}

std::string csv_symbol(const DiscreteSymbol& sym) {
    std::ostringstream os;
    const TorusGrid& g = sym.grid;
    os << "# " << g.d << "," << g.n << "," << fmt(g.L) << "\n";
    // d = 2 multipliers keep the collapsed x-block (ix = 0 only); expanding
    // an x-independent symbol to n^2 x n^2 rows would be pure redundancy
    const int xrows = (g.d == 2 && sym.multiplier) ? 1 : g.size();
    for (int ix = 0; ix < xrows; ++ix)
        for (int ik = 0; ik < g.size(); ++ik) {
            cplx v = sym.at(ix, ik);
            os << ix << "," << ik << "," << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
        }
    return os.str();
}

std::string csv_kernel(const TransitionKernel& K) {
    std::ostringstream os;
    os << "# " << fmt(K.s) << "," << fmt(K.t) << "," << K.grid.n << "," << fmt(K.grid.L)
       << "\n";
    const int N = K.size();
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) os << i << "," << j << "," << fmt(K.at(i, j)) << "\n";
    return os.str();
}

json report_to_json(const Report& rep) {
    json items = json::array();
    for (const CheckItem& it : rep.items)
        items.push_back({{"check", it.check},
                         {"passed", it.passed},
                         {"constant", it.constant},
                         {"witness", it.witness}});
    return items;
}

void merge_metrics(json& metrics, const Report& rep) {
    for (const CheckItem& it : rep.items) metrics[it.check] = it.constant;
}

void check_horizon(const TimeDependentSymbol& a, std::initializer_list<double> times) {
    for (double t : times)
        if (t < 0.0 || t > a.T) throw ConfigError("time outside symbol horizon");
}

LevyTriplet triplet_from_json(const json& spec) {
    LevyTriplet trip;
    trip.d = integer_or(spec, "d", 1);
    trip.kill = num_or(spec, "kill", 0.0);
    trip.drift = spec.contains("drift") ? vec_of(spec.at("drift"), "drift")
                                        : vecd(trip.d, 0.0);
    trip.Q = spec.contains("Q") ? vec_of(spec.at("Q"), "Q")
                                : vecd(static_cast<std::size_t>(trip.d) * trip.d, 0.0);
    if (spec.contains("atoms"))
        for (const auto& at : spec.at("atoms"))
            trip.atoms.push_back({vec_of(need(at, "y"), "y"), num(at, "w")});
    return trip;
}

} // namespace

Psi psi_from_json(const json& spec) {
    std::string type = spec.value("type", "quadratic");
    if (type == "zero") return psi_zero();
    if (type == "quadratic") return psi_quadratic();
    if (type == "stable")
        return psi_stable(num_or(spec, "alpha", 1.5), num_or(spec, "scale", 1.0));
    if (type == "relativistic") return psi_relativistic();
    if (type == "triplet") return psi_from_triplet(triplet_from_json(spec));
    throw ConfigError("unknown psi type: " + type);
}

TimeDependentSymbol symbol_from_json(const json& spec) {
    std::string kind = spec.value("kind", "multiplier");
    double m = num_or(spec, "m", 2.0);
    double m_lower = num_or(spec, "m_lower", m);
    int g = integer_or(spec, "g", 2);
    if (kind == "multiplier") {
        Psi psi = psi_from_json(spec.value("psi", json::object()));
        return symbol_multiplier(psi, m, m_lower, g, integer_or(spec, "d", 1));
    }
    if (kind == "separable") {
        const json& phi = need(spec, "phi");
        return symbol_separable(num_or(phi, "amp", 0.5), num(phi, "freq"),
                                psi_from_json(need(spec, "psi")),
                                num_or(spec, "offset", 0.0), m, m_lower, g);
    }
    if (kind == "triplet_multiplier") {
        LevyTriplet trip = triplet_from_json(need(spec, "triplet"));
        return symbol_multiplier(psi_from_triplet(trip), m, m_lower, g, trip.d);
    }
    throw ConfigError("unknown symbol kind: " + kind);
}

TorusGrid grid_from_json(const json& spec) {
    try {
        return TorusGrid(integer_or(spec, "d", 1), integer(spec, "n"), num(spec, "L"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

GridFunction u0_from_json(const json& spec, const TorusGrid& g) {
    std::string type = spec.value("type", "gaussian");
    GridFunction u(g);
    if (type == "gaussian") {
        double sigma = num_or(spec, "sigma", 1.0);
        double center = num_or(spec, "center", 0.0);
        if (!(sigma > 0.0)) throw ConfigError("u0 sigma must be positive");
        for (int i = 0; i < g.size(); ++i) {
            vecd x = g.node(i);
            double q = 0.0;
            for (double xc : x) q += (xc - center) * (xc - center);
            u.values[i] = std::exp(-0.5 * q / (sigma * sigma));
        }
        return u;
    }
    if (type == "constant") {
        double value = num_or(spec, "value", 1.0);
        for (auto& v : u.values) v = value;
        return u;
    }
    if (type == "mode") {
        int k = integer(spec, "k");
        for (int i = 0; i < g.size(); ++i) {
            vecd x = g.node(i);
            double phase = 0.0;
            for (double xc : x) phase += k * g.dxi() * xc;
            u.values[i] = std::polar(1.0, phase);
        }
        return u;
    }
    throw ConfigError("unknown u0 type: " + type);
}

namespace {

struct CommandIO {
    const json& config;
    fs::path out;
    json metrics = json::object();
    json extra = json::object(); // merged into summary verbatim
    bool passed = true;
};

void cmd_check_symbol(CommandIO& io) {
    TimeDependentSymbol a = symbol_from_json(need(io.config, "symbol"));
    int n_samples = integer_or(io.config, "samples", 20000);
    double box = num_or(io.config, "box", 8.0);
    std::uint64_t seed = seed_or(io.config, "seed", 1);
    Report ndf = verify_ndf_properties(a.psi_ref, a.d, n_samples, box, seed);

    Report assumptions;
    if (a.d == 1) {
        SampleBox sb;
        if (io.config.contains("sample_box")) {
            const json& b = io.config.at("sample_box");
            sb.x_lo = num_or(b, "x_lo", sb.x_lo);
            sb.x_hi = num_or(b, "x_hi", sb.x_hi);
            sb.xi_lo = num_or(b, "xi_lo", sb.xi_lo);
            sb.xi_hi = num_or(b, "xi_hi", sb.xi_hi);
            sb.nx = integer_or(b, "nx", sb.nx);
            sb.nxi = integer_or(b, "nxi", sb.nxi);
        }
        assumptions = check_assumptions(a, sb);
    }

    json rep;
    rep["ndf"] = report_to_json(ndf);
    rep["assumptions"] = report_to_json(assumptions);
    write_text(io.out / "report.json", rep.dump(2) + "\n");
    merge_metrics(io.metrics, ndf);
    merge_metrics(io.metrics, assumptions);
    io.passed = ndf.passed && assumptions.passed;
    io.extra["seed"] = seed;
}

void cmd_evolve(CommandIO& io) {
    TimeDependentSymbol a = symbol_from_json(need(io.config, "symbol"));
    TorusGrid g = grid_from_json(need(io.config, "grid"));
    Partition pi;
    if (io.config.contains("partition")) {
        try {
            pi = partition_explicit(vec_of(io.config, "partition"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else {
        double s = num_or(io.config, "s", 0.0), t = num(io.config, "t");
        pi = partition_uniform_slices(s, t, integer_or(io.config, "slices", 1));
    }
    check_horizon(a, {pi.s(), pi.t()});
    int n_quad = integer_or(io.config, "n_quad", 8);
    GridFunction u0 = u0_from_json(io.config.value("u0", json::object()), g);
    GridFunction u = evolve_time_sliced(a, pi, u0, n_quad);
    write_text(io.out / "solution.csv", csv_grid_function(u));
    io.metrics["l2_norm"] = u.l2_norm();
    io.metrics["sup_norm"] = u.sup_norm();
}

void cmd_compose(CommandIO& io) {
    TimeDependentSymbol b = symbol_from_json(need(io.config, "symbol"));
    TimeDependentSymbol c = symbol_from_json(need(io.config, "symbol2"));
    TorusGrid g = grid_from_json(need(io.config, "grid"));
    double t = num_or(io.config, "t", 0.0);
    double eps = num_or(io.config, "eps", 1e-3);
    DiscreteSymbol out = compose_kn(tabulate_symbol(b, t, g), tabulate_symbol(c, t, g), eps);
    write_text(io.out / "symbol.csv", csv_symbol(out));
    io.metrics["sup_norm"] = out.sup_norm();
}

void cmd_kernel(CommandIO& io) {
    TimeDependentSymbol a = symbol_from_json(need(io.config, "symbol"));
    TorusGrid g = grid_from_json(need(io.config, "grid"));
    double s = num_or(io.config, "s", 0.0), t = num(io.config, "t");
    check_horizon(a, {s, t});
    TransitionKernel K =
        transition_kernel(a, g, s, t, integer_or(io.config, "slices", 16),
                          num_or(io.config, "smoothing", 1.0),
                          integer_or(io.config, "n_quad", 8));
    write_text(io.out / "kernel.csv", csv_kernel(K));
    io.metrics["row_sum_dev"] = K.row_sum_dev;
    io.metrics["min_entry"] = K.min_entry;
    io.metrics["max_imag"] = K.max_imag;
}

void cmd_sample(CommandIO& io) {
    TimeDependentSymbol a = symbol_from_json(need(io.config, "symbol"));
    TorusGrid g = grid_from_json(need(io.config, "grid"));
    double s = num_or(io.config, "s", 0.0), t = num(io.config, "t");
    check_horizon(a, {s, t});
    int steps = integer_or(io.config, "steps", 8);
    if (steps < 1) throw ConfigError("steps must be >= 1");
    int slices = integer_or(io.config, "slices_per_step", 1);
    double smoothing = num_or(io.config, "smoothing", 1.0);
    int n_quad = integer_or(io.config, "n_quad", 8);
    int n_paths = integer_or(io.config, "n_paths", 1000);
    double x0 = num_or(io.config, "x0", 0.0);
    std::uint64_t seed = seed_or(io.config, "seed", 0);

    std::vector<TransitionKernel> chain;
    for (int m = 0; m < steps; ++m) {
        double ta = s + (t - s) * m / steps;
        double tb = m + 1 == steps ? t : s + (t - s) * (m + 1) / steps;
        chain.push_back(transition_kernel(a, g, ta, tb, slices, smoothing, n_quad));
    }
    PathEnsemble ens = sample_paths(chain, x0, n_paths, seed);

    std::ostringstream os;
    os << "path,step,time,x\n";
    for (int p = 0; p < ens.n_paths(); ++p)
        for (int c = 0; c < ens.n_columns(); ++c)
            os << p << "," << c << "," << fmt(ens.times[c]) << ","
               << fmt(ens.position(p, c)) << "\n";
    write_text(io.out / "ensemble.csv", os.str());

    json sidecar;
    sidecar["seed"] = seed;
    sidecar["clamped_mass"] = ens.clamped_mass;
    write_text(io.out / "seed.json", sidecar.dump(2) + "\n");

    double mean = 0.0, var = 0.0;
    int last = ens.n_columns() - 1;
    for (int p = 0; p < ens.n_paths(); ++p) mean += ens.position(p, last);
    mean /= ens.n_paths();
    for (int p = 0; p < ens.n_paths(); ++p) {
        double d = ens.position(p, last) - mean;
        var += d * d;
    }
    var /= ens.n_paths();
    io.metrics["clamped_mass"] = ens.clamped_mass;
    io.metrics["mean_final"] = mean;
    io.metrics["variance_final"] = var;
    io.extra["seed"] = seed;
}

void cmd_verify_decomposition(CommandIO& io) {
    TimeDependentSymbol a = symbol_from_json(need(io.config, "symbol"));
    TorusGrid g = grid_from_json(need(io.config, "grid"));
    double s = num_or(io.config, "s", 0.0), t = num(io.config, "t");
    check_horizon(a, {s, t});
    int k = integer_or(io.config, "k", 1);
    double tol = num_or(io.config, "tol", 1e-3);
    int n_theta = integer_or(io.config, "n_theta", 8);
    int n_quad = integer_or(io.config, "n_quad", 8);

    Partition pi = partition_uniform(s, t, k);
    KeyLemmaReport rep = verify_key_lemma(a, pi, g, tol, n_theta, n_quad);
    io.metrics["identity_residual"] = rep.identity_residual;
    json checks = json::array();
    for (const ScalingCheck& c : rep.scaling) {
        checks.push_back({{"name", c.name},
                          {"value", c.value},
                          {"lo", c.lo},
                          {"hi", c.hi},
                          {"passed", c.passed}});
        io.metrics[c.name] = c.value;
    }
    io.passed = rep.passed;

    json out;
    out["key_lemma"] = {{"identity_residual", rep.identity_residual},
                        {"passed", rep.passed},
                        {"scaling", checks}};
    if (k == 3) {
        FujiwaraReport fr = verify_fujiwara(a, pi, g, tol, n_theta, n_quad);
        io.metrics["fujiwara_residual"] = fr.identity_residual;
        io.passed = io.passed && fr.passed;
        json terms = json::array();
        for (const RemainderTerm& term : fr.terms) {
            json seq = json::array();
            for (int ji : term.sequence) seq.push_back(ji);
            terms.push_back({{"sequence", seq}, {"sup_norm", term.sup_norm}});
        }
        out["fujiwara"] = {{"identity_residual", fr.identity_residual},
                           {"passed", fr.passed},
                           {"terms", terms}};
    }
    write_text(io.out / "report.json", out.dump(2) + "\n");
}

void cmd_verify_family(CommandIO& io) {
    TimeDependentSymbol a = symbol_from_json(need(io.config, "symbol"));
    TorusGrid g = grid_from_json(need(io.config, "grid"));
    double r = num_or(io.config, "r", 0.0);
    double s = num(io.config, "s"), t = num(io.config, "t");
    check_horizon(a, {r, s, t});
    Report rep = verify_evolution_family(a, g, r, s, t, integer_or(io.config, "slices", 16),
                                         integer_or(io.config, "n_quad", 8));
    write_text(io.out / "report.json", report_to_json(rep).dump(2) + "\n");
    merge_metrics(io.metrics, rep);
    io.passed = rep.passed;
}

void cmd_convergence(CommandIO& io) {
    TimeDependentSymbol a = symbol_from_json(need(io.config, "symbol"));
    TorusGrid g = grid_from_json(need(io.config, "grid"));
    double s = num_or(io.config, "s", 0.0), t = num(io.config, "t");
    check_horizon(a, {s, t});
    PlimResult res =
        plim_extrapolate(a, s, t, g, num_or(io.config, "tol", 1e-6),
                         integer_or(io.config, "k_max", 64),
                         num_or(io.config, "eps", 0.0), integer_or(io.config, "n_quad", 8));

    std::ostringstream os;
    os << "k,mesh,delta,runtime_ms\n";
    for (const PlimTraceRow& row : res.trace)
        os << row.k << "," << fmt(row.mesh) << "," << fmt(row.delta) << ","
           << fmt(row.runtime_ms) << "\n";
    write_text(io.out / "trace.csv", os.str());
    write_text(io.out / "symbol.csv", csv_symbol(res.p));

    io.passed = res.converged;
    io.metrics["levels"] = static_cast<int>(res.trace.size());
    if (!res.trace.empty()) {
        io.metrics["k_final"] = res.trace.back().k;
        io.metrics["delta_final"] = res.trace.back().delta;
    }
}

void cmd_cross_validate(CommandIO& io) {
    TimeDependentSymbol a = symbol_from_json(need(io.config, "symbol"));
    TorusGrid g = grid_from_json(need(io.config, "grid"));
    double s = num_or(io.config, "s", 0.0), t = num(io.config, "t");
    check_horizon(a, {s, t});
    int J = integer_or(io.config, "J", 2);
    int k = integer_or(io.config, "slices", 32);
    GridFunction u0 = u0_from_json(io.config.value("u0", json::object()), g);
    CrossValidateResult res =
        cross_validate(a, s, t, J, k, u0, integer_or(io.config, "n_time_nodes", 33),
                       integer_or(io.config, "n_quad", 8));

    std::ostringstream os;
    os << "J,k,distance,residual_ts,residual_levi\n";
    for (const CrossValidateRow& row : res.rows)
        os << row.J << "," << row.k << "," << fmt(row.distance) << ","
           << fmt(row.residual_ts) << "," << fmt(row.residual_levi) << "\n";
    write_text(io.out / "cross_validate.csv", os.str());

    io.metrics["final_distance"] = res.final_distance;
    if (io.config.contains("tol"))
        io.passed = res.final_distance <= num(io.config, "tol");
}

} // namespace

RunResult run_command(const json& config_in, const std::string& out_dir) {
    if (!config_in.is_object()) throw ConfigError("config must be a JSON object");
    std::string command;
    try {
        command = need(config_in, "command").get<std::string>();
    } catch (const json::exception&) {
        throw ConfigError("command must be a string");
    }

    // time parameters may be grouped under "time"; flatten them for the handlers
    json config = config_in;
    if (config.contains("time")) {
        const json& tm = config.at("time");
        if (!tm.is_object()) throw ConfigError("\"time\" must be an object");
        for (auto it = tm.begin(); it != tm.end(); ++it) config[it.key()] = it.value();
        config.erase("time");
    }

    using Handler = void (*)(CommandIO&);
    struct Entry {
        const char* name;
        Handler fn;
    };
    static constexpr Entry table[] = {
        {"check-symbol", cmd_check_symbol},
        {"evolve", cmd_evolve},
        {"compose", cmd_compose},
        {"kernel", cmd_kernel},
        {"sample", cmd_sample},
        {"verify-decomposition", cmd_verify_decomposition},
        {"verify-family", cmd_verify_family},
        {"convergence", cmd_convergence},
        {"cross-validate", cmd_cross_validate},
    };
    Handler handler = nullptr;
    for (const Entry& e : table)
        if (command == e.name) handler = e.fn;
    if (!handler) throw ConfigError("unknown command: " + command);

    fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir);

    CommandIO io{config, out, json::object(), json::object(), true};
    std::string error;
    try {
        handler(io);
    } catch (const json::exception& e) {
        throw ConfigError(e.what()); // malformed value inside the config
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument&) {
        throw; // bad parameters are configuration errors, not check failures
    } catch (const std::exception& e) {
        io.passed = false; // a check-level failure (e.g. kernel diagnostics)
        error = e.what();
    }

    RunResult result;
    result.passed = io.passed;
    result.summary["command"] = command;
    result.summary["passed"] = io.passed;
    result.summary["metrics"] = io.metrics;
    result.summary["seed"] =
        io.extra.contains("seed") ? io.extra.at("seed") : json(nullptr);
    result.summary["versions"] = {{"ndsym", kVersion}};
    if (!error.empty()) result.summary["error"] = error;
    write_text(out / "summary.json", result.summary.dump(2) + "\n");
    return result;
}

} // namespace ndsym
