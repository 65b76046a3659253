#include "ndsym/ndsym.h"

#include "core/markov.hpp"
#include "core/runner.hpp"
#include "core/timeslice.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

struct ndsym_symbol {
    ndsym::TimeDependentSymbol a;
};
struct ndsym_grid {
    ndsym::TorusGrid g;
};
struct ndsym_kernel {
    ndsym::TransitionKernel k;
};

namespace {

thread_local std::string g_last_error;

ndsym_status fail(ndsym_status st, const std::string& what) {
    g_last_error = what;
    return st;
}

template <typename Fn>
ndsym_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const ndsym::ConfigError& e) {
        return fail(NDSYM_ERR_CONFIG, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(NDSYM_ERR_CONFIG, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(NDSYM_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(NDSYM_ERR_RUNTIME, e.what());
    }
}

ndsym_status require(bool ok, const char* what) {
    return ok ? NDSYM_OK : fail(NDSYM_ERR_INVALID_ARGUMENT, what);
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* ndsym_version(void) { return ndsym::kVersion; }

const char* ndsym_last_error(void) { return g_last_error.c_str(); }

ndsym_status ndsym_symbol_create(const char* spec_json, ndsym_symbol** out) {
    if (require(spec_json && out, "null argument") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        nlohmann::json spec = nlohmann::json::parse(spec_json);
        *out = new ndsym_symbol{ndsym::symbol_from_json(spec)};
        return NDSYM_OK;
    });
}

void ndsym_symbol_destroy(ndsym_symbol* sym) { delete sym; }

ndsym_status ndsym_symbol_eval(const ndsym_symbol* sym, double t, const double* x,
                               const double* xi, int d, double* re, double* im) {
    if (require(sym && x && xi && re && im, "null argument") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    if (require(d == sym->a.d, "dimension mismatch") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        ndsym::vecd vx(x, x + d), vxi(xi, xi + d);
        ndsym::cplx v = sym->a(t, vx, vxi);
        *re = v.real();
        *im = v.imag();
        return NDSYM_OK;
    });
}

ndsym_status ndsym_grid_create(int d, int n, double L, ndsym_grid** out) {
    if (require(out != nullptr, "null argument") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new ndsym_grid{ndsym::TorusGrid(d, n, L)};
        return NDSYM_OK;
    });
}

void ndsym_grid_destroy(ndsym_grid* grid) { delete grid; }

ndsym_status ndsym_evolve(const ndsym_symbol* sym, const ndsym_grid* grid, double s,
                          double t, int slices, int n_quad, const double* u0, double* out) {
    if (require(sym && grid && u0 && out, "null argument") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        ndsym::GridFunction u(grid->g);
        for (int i = 0; i < grid->g.size(); ++i)
            u.values[i] = ndsym::cplx(u0[2 * i], u0[2 * i + 1]);
        ndsym::GridFunction v = ndsym::evolve_time_sliced(
            sym->a, ndsym::partition_uniform_slices(s, t, slices), u, n_quad);
        for (int i = 0; i < grid->g.size(); ++i) {
            out[2 * i] = v.values[i].real();
            out[2 * i + 1] = v.values[i].imag();
        }
        return NDSYM_OK;
    });
}

ndsym_status ndsym_kernel_build(const ndsym_symbol* sym, const ndsym_grid* grid, double s,
                                double t, int slices, double smoothing, int n_quad,
                                ndsym_kernel** out) {
    if (require(sym && grid && out, "null argument") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        *out = new ndsym_kernel{
            ndsym::transition_kernel(sym->a, grid->g, s, t, slices, smoothing, n_quad)};
        return NDSYM_OK;
    });
}

void ndsym_kernel_destroy(ndsym_kernel* kernel) { delete kernel; }

int ndsym_kernel_size(const ndsym_kernel* kernel) {
    return kernel ? kernel->k.size() : 0;
}

ndsym_status ndsym_kernel_get(const ndsym_kernel* kernel, int i, int j, double* p) {
    if (require(kernel && p, "null argument") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    if (require(i >= 0 && j >= 0 && i < kernel->k.size() && j < kernel->k.size(),
                "kernel index out of range") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    *p = kernel->k.at(i, j);
    return NDSYM_OK;
}

ndsym_status ndsym_sample_paths(const ndsym_symbol* sym, const ndsym_grid* grid, double s,
                                double t, int steps, int slices_per_step, double smoothing,
                                double x0, int n_paths, unsigned long long seed,
                                double* positions) {
    if (require(sym && grid && positions, "null argument") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    if (require(steps >= 1, "steps must be >= 1") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        std::vector<ndsym::TransitionKernel> chain;
        for (int m = 0; m < steps; ++m) {
            double ta = s + (t - s) * m / steps;
            double tb = m + 1 == steps ? t : s + (t - s) * (m + 1) / steps;
            chain.push_back(ndsym::transition_kernel(sym->a, grid->g, ta, tb,
                                                     slices_per_step, smoothing));
        }
        ndsym::PathEnsemble ens = ndsym::sample_paths(chain, x0, n_paths, seed);
        for (int p = 0; p < ens.n_paths(); ++p)
            for (int c = 0; c < ens.n_columns(); ++c)
                positions[static_cast<std::size_t>(p) * ens.n_columns() + c] =
                    ens.position(p, c);
        return NDSYM_OK;
    });
}

ndsym_status ndsym_run_json(const char* config_json, const char* out_dir,
                            char** summary_json) {
    if (require(config_json && out_dir, "null argument") != NDSYM_OK)
        return NDSYM_ERR_INVALID_ARGUMENT;
    if (summary_json) *summary_json = nullptr;
    return guarded([&] {
        nlohmann::json config = nlohmann::json::parse(config_json);
        ndsym::RunResult result = ndsym::run_command(config, out_dir);
        if (summary_json) *summary_json = dup_string(result.summary.dump(2) + "\n");
        if (!result.passed)
            return fail(NDSYM_ERR_CHECK_FAILED, "one or more checks failed");
        return NDSYM_OK;
    });
}

void ndsym_string_free(char* s) { std::free(s); }

} // extern "C"
