#include "timeslice.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ndsym {

double Partition::mesh() const {
    double m = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) m = std::max(m, times[i] - times[i - 1]);
    return m;
}

static void validate_times(const vecd& times) {
    if (times.size() < 2)
        throw std::invalid_argument("partition: need at least two nodes");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] < times[i - 1])
            throw std::invalid_argument("partition: nodes must be nondecreasing");
}

Partition partition_uniform(double s, double t, int interior) {
    if (interior < 0) throw std::invalid_argument("partition_uniform: interior < 0");
    return partition_uniform_slices(s, t, interior + 1);
}

Partition partition_uniform_slices(double s, double t, int slices) {
    if (slices < 1) throw std::invalid_argument("partition: need at least one slice");
    if (t < s) throw std::invalid_argument("partition: t < s");
    Partition pi;
    pi.times.resize(slices + 1);
    for (int i = 0; i <= slices; ++i)
        pi.times[i] = s + (t - s) * static_cast<double>(i) / slices;
    pi.times.back() = t;
    return pi;
}

Partition partition_explicit(vecd times) {
    validate_times(times);
    Partition pi;
    pi.times = std::move(times);
    return pi;
}

Partition partition_refine(const Partition& parent, int splits) {
    if (splits < 1) throw std::invalid_argument("partition_refine: splits < 1");
    validate_times(parent.times);
    Partition pi;
    pi.times.push_back(parent.times.front());
    for (std::size_t i = 1; i < parent.times.size(); ++i) {
        double a = parent.times[i - 1], b = parent.times[i];
        for (int j = 1; j <= splits; ++j)
            pi.times.push_back(a + (b - a) * static_cast<double>(j) / splits);
    }
    return pi;
}

bool is_refinement(const Partition& coarse, const Partition& fine, double tol) {
    if (std::abs(coarse.s() - fine.s()) > tol || std::abs(coarse.t() - fine.t()) > tol)
        return false;
    std::size_t j = 0;
    for (double node : coarse.times) {
        while (j < fine.times.size() && fine.times[j] < node - tol) ++j;
        if (j >= fine.times.size() || std::abs(fine.times[j] - node) > tol) return false;
    }
    return true;
}

GridFunction evolve_time_sliced(const TimeDependentSymbol& a, const Partition& pi,
                                const GridFunction& u0, int n_quad) {
    validate_times(pi.times);
    GridFunction u = u0;
    // right to left: the latest slice acts on u first
    for (int j = pi.intervals() - 1; j >= 0; --j) {
        double ta = pi.times[j], tb = pi.times[j + 1];
        if (tb <= ta) continue; // zero-length slice contributes the identity
        DiscreteSymbol p = frozen_exp_symbol(a, ta, tb, u.grid, n_quad);
        u = apply_pdo(p, u);
    }
    return u;
}

DiscreteSymbol sliced_symbol(const TimeDependentSymbol& a, const Partition& pi,
                             const TorusGrid& g, double eps, int n_quad) {
    validate_times(pi.times);
    DiscreteSymbol acc;
    bool have = false;
    for (int j = 0; j < pi.intervals(); ++j) {
        double ta = pi.times[j], tb = pi.times[j + 1];
        if (tb <= ta) continue;
        DiscreteSymbol p = frozen_exp_symbol(a, ta, tb, g, n_quad);
        acc = have ? compose_kn(acc, p, eps) : std::move(p);
        have = true;
    }
    if (!have) {
        // degenerate window: the identity symbol
        DiscreteSymbol one = DiscreteSymbol::make_multiplier(g);
        for (auto& v : one.values) v = 1.0;
        return one;
    }
    return acc;
}

static double weighted_sup_diff(const DiscreteSymbol& p, const DiscreteSymbol& q,
                                const Psi& psi, double weight_power) {
    const TorusGrid& g = p.grid;
    double sup = 0.0;
    int rows = (p.multiplier && q.multiplier) ? 1 : g.n;
    for (int ix = 0; ix < rows; ++ix)
        for (int ik = 0; ik < g.size(); ++ik) {
            double w = std::pow(1.0 + psi(g.freq(ik)).real(), 0.5 * weight_power);
            sup = std::max(sup, std::abs(p.at(ix, ik) - q.at(ix, ik)) * w);
        }
    return sup;
}

double refinement_delta(const TimeDependentSymbol& a, const Partition& pi,
                        const Partition& pi_fine, const TorusGrid& g, double eps,
                        int n_quad) {
    if (!is_refinement(pi, pi_fine))
        throw std::invalid_argument("refinement_delta: second partition must refine the first");
    DiscreteSymbol p = sliced_symbol(a, pi, g, eps, n_quad);
    DiscreteSymbol q = sliced_symbol(a, pi_fine, g, eps, n_quad);
    return weighted_sup_diff(p, q, a.psi_ref, -2.0 * a.m);
}

PlimResult plim_extrapolate(const TimeDependentSymbol& a, double s, double t,
                            const TorusGrid& g, double tol, int k_max, double eps,
                            int n_quad) {
    if (k_max < 1) throw std::invalid_argument("plim_extrapolate: k_max < 1");
    PlimResult result;
    DiscreteSymbol prev;
    bool have_prev = false;
    for (int slices = 1; slices <= k_max; slices *= 2) {
        auto tic = std::chrono::steady_clock::now();
        Partition pi = partition_uniform_slices(s, t, slices);
        DiscreteSymbol p = sliced_symbol(a, pi, g, eps, n_quad);
        double delta = std::numeric_limits<double>::quiet_NaN();
        if (have_prev) delta = weighted_sup_diff(p, prev, a.psi_ref, -2.0 * a.m);
        auto toc = std::chrono::steady_clock::now();
        PlimTraceRow row;
        row.k = slices;
        row.mesh = pi.mesh();
        row.delta = delta;
        row.runtime_ms = std::chrono::duration<double, std::milli>(toc - tic).count();
        result.trace.push_back(row);
        prev = std::move(p);
        have_prev = true;
        if (!std::isnan(delta) && delta < tol) {
            result.converged = true;
            break;
        }
    }
    result.p = std::move(prev);
    return result;
}

} // namespace ndsym
