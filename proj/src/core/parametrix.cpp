#include "parametrix.hpp"

#include "timeslice.hpp"

#include <cmath>
#include <stdexcept>

namespace ndsym {
namespace {

// periodic 5-point lattice differences in x on a tabulated symbol;
// D_x = -i d_x, D_x^2 = -d_x^2.  Multiplier tables are x-constant, so their
// derivative is identically zero (same layout kept).
DiscreteSymbol Dx_table(const DiscreteSymbol& e, int order) {
    if (e.multiplier) {
        DiscreteSymbol z = e;
        for (auto& v : z.values) v = 0.0;
        return z;
    }
    const TorusGrid& g = e.grid;
    const int n = g.n;
    const double h = g.dx();
    DiscreteSymbol out = DiscreteSymbol::make_dense(g);
    for (int ix = 0; ix < n; ++ix) {
        int m2 = (ix - 2 + n) % n, m1 = (ix - 1 + n) % n;
        int p1 = (ix + 1) % n, p2 = (ix + 2) % n;
        for (int ik = 0; ik < n; ++ik) {
            if (order == 1) {
                cplx d = (e.at(m2, ik) - 8.0 * e.at(m1, ik) + 8.0 * e.at(p1, ik) -
                          e.at(p2, ik)) /
                         (12.0 * h);
                out.ref(ix, ik) = cplx(0.0, -1.0) * d;
            } else {
                cplx d = (-e.at(m2, ik) + 16.0 * e.at(m1, ik) - 30.0 * e.at(ix, ik) +
                          16.0 * e.at(p1, ik) - e.at(p2, ik)) /
                         (12.0 * h * h);
                out.ref(ix, ik) = -d;
            }
        }
    }
    return out;
}

DiscreteSymbol zeros_like(const TimeDependentSymbol& a, const TorusGrid& g) {
    return a.x_independent ? DiscreteSymbol::make_multiplier(g)
                           : DiscreteSymbol::make_dense(g);
}

} // namespace

DiscreteSymbol ParametrixExpansion::sum_at(int r, int J_use) const {
    if (r < 0 || r >= nodes()) throw std::invalid_argument("sum_at: node out of range");
    if (J_use < 0 || J_use > J) throw std::invalid_argument("sum_at: level out of range");
    DiscreteSymbol acc = e[0][r];
    for (int j = 1; j <= J_use; ++j)
        for (std::size_t i = 0; i < acc.values.size(); ++i)
            acc.values[i] += e[j][r].values[i];
    return acc;
}

ParametrixExpansion levi_expansion(const TimeDependentSymbol& a, double s, double t, int J,
                                   int n_time_nodes, const TorusGrid& g, int n_quad) {
    if (a.d != 1 || g.d != 1)
        throw std::invalid_argument("levi_expansion: d = 1 only");
    if (J < 0 || J > 3) throw std::invalid_argument("levi_expansion: J must lie in 0..3");
    if (n_time_nodes < 2) throw std::invalid_argument("levi_expansion: need >= 2 time nodes");
    if (t < s) throw std::invalid_argument("levi_expansion: t < s");

    ParametrixExpansion out;
    out.g = g;
    out.s = s;
    out.t = t;
    out.J = J;
    const int N = n_time_nodes;
    out.tau.resize(N);
    for (int r = 0; r < N; ++r) out.tau[r] = s + (t - s) * r / (N - 1);
    out.tau.back() = t;

    const int n = g.n;
    const int rows = a.x_independent ? 1 : n;
    const std::size_t cells = static_cast<std::size_t>(rows) * n;

    // cumulative integrals C[r] = int_s^{tau_r} a, computed with the same
    // routine frozen_exp_symbol uses so e0 reproduces it bit for bit
    std::vector<std::vector<cplx>> C(N, std::vector<cplx>(cells));
    auto cell_xk = [&](std::size_t c, double& x, double& xi) {
        x = a.x_independent ? 0.0 : g.node1(static_cast<int>(c) / n);
        xi = g.freq1(static_cast<int>(c) % n);
    };
    for (std::size_t c = 0; c < cells; ++c) {
        double x, xi;
        cell_xk(c, x, xi);
        for (int r = 0; r < N; ++r) C[r][c] = time_integral(a, x, xi, s, out.tau[r], n_quad);
    }

    out.e.assign(J + 1, {});
    out.q.assign(J + 1, {});

    // level 0: the frozen exponential at every node
    out.e[0].reserve(N);
    for (int r = 0; r < N; ++r) {
        DiscreteSymbol e0 = zeros_like(a, g);
        for (std::size_t c = 0; c < cells; ++c) e0.values[c] = std::exp(-C[r][c]);
        out.e[0].push_back(std::move(e0));
    }

    // xi-derivative tables of a at the time nodes (cached once when a is
    // time-independent)
    auto deriv_table = [&](double tnode, int order) {
        DiscreteSymbol d = zeros_like(a, g);
        for (std::size_t c = 0; c < cells; ++c) {
            double x, xi;
            cell_xk(c, x, xi);
            d.values[c] = symbol_derivative(a, tnode, x, xi, 0, order);
        }
        return d;
    };
    DiscreteSymbol da1_cached, da2_cached;
    if (a.time_independent) {
        da1_cached = deriv_table(s, 1);
        da2_cached = deriv_table(s, 2);
    }

    const double dtau = (t - s) / (N - 1);
    for (int j = 1; j <= J; ++j) {
        // q_j[r] = d_xi a D_x e_{j-1} + (1/2) d_xi^2 a D_x^2 e_{j-2}
        out.q[j].reserve(N);
        std::vector<DiscreteSymbol> dxe1(N), dxe2;
        for (int r = 0; r < N; ++r) dxe1[r] = Dx_table(out.e[j - 1][r], 1);
        if (j >= 2) {
            dxe2.resize(N);
            for (int r = 0; r < N; ++r) dxe2[r] = Dx_table(out.e[j - 2][r], 2);
        }
        for (int r = 0; r < N; ++r) {
            DiscreteSymbol da1 = a.time_independent ? da1_cached : deriv_table(out.tau[r], 1);
            DiscreteSymbol qr = zeros_like(a, g);
            for (std::size_t c = 0; c < cells; ++c)
                qr.values[c] = da1.values[c] * dxe1[r].values[c];
            if (j >= 2) {
                DiscreteSymbol da2 =
                    a.time_independent ? da2_cached : deriv_table(out.tau[r], 2);
                for (std::size_t c = 0; c < cells; ++c)
                    qr.values[c] += 0.5 * da2.values[c] * dxe2[r].values[c];
            }
            out.q[j].push_back(std::move(qr));
        }

        // e_j[r] = -int_s^{tau_r} exp(-(C[r] - C[rho])) q_j[rho] drho (trapezoid)
        out.e[j].reserve(N);
        for (int r = 0; r < N; ++r) {
            DiscreteSymbol ej = zeros_like(a, g);
            if (r > 0) {
                for (std::size_t c = 0; c < cells; ++c) {
                    cplx acc(0.0);
                    for (int rho = 0; rho <= r; ++rho) {
                        double w = (rho == 0 || rho == r) ? 0.5 : 1.0;
                        acc += w * std::exp(-(C[r][c] - C[rho][c])) * out.q[j][rho].values[c];
                    }
                    ej.values[c] = -dtau * acc;
                }
            }
            out.e[j].push_back(std::move(ej));
        }
    }
    return out;
}

CrossValidateResult cross_validate(const TimeDependentSymbol& a, double s, double t, int J,
                                   int k_slices, const GridFunction& u0, int n_time_nodes,
                                   int n_quad) {
    const TorusGrid& g = u0.grid;
    ParametrixExpansion exp = levi_expansion(a, s, t, J, n_time_nodes, g, n_quad);

    auto pde_residual = [&](const GridFunction& um, const GridFunction& u,
                            const GridFunction& up, double dt_step, double at_time) {
        DiscreteSymbol atab = tabulate_symbol(a, at_time, g);
        GridFunction au = apply_pdo(atab, u);
        GridFunction res(g);
        for (int i = 0; i < g.size(); ++i)
            res.values[i] = (up.values[i] - um.values[i]) / (2.0 * dt_step) + au.values[i];
        return res.l2_norm() / std::max(u.l2_norm(), 1e-300);
    };

    // parametrix residual at the interior node next to t
    auto levi_residual = [&](int J_use) {
        int r = exp.nodes() - 2;
        if (r < 1) return 0.0;
        GridFunction um = apply_pdo(exp.sum_at(r - 1, J_use), u0);
        GridFunction uc = apply_pdo(exp.sum_at(r, J_use), u0);
        GridFunction up = apply_pdo(exp.sum_at(r + 1, J_use), u0);
        double dt_step = exp.tau[r + 1] - exp.tau[r];
        return pde_residual(um, uc, up, dt_step, exp.tau[r]);
    };

    // sliced-solution residual at t via a short backward/forward step
    auto ts_solution = [&](int k) {
        return evolve_time_sliced(a, partition_uniform_slices(s, t, k), u0, n_quad);
    };
    auto ts_residual = [&](int k, const GridFunction& ut) {
        double delta = 1e-2 * (t - s) / k;
        GridFunction um = evolve_time_sliced(a, partition_uniform_slices(s, t - delta, k), u0,
                                             n_quad);
        GridFunction up = evolve_time_sliced(a, partition_uniform_slices(s, t + delta, k), u0,
                                             n_quad);
        return pde_residual(um, ut, up, delta, t);
    };

    CrossValidateResult result;
    GridFunction u_ts_full = ts_solution(k_slices);
    double res_ts_full = ts_residual(k_slices, u_ts_full);
    double norm_ts = std::max(u_ts_full.l2_norm(), 1e-300);

    // depth sweep at the full slice count
    for (int Ju = 0; Ju <= J; ++Ju) {
        GridFunction u_levi = apply_pdo(exp.sum_final(Ju), u0);
        CrossValidateRow row;
        row.J = Ju;
        row.k = k_slices;
        row.distance = l2_distance(u_levi, u_ts_full) / norm_ts;
        row.residual_ts = res_ts_full;
        row.residual_levi = levi_residual(Ju);
        result.rows.push_back(row);
        result.final_distance = row.distance;
    }

    // slice sweep at full depth (coarser slicings for the trend)
    GridFunction u_levi_full = apply_pdo(exp.sum_final(J), u0);
    for (int k = std::max(1, k_slices / 4); k < k_slices; k *= 2) {
        GridFunction u_ts = ts_solution(k);
        CrossValidateRow row;
        row.J = J;
        row.k = k;
        row.distance = l2_distance(u_levi_full, u_ts) / std::max(u_ts.l2_norm(), 1e-300);
        row.residual_ts = ts_residual(k, u_ts);
        row.residual_levi = levi_residual(J);
        result.rows.push_back(row);
    }
    return result;
}

} // namespace ndsym
