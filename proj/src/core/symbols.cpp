#include "symbols.hpp"

#include "quadrature.hpp"
#include "rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ndsym {

// ======================================================================
// Levy triplets
// ======================================================================

LevyTriplet LevyTriplet::quadratic(int d) {
    LevyTriplet t;
    t.d = d;
    t.drift.assign(d, 0.0);
    t.Q.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) t.Q[static_cast<std::size_t>(i) * d + i] = 2.0;
    return t;
}

LevyTriplet LevyTriplet::killing(double c, int d) {
    LevyTriplet t;
    t.d = d;
    t.kill = c;
    t.drift.assign(d, 0.0);
    t.Q.assign(static_cast<std::size_t>(d) * d, 0.0);
    return t;
}

cplx eval_levy_khintchine(const LevyTriplet& trip, const vecd& xi) {
    const int d = trip.d;
    if (static_cast<int>(xi.size()) != d)
        throw std::invalid_argument("eval_levy_khintchine: xi dimension mismatch");

    double drift_dot = 0.0;
    for (int i = 0; i < d; ++i) drift_dot += trip.drift[i] * xi[i];

    double quad = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            quad += xi[i] * trip.Q[static_cast<std::size_t>(i) * d + j] * xi[j];

    cplx acc(trip.kill + 0.5 * quad, drift_dot);
    for (const LevyAtom& atom : trip.atoms) {
        double xy = 0.0, y2 = 0.0;
        for (int i = 0; i < d; ++i) {
            xy += xi[i] * atom.y[i];
            y2 += atom.y[i] * atom.y[i];
        }
        // w * (1 - e^{i xi.y} + i xi.y / (1 + |y|^2))
        acc += atom.w * (cplx(1.0, 0.0) - std::polar(1.0, xy) + cplx(0.0, xy / (1.0 + y2)));
    }
    return acc;
}

// ======================================================================
// psi builders
// ======================================================================

static double sq_norm(const vecd& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

Psi psi_zero() {
    Psi p;
    p.name = "zero";
    p.eval = [](const vecd&) { return cplx(0.0); };
    p.eval1 = [](double) { return cplx(0.0); };
    p.deriv1 = [](double, int) { return cplx(0.0); };
    return p;
}

Psi psi_quadratic() {
    Psi p;
    p.name = "quadratic";
    p.eval = [](const vecd& xi) { return cplx(sq_norm(xi)); };
    p.eval1 = [](double xi) { return cplx(xi * xi); };
    p.deriv1 = [](double xi, int k) {
        if (k == 1) return cplx(2.0 * xi);
        if (k == 2) return cplx(2.0);
        return cplx(0.0);
    };
    return p;
}

Psi psi_stable(double alpha, double scale) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::invalid_argument("psi_stable: alpha must lie in (0, 2]");
    Psi p;
    p.name = "stable";
    p.eval = [alpha, scale](const vecd& xi) {
        return cplx(scale * std::pow(std::sqrt(sq_norm(xi)), alpha));
    };
    p.eval1 = [alpha, scale](double xi) { return cplx(scale * std::pow(std::abs(xi), alpha)); };
    p.deriv1 = [alpha, scale](double xi, int k) {
        if (xi == 0.0) return cplx(0.0); // kink at the origin; callers pair with vanishing factors
        double s = xi > 0 ? 1.0 : -1.0;
        if (k == 1) return cplx(scale * alpha * s * std::pow(std::abs(xi), alpha - 1.0));
        if (k == 2) return cplx(scale * alpha * (alpha - 1.0) * std::pow(std::abs(xi), alpha - 2.0));
        return cplx(0.0);
    };
    return p;
}

Psi psi_relativistic() {
    Psi p;
    p.name = "relativistic";
    p.eval = [](const vecd& xi) { return cplx(std::sqrt(1.0 + sq_norm(xi)) - 1.0); };
    p.eval1 = [](double xi) { return cplx(std::sqrt(1.0 + xi * xi) - 1.0); };
    p.deriv1 = [](double xi, int k) {
        double r = std::sqrt(1.0 + xi * xi);
        if (k == 1) return cplx(xi / r);
        if (k == 2) return cplx(1.0 / (r * r * r));
        return cplx(0.0);
    };
    return p;
}

Psi psi_from_triplet(const LevyTriplet& trip) {
    Psi p;
    p.name = "triplet";
    p.eval = [trip](const vecd& xi) { return eval_levy_khintchine(trip, xi); };
    if (trip.d == 1) {
        p.eval1 = [trip](double xi) { return eval_levy_khintchine(trip, {xi}); };
        p.deriv1 = [trip](double xi, int k) {
            // analytic derivatives of the one-dimensional Levy-Khintchine formula
            cplx acc(0.0);
            if (k == 1) {
                acc = cplx(trip.Q[0] * xi, trip.drift[0]);
                for (const LevyAtom& atom : trip.atoms) {
                    double y = atom.y[0];
                    acc += atom.w * (cplx(0.0, -y) * std::polar(1.0, xi * y) +
                                     cplx(0.0, y / (1.0 + y * y)));
                }
            } else if (k == 2) {
                acc = cplx(trip.Q[0]);
                for (const LevyAtom& atom : trip.atoms) {
                    double y = atom.y[0];
                    acc += atom.w * y * y * std::polar(1.0, xi * y);
                }
            }
            return acc;
        };
    } else {
        p.eval1 = [](double) -> cplx {
            throw std::invalid_argument("psi_from_triplet: eval1 needs d = 1");
        };
    }
    return p;
}

// ======================================================================
// symbol builders
// ======================================================================

TimeDependentSymbol symbol_multiplier(const Psi& psi, double m, double m_lower, int g, int d) {
    TimeDependentSymbol a;
    a.d = d;
    a.m = m;
    a.m_lower = m_lower;
    a.g = g;
    a.x_independent = true;
    a.time_independent = true;
    a.psi_ref = psi;
    a.eval_any = [psi](double, const vecd&, const vecd& xi) { return psi(xi); };
    a.eval1 = [psi](double, double, double xi) { return psi.at1(xi); };
    if (psi.deriv1)
        a.deriv1 = [psi](double, double, double xi, int i, int j) {
            if (i > 0) return cplx(0.0);
            return j == 0 ? psi.at1(xi) : psi.deriv1(xi, j);
        };
    return a;
}

TimeDependentSymbol symbol_separable(double amp, double freq, const Psi& psi, double offset,
                                     double m, double m_lower, int g) {
    TimeDependentSymbol a;
    a.d = 1;
    a.m = m;
    a.m_lower = m_lower;
    a.g = g;
    a.x_independent = (amp == 0.0);
    a.time_independent = true;
    a.psi_ref = psi;
    auto phi = [amp, freq](double x, int i) {
        switch (i) {
            case 0: return 1.0 + amp * std::sin(freq * x);
            case 1: return amp * freq * std::cos(freq * x);
            case 2: return -amp * freq * freq * std::sin(freq * x);
            default: throw std::invalid_argument("separable phi: derivative order > 2");
        }
    };
    a.eval1 = [phi, psi, offset](double, double x, double xi) {
        return phi(x, 0) * (offset + psi.at1(xi));
    };
    a.eval_any = [phi, psi, offset](double, const vecd& x, const vecd& xi) {
        return phi(x[0], 0) * (offset + psi(xi));
    };
    if (psi.deriv1)
        a.deriv1 = [phi, psi, offset](double, double x, double xi, int i, int j) {
            cplx xi_part = j == 0 ? offset + psi.at1(xi) : psi.deriv1(xi, j);
            return phi(x, i) * xi_part;
        };
    return a;
}

TimeDependentSymbol symbol_custom(std::function<cplx(double, double, double)> f,
                                  const Psi& psi_ref, double m, double m_lower, int g,
                                  bool x_independent, bool time_independent) {
    TimeDependentSymbol a;
    a.d = 1;
    a.m = m;
    a.m_lower = m_lower;
    a.g = g;
    a.x_independent = x_independent;
    a.time_independent = time_independent;
    a.psi_ref = psi_ref;
    a.eval1 = f;
    a.eval_any = [f](double t, const vecd& x, const vecd& xi) { return f(t, x[0], xi[0]); };
    return a;
}

cplx symbol_derivative(const TimeDependentSymbol& a, double t, double x, double xi, int i,
                       int j) {
    // plain partial derivatives dx^i dxi^j (callers convert to D = -i d where needed)
    if (a.deriv1) return a.deriv1(t, x, xi, i, j);
    auto in_xi = [&](double x0) {
        return fd_central([&](double z) { return a.at1(t, x0, z); }, xi, j, fd_step(xi, i + j));
    };
    return fd_central([&](double z) { return in_xi(z); }, x, i, fd_step(x, i + j));
}

cplx time_integral(const TimeDependentSymbol& a, double x, double xi, double ta, double tb,
                   int n_quad) {
    if (a.time_independent) return (tb - ta) * a.at1(ta, x, xi);
    return gauss_integrate([&](double tau) { return a.at1(tau, x, xi); }, ta, tb, n_quad);
}

// ======================================================================
// negative definiteness battery
// ======================================================================

static std::string format_vec(const vecd& v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ")";
    return os.str();
}

Report verify_ndf_properties(const Psi& psi, int d, int n_samples, double box,
                             std::uint64_t seed) {
    Report report;
    SplitMix64 rng(seed);
    auto sample = [&](double scale) {
        vecd xi(d);
        for (int i = 0; i < d; ++i) xi[i] = rng.next_in(-scale, scale);
        return xi;
    };
    auto neg = [](const vecd& v) {
        vecd w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = -v[i];
        return w;
    };
    auto diff = [](const vecd& u, const vecd& v) {
        vecd w(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] - v[i];
        return w;
    };

    // hermitian symmetry and nonnegative real part
    {
        double herm = 0.0, min_re = std::numeric_limits<double>::infinity();
        vecd witness(d, 0.0);
        for (int s = 0; s < n_samples; ++s) {
            vecd xi = sample(box);
            cplx v = psi(xi);
            herm = std::max(herm, std::abs(v - std::conj(psi(neg(xi)))));
            if (v.real() < min_re) {
                min_re = v.real();
                witness = xi;
            }
        }
        report.add({"hermitian", herm <= 1e-10 * (1.0 + box * box), herm, ""});
        report.add({"nonnegative_real", min_re >= -1e-12, min_re, format_vec(witness)});
    }

    // psi(0) = killing rate: real and nonnegative
    {
        cplx v0 = psi(vecd(d, 0.0));
        bool ok = std::abs(v0.imag()) <= 1e-12 && v0.real() >= -1e-12;
        report.add({"origin", ok, v0.real(), ""});
    }

    // Peetre ratio <= 2
    {
        double worst = 0.0;
        std::string witness;
        for (int s = 0; s < n_samples; ++s) {
            vecd xi = sample(box), eta = sample(box);
            double num = 1.0 + std::abs(psi(xi));
            double den = (1.0 + std::abs(psi(eta))) * (1.0 + std::abs(psi(diff(xi, eta))));
            double ratio = num / den;
            if (ratio > worst) {
                worst = ratio;
                witness = "xi=" + format_vec(xi) + " eta=" + format_vec(eta);
            }
        }
        report.add({"peetre", worst <= 2.0 + 1e-12, worst, witness});
    }

    // |psi(xi)| <= C (1 + |xi|^2), constant stable under box doubling
    {
        auto growth_const = [&](double scale) {
            double c = 0.0;
            for (int s = 0; s < n_samples; ++s) {
                vecd xi = sample(scale);
                c = std::max(c, std::abs(psi(xi)) / (1.0 + sq_norm(xi)));
            }
            return c;
        };
        double c1 = growth_const(box), c2 = growth_const(2.0 * box);
        bool stable = std::isfinite(c1) && std::isfinite(c2) &&
                      std::abs(c2 - c1) <= 0.10 * std::max(c1, 1e-300) + 1e-12;
        std::ostringstream os;
        os << "box=" << box << " c=" << c1 << " box=" << 2.0 * box << " c=" << c2;
        report.add({"growth", stable, c1, os.str()});
    }

    // Schoenberg matrices H_jk = psi(xi_j) + conj(psi(xi_k)) - psi(xi_j - xi_k)
    // must be positive semidefinite for a continuous negative definite psi.
    {
        const int N = 24;
        std::vector<vecd> pts;
        pts.push_back(vecd(d, 0.0));
        for (int s = 1; s < N; ++s) pts.push_back(sample(box));
        Eigen::MatrixXcd H(N, N);
        double scale = 1.0;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                cplx h = psi(pts[i]) + std::conj(psi(pts[j])) - psi(diff(pts[i], pts[j]));
                H(i, j) = h;
                scale = std::max(scale, std::abs(h));
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (H + H.adjoint()));
        double min_eig = eig.eigenvalues().minCoeff();
        report.add({"cnd", min_eig >= -1e-9 * scale, min_eig, ""});
    }

    return report;
}

// ======================================================================
// seminorms and assumptions
// ======================================================================

namespace {

struct DerivTable {
    // |d_xi^alpha D_x^beta a| for alpha, beta in 0..2 at one sample point
    double mag[3][3];
};

DerivTable eval_deriv_table(const TimeDependentSymbol& a, double t, double x, double xi,
                            int lmax, int lpmax, double step_scale) {
    DerivTable table{};
    if (a.deriv1) {
        for (int al = 0; al <= lmax; ++al)
            for (int be = 0; be <= lpmax; ++be)
                table.mag[al][be] = std::abs(a.deriv1(t, x, xi, be, al));
        return table;
    }
    // nested central differences on the evaluator (|D_x| = |d_x|)
    for (int al = 0; al <= lmax; ++al)
        for (int be = 0; be <= lpmax; ++be) {
            const double hx = fd_step(x, al + be) * step_scale;
            const double hxi = fd_step(xi, al + be) * step_scale;
            auto in_x = [&](double z_xi) {
                return fd_central([&](double z) { return a.at1(t, z, z_xi); }, x, be, hx);
            };
            table.mag[al][be] = std::abs(fd_central(in_x, xi, al, hxi));
        }
    return table;
}

double seminorm_pass(const TimeDependentSymbol& a, int l, int lp, double m, int g,
                     const SampleBox& box, double step_scale) {
    double value = 0.0;
    for (double t : box.t_samples)
        for (int ix = 0; ix < box.nx; ++ix) {
            double x = a.x_independent
                           ? 0.0
                           : box.x_lo + (box.x_hi - box.x_lo) * ix / std::max(1, box.nx - 1);
            for (int ik = 0; ik < box.nxi; ++ik) {
                double xi = box.xi_lo + (box.xi_hi - box.xi_lo) * ik / std::max(1, box.nxi - 1);
                DerivTable tab = eval_deriv_table(a, t, x, xi, l, lp, step_scale);
                double br = bracket_sq(a.psi_ref, xi);
                for (int al = 0; al <= l; ++al) {
                    double w = std::pow(br, 0.5 * (-m + rho_g(al, g)));
                    for (int be = 0; be <= lp; ++be)
                        value = std::max(value, tab.mag[al][be] * w);
                }
            }
            if (a.x_independent) break;
        }
    return value;
}

} // namespace

SeminormEstimate estimate_seminorm(const TimeDependentSymbol& a, int l, int lp, double m,
                                   int g, const SampleBox& box) {
    if (a.d != 1)
        throw std::invalid_argument("estimate_seminorm: d = 1 evaluators only");
    if (l < 0 || l > 2 || lp < 0 || lp > 2)
        throw std::invalid_argument("estimate_seminorm: l, l' must lie in 0..2");
    SeminormEstimate est;
    double coarse = seminorm_pass(a, l, lp, m, g, box, 1.0);
    double fine = seminorm_pass(a, l, lp, m, g, box, 0.5);
    est.value = fine;
    est.step_disagreement =
        std::abs(fine - coarse) / std::max(std::max(std::abs(fine), std::abs(coarse)), 1e-300);
    if (l == 0 && lp == 0) est.step_disagreement = 0.0; // no differencing involved
    est.warning = est.step_disagreement > 0.10;
    return est;
}

Report check_assumptions(const TimeDependentSymbol& a, const SampleBox& box) {
    if (a.d != 1)
        throw std::invalid_argument("check_assumptions: d = 1 evaluators only");
    Report report;

    // (A1): weighted seminorm finite at full derivative depth
    {
        SeminormEstimate est = estimate_seminorm(a, 2, 2, a.m, a.g, box);
        std::ostringstream os;
        os << "fd_disagreement=" << est.step_disagreement;
        report.add({"A1", std::isfinite(est.value), est.value, os.str()});
    }

    // (A2): Re a >= c <xi>^{m'} with c > 0
    {
        double c_best = std::numeric_limits<double>::infinity();
        std::string witness;
        for (double t : box.t_samples)
            for (int ix = 0; ix < box.nx; ++ix) {
                double x = box.x_lo + (box.x_hi - box.x_lo) * ix / std::max(1, box.nx - 1);
                for (int ik = 0; ik < box.nxi; ++ik) {
                    double xi =
                        box.xi_lo + (box.xi_hi - box.xi_lo) * ik / std::max(1, box.nxi - 1);
                    // the origin is excluded: conservative symbols vanish there
                    if (xi == 0.0) continue;
                    double ratio = a.at1(t, x, xi).real() /
                                   std::pow(bracket_sq(a.psi_ref, xi), 0.5 * a.m_lower);
                    if (ratio < c_best) {
                        c_best = ratio;
                        std::ostringstream os;
                        os << "t=" << t << " x=" << x << " xi=" << xi;
                        witness = os.str();
                    }
                }
            }
        report.add({"A2", c_best > 1e-12, c_best, witness});
    }

    // (A3): |d_xi^alpha D_x^beta a| <= C Re a <xi>^{-rho_2(|alpha|)}
    {
        double c_worst = 0.0;
        std::string witness;
        bool ok = true;
        for (double t : box.t_samples)
            for (int ix = 0; ix < box.nx; ++ix) {
                double x = box.x_lo + (box.x_hi - box.x_lo) * ix / std::max(1, box.nx - 1);
                for (int ik = 0; ik < box.nxi; ++ik) {
                    double xi =
                        box.xi_lo + (box.xi_hi - box.xi_lo) * ik / std::max(1, box.nxi - 1);
                    if (xi == 0.0) continue;
                    double re = a.at1(t, x, xi).real();
                    if (!(re > 0.0)) {
                        ok = false;
                        continue;
                    }
                    DerivTable tab = eval_deriv_table(a, t, x, xi, 2, 2, 1.0);
                    double br = bracket_sq(a.psi_ref, xi);
                    for (int al = 0; al <= 2; ++al)
                        for (int be = 0; be <= 2; ++be) {
                            double c = tab.mag[al][be] * std::pow(br, 0.5 * rho_g(al, 2)) / re;
                            if (c > c_worst) {
                                c_worst = c;
                                std::ostringstream os;
                                os << "t=" << t << " x=" << x << " xi=" << xi << " alpha=" << al
                                   << " beta=" << be;
                                witness = os.str();
                            }
                        }
                }
            }
        report.add({"A3", ok && std::isfinite(c_worst), c_worst, witness});
    }

    return report;
}

// ======================================================================
// Faa di Bruno
// ======================================================================

namespace {

void partitions_rec(int slot, int n_slots, std::vector<std::vector<int>>& blocks,
                    const std::function<void(const std::vector<std::vector<int>>&)>& emit) {
    if (slot == n_slots) {
        emit(blocks);
        return;
    }
    // index, don't iterate: the recursive call grows `blocks` and a
    // reallocation would invalidate any reference into it
    const std::size_t n_open = blocks.size();
    for (std::size_t b = 0; b < n_open; ++b) {
        blocks[b].push_back(slot);
        partitions_rec(slot + 1, n_slots, blocks, emit);
        blocks[b].pop_back();
    }
    blocks.push_back({slot});
    partitions_rec(slot + 1, n_slots, blocks, emit);
    blocks.pop_back();
}

} // namespace

cplx faa_di_bruno_derivative(const std::vector<cplx>& f_derivs,
                             const std::function<cplx(const std::vector<int>&)>& g_derivs,
                             const std::vector<int>& gamma) {
    const int dim = static_cast<int>(gamma.size());
    int order = 0;
    for (int c : gamma) {
        if (c < 0) throw std::invalid_argument("faa_di_bruno_derivative: negative index");
        order += c;
    }
    if (static_cast<int>(f_derivs.size()) < order + 1)
        throw std::invalid_argument("faa_di_bruno_derivative: f_derivs too short");
    if (order == 0) return f_derivs[0];

    // one slot per unit derivative, tagged with its axis
    std::vector<int> slot_axis;
    for (int axis = 0; axis < dim; ++axis)
        for (int c = 0; c < gamma[axis]; ++c) slot_axis.push_back(axis);

    cplx total(0.0);
    std::vector<std::vector<int>> blocks;
    partitions_rec(0, order, blocks,
                   [&](const std::vector<std::vector<int>>& partition) {
                       cplx term = f_derivs[partition.size()];
                       for (const auto& block : partition) {
                           std::vector<int> beta(dim, 0);
                           for (int slot : block) beta[slot_axis[slot]] += 1;
                           term *= g_derivs(beta);
                       }
                       total += term;
                   });
    return total;
}

} // namespace ndsym
