#include "decomposition.hpp"

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ndsym {
namespace {

// ---------------------------------------------------------------------
// xi-padded tables: n spatial rows, n + 2*pad frequency columns, so that
// xi + eta stays inside the tabulated range without wrapping
// ---------------------------------------------------------------------

struct PaddedTable {
    TorusGrid g;
    int pad = 0;
    std::vector<cplx> v;

    PaddedTable() = default;
    PaddedTable(const TorusGrid& g_, int pad_)
        : g(g_), pad(pad_),
          v(static_cast<std::size_t>(g_.n) * (g_.n + 2 * pad_), cplx(0.0)) {}

    int cols() const { return g.n + 2 * pad; }
    cplx at(int ix, int jk) const { return v[static_cast<std::size_t>(ix) * cols() + jk]; }
    cplx& ref(int ix, int jk) { return v[static_cast<std::size_t>(ix) * cols() + jk]; }
    double freq(int jk) const { return (jk - pad - g.n / 2) * g.dxi(); }

    DiscreteSymbol crop() const {
        DiscreteSymbol out = DiscreteSymbol::make_dense(g);
        for (int ix = 0; ix < g.n; ++ix)
            for (int ik = 0; ik < g.n; ++ik) out.ref(ix, ik) = at(ix, ik + pad);
        return out;
    }
};

void add_into(PaddedTable& acc, const PaddedTable& t) {
    for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += t.v[i];
}

double sup_abs(const PaddedTable& t) {
    double m = 0.0;
    for (const cplx& z : t.v) m = std::max(m, std::abs(z));
    return m;
}

double sup_abs_diff(const PaddedTable& a, const PaddedTable& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

// ---------------------------------------------------------------------
// evaluator-backed windows and lattice-step derivatives
// ---------------------------------------------------------------------

struct Engine {
    const TimeDependentSymbol& a;
    TorusGrid g;
    int n_quad;
    double hx, hk; // lattice steps used for all central differences here

    Engine(const TimeDependentSymbol& a_, const TorusGrid& g_, int n_quad_)
        : a(a_), g(g_), n_quad(n_quad_), hx(g_.dx()), hk(g_.dxi()) {}

    // window exponential p(ta, tb; x, z) = q0 of the window
    cplx p(double ta, double tb, double x, double z) const {
        return std::exp(-time_integral(a, x, z, ta, tb, n_quad));
    }
    // D_x p = -i d_x p
    cplx dxp(double ta, double tb, double x, double z) const {
        cplx d = (p(ta, tb, x - 2 * hx, z) - 8.0 * p(ta, tb, x - hx, z) +
                  8.0 * p(ta, tb, x + hx, z) - p(ta, tb, x + 2 * hx, z)) /
                 (12.0 * hx);
        return cplx(0.0, -1.0) * d;
    }
    // D_x^2 p = -d_x^2 p
    cplx dx2p(double ta, double tb, double x, double z) const {
        cplx d = (-p(ta, tb, x - 2 * hx, z) + 16.0 * p(ta, tb, x - hx, z) -
                  30.0 * p(ta, tb, x, z) + 16.0 * p(ta, tb, x + hx, z) -
                  p(ta, tb, x + 2 * hx, z)) /
                 (12.0 * hx * hx);
        return -d;
    }
    cplx dzq0(double ta, double tb, double x, double z) const {
        return (p(ta, tb, x, z - 2 * hk) - 8.0 * p(ta, tb, x, z - hk) +
                8.0 * p(ta, tb, x, z + hk) - p(ta, tb, x, z + 2 * hk)) /
               (12.0 * hk);
    }
    cplx dz2q0(double ta, double tb, double x, double z) const {
        return (-p(ta, tb, x, z - 2 * hk) + 16.0 * p(ta, tb, x, z - hk) -
                30.0 * p(ta, tb, x, z) + 16.0 * p(ta, tb, x, z + hk) -
                p(ta, tb, x, z + 2 * hk)) /
               (12.0 * hk * hk);
    }

    // q1 of the sub-partition ts[i0..i1] at (x, z)
    cplx q1(const vecd& ts, int i0, int i1, double x, double z) const {
        cplx acc(0.0);
        for (int j = i0 + 1; j <= i1 - 1; ++j)
            acc += p(ts[j + 1], ts[i1], x, z) * dxp(ts[j], ts[j + 1], x, z) *
                   dzq0(ts[i0], ts[j], x, z);
        return acc;
    }

    // G_j factor of the second remainder family on ts[i0..i1]
    // (j-th summand of q1(pi_{t_{i0}, t_{i1-1}}))
    cplx Gj(const vecd& ts, int i0, int i1, int j, double x, double z) const {
        return p(ts[j + 1], ts[i1 - 1], x, z) * dxp(ts[j], ts[j + 1], x, z) *
               dzq0(ts[i0], ts[j], x, z);
    }
    cplx dzGj(const vecd& ts, int i0, int i1, int j, double x, double z) const {
        return (Gj(ts, i0, i1, j, x, z - 2 * hk) - 8.0 * Gj(ts, i0, i1, j, x, z - hk) +
                8.0 * Gj(ts, i0, i1, j, x, z + hk) - Gj(ts, i0, i1, j, x, z + 2 * hk)) /
               (12.0 * hk);
    }
};

// ---------------------------------------------------------------------
// padded tabulations
// ---------------------------------------------------------------------

PaddedTable q0_table(const Engine& e, double ta, double tb, int pad) {
    PaddedTable t(e.g, pad);
    for (int ix = 0; ix < e.g.n; ++ix) {
        double x = e.g.node1(ix);
        for (int jk = 0; jk < t.cols(); ++jk) t.ref(ix, jk) = e.p(ta, tb, x, t.freq(jk));
    }
    return t;
}

PaddedTable q1_table(const Engine& e, const vecd& ts, int i0, int i1, int pad) {
    PaddedTable t(e.g, pad);
    for (int ix = 0; ix < e.g.n; ++ix) {
        double x = e.g.node1(ix);
        for (int jk = 0; jk < t.cols(); ++jk) t.ref(ix, jk) = e.q1(ts, i0, i1, x, t.freq(jk));
    }
    return t;
}

PaddedTable q01_table(const Engine& e, const vecd& ts, int i0, int i1, int pad) {
    PaddedTable t = q0_table(e, ts[i0], ts[i1], pad);
    PaddedTable t1 = q1_table(e, ts, i0, i1, pad);
    add_into(t, t1);
    return t;
}

// r on the sub-partition ts[i0..i1] (two Taylor-remainder families)
PaddedTable r_table(const Engine& e, const vecd& ts, int i0, int i1, int pad, int n_theta) {
    const int n = e.g.n;
    if (i1 - i0 < 2) throw std::invalid_argument("r_table: need at least two subintervals");
    PaddedTable t(e.g, pad);

    const double t_last_a = ts[i1 - 1], t_last_b = ts[i1];

    // theta nodes on [0, 1]
    const GaussRule& rule = gauss_legendre(n_theta);
    vecd theta(n_theta), wtheta(n_theta);
    for (int i = 0; i < n_theta; ++i) {
        theta[i] = 0.5 * (1.0 + rule.nodes[i]);
        wtheta[i] = 0.5 * rule.weights[i];
    }

    // windowed x-transforms of the outer factors, one set per output column:
    //   W(ix, m) = (1/n) sum_q e^{-2 pi i q mt / n} f(x_ix + q dx)
    const int cols = t.cols();
    std::vector<cplx> W1(static_cast<std::size_t>(cols) * n * n);
    std::vector<cplx> W2(static_cast<std::size_t>(cols) * n * n);
    {
        std::vector<cplx> f1(n), f2(n);
        for (int jk = 0; jk < cols; ++jk) {
            double xi = t.freq(jk);
            for (int p = 0; p < n; ++p) {
                double xp = e.g.node1(p);
                f1[p] = e.dxp(t_last_a, t_last_b, xp, xi);
                f2[p] = e.dx2p(t_last_a, t_last_b, xp, xi);
            }
            for (int ix = 0; ix < n; ++ix)
                for (int m = 0; m < n; ++m) {
                    int mt = m - n / 2;
                    cplx acc1(0.0), acc2(0.0);
                    for (int q = 0; q < n; ++q) {
                        cplx ph = std::polar(1.0, -2.0 * kPi * q * mt / n);
                        acc1 += ph * f1[(ix + q) % n];
                        acc2 += ph * f2[(ix + q) % n];
                    }
                    std::size_t idx =
                        (static_cast<std::size_t>(jk) * n + ix) * n + m;
                    W1[idx] = acc1 / static_cast<double>(n);
                    W2[idx] = acc2 / static_cast<double>(n);
                }
        }
    }

    const bool has_family_b = (i1 - i0) >= 3; // needs interior levels j < k
    for (int ix = 0; ix < n; ++ix) {
        double x = e.g.node1(ix);
        for (int jk = 0; jk < cols; ++jk) {
            double xi = t.freq(jk);
            cplx acc(0.0);
            for (int it = 0; it < n_theta; ++it) {
                for (int m = 0; m < n; ++m) {
                    int mt = m - n / 2;
                    double z = xi + theta[it] * (mt * e.hk);
                    std::size_t idx = (static_cast<std::size_t>(jk) * n + ix) * n + m;
                    acc += wtheta[it] * (1.0 - theta[it]) * W2[idx] *
                           e.dz2q0(ts[i0], t_last_a, x, z);
                    if (has_family_b) {
                        cplx sum_g(0.0);
                        for (int j = i0 + 1; j <= i1 - 2; ++j)
                            sum_g += e.dzGj(ts, i0, i1, j, x, z);
                        acc += wtheta[it] * W1[idx] * sum_g;
                    }
                }
            }
            t.ref(ix, jk) = acc;
        }
    }
    return t;
}

// exact lattice composition of padded tables (chi == 1, no frequency wrap);
// requires b.pad >= c.pad + n/2, output has c.pad
PaddedTable compose_padded(const PaddedTable& b, const PaddedTable& c) {
    const TorusGrid& g = c.g;
    const int n = g.n;
    if (!(b.g == g)) throw std::invalid_argument("compose_padded: grid mismatch");
    if (b.pad < c.pad + n / 2)
        throw std::invalid_argument("compose_padded: left factor needs pad >= pad_out + n/2");

    // chat(m, jk) = sum_p e^{-2 pi i p mt / n} c(p, jk)
    const int cols = c.cols();
    std::vector<cplx> chat(static_cast<std::size_t>(n) * cols);
    for (int jk = 0; jk < cols; ++jk)
        for (int m = 0; m < n; ++m) {
            int mt = m - n / 2;
            cplx acc(0.0);
            for (int p = 0; p < n; ++p)
                acc += std::polar(1.0, -2.0 * kPi * p * mt / n) * c.at(p, jk);
            chat[static_cast<std::size_t>(m) * cols + jk] = acc;
        }

    PaddedTable out(g, c.pad);
    const int shift = b.pad - c.pad;
    for (int ix = 0; ix < n; ++ix)
        for (int jk = 0; jk < cols; ++jk) {
            cplx acc(0.0);
            for (int m = 0; m < n; ++m) {
                int mt = m - n / 2;
                cplx rot = std::polar(1.0, 2.0 * kPi * ix * mt / n);
                acc += rot * b.at(ix, jk + shift + mt) *
                       chat[static_cast<std::size_t>(m) * cols + jk];
            }
            out.ref(ix, jk) = acc / static_cast<double>(n);
        }
    return out;
}

double weighted_sup(const PaddedTable& t, const Psi& psi, double weight_power) {
    double sup = 0.0;
    for (int ix = 0; ix < t.g.n; ++ix)
        for (int jk = 0; jk < t.cols(); ++jk) {
            double w = std::pow(1.0 + psi.at1(t.freq(jk)).real(), 0.5 * weight_power);
            sup = std::max(sup, std::abs(t.at(ix, jk)) * w);
        }
    return sup;
}

void require_d1(const TimeDependentSymbol& a, const TorusGrid& g, const char* who) {
    if (a.d != 1 || g.d != 1)
        throw std::invalid_argument(std::string(who) + ": d = 1 only");
}

vecd scale_window(const vecd& ts, double factor) {
    vecd out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = ts[0] + factor * (ts[i] - ts[0]);
    return out;
}

} // namespace

// ---------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------

DiscreteSymbol principal_q0(const TimeDependentSymbol& a, const Partition& pi,
                            const TorusGrid& g, int n_quad) {
    return frozen_exp_symbol(a, pi.s(), pi.t(), g, n_quad);
}

DiscreteSymbol correction_q1(const TimeDependentSymbol& a, const Partition& pi,
                             const TorusGrid& g, int n_quad) {
    require_d1(a, g, "correction_q1");
    if (pi.interior() > 8)
        throw std::invalid_argument("correction_q1: at most 8 interior points");
    Engine eng(a, g, n_quad);
    return q1_table(eng, pi.times, 0, pi.intervals(), 0).crop();
}

DiscreteSymbol remainder_r(const TimeDependentSymbol& a, const Partition& pi,
                           const TorusGrid& g, int n_theta, int n_quad) {
    require_d1(a, g, "remainder_r");
    if (pi.intervals() < 2)
        throw std::invalid_argument("remainder_r: need at least two subintervals");
    if (pi.interior() > 4)
        throw std::invalid_argument("remainder_r: at most 4 interior points");
    if (n_theta < 4) throw std::invalid_argument("remainder_r: n_theta >= 4");
    Engine eng(a, g, n_quad);
    return r_table(eng, pi.times, 0, pi.intervals(), 0, n_theta).crop();
}

KeyLemmaReport verify_key_lemma(const TimeDependentSymbol& a, const Partition& pi,
                                const TorusGrid& g, double tol, int n_theta, int n_quad) {
    require_d1(a, g, "verify_key_lemma");
    const int k = pi.interior();
    if (k < 1 || k > 3)
        throw std::invalid_argument("verify_key_lemma: 1 to 3 interior points");
    Engine eng(a, g, n_quad);
    const vecd& ts = pi.times;
    const int last = pi.intervals();

    // LHS: (q0 + q1)(pi_{t_0, t_k}) # p(t_k, t_{k+1}), unwrapped
    PaddedTable left = q01_table(eng, ts, 0, last - 1, g.n / 2);
    PaddedTable p_last = q0_table(eng, ts[last - 1], ts[last], 0);
    PaddedTable lhs = compose_padded(left, p_last);

    // RHS: (q0 + q1 + r)(pi)
    PaddedTable rhs = q01_table(eng, ts, 0, last, 0);
    add_into(rhs, r_table(eng, ts, 0, last, 0, n_theta));

    KeyLemmaReport report;
    report.identity_residual = sup_abs_diff(lhs, rhs) / std::max(sup_abs(lhs), 1e-300);

    // scaling behaviours on shrunk copies of the window
    const Psi& psi = a.psi_ref;
    {
        ScalingCheck c{"q0q1_bounded", 0.0, 0.0, 1.0 + 1e-3, false};
        c.value = sup_abs(q01_table(eng, ts, 0, last, 0));
        c.passed = c.value <= c.hi;
        report.scaling.push_back(c);
    }
    {
        // |q1|<xi>^{-2m} scales like the squared window length
        ScalingCheck c{"q1_window_quadratic", 0.0, 3.0, 5.5, false};
        vecd half = scale_window(ts, 0.5);
        double full_sup = weighted_sup(q1_table(eng, ts, 0, last, 0), psi, -2.0 * a.m);
        if (full_sup <= 1e-12) {
            // q1 vanishes identically (x-independent symbol); the bound holds
            c.passed = true;
        } else {
            double half_sup = weighted_sup(q1_table(eng, half, 0, last, 0), psi, -2.0 * a.m);
            c.value = full_sup / std::max(half_sup, 1e-300);
            c.passed = c.value >= c.lo && c.value <= c.hi;
        }
        report.scaling.push_back(c);
    }
    {
        // |r| scales like the last gap
        ScalingCheck c{"r_last_gap_linear", 0.0, 1.4, 2.8, false};
        vecd shrunk = ts;
        shrunk[last] = ts[last - 1] + 0.5 * (ts[last] - ts[last - 1]);
        double full_sup = sup_abs(r_table(eng, ts, 0, last, 0, n_theta));
        if (full_sup <= 1e-12) {
            c.passed = true; // r vanishes identically
        } else {
            double shr_sup = sup_abs(r_table(eng, shrunk, 0, last, 0, n_theta));
            c.value = full_sup / std::max(shr_sup, 1e-300);
            c.passed = c.value >= c.lo && c.value <= c.hi;
        }
        report.scaling.push_back(c);
    }
    {
        // |r|<xi>^{-m} scales like the inner window with the last gap fixed
        ScalingCheck c{"r_inner_window_linear", 0.0, 1.4, 2.8, false};
        double gap = ts[last] - ts[last - 1];
        vecd shrunk(ts.size());
        for (int i = 0; i < last; ++i) shrunk[i] = ts[0] + 0.5 * (ts[i] - ts[0]);
        shrunk[last] = shrunk[last - 1] + gap;
        double full_sup = weighted_sup(r_table(eng, ts, 0, last, 0, n_theta), psi, -a.m);
        if (full_sup <= 1e-12) {
            c.passed = true; // r vanishes identically
        } else {
            double shr_sup = weighted_sup(r_table(eng, shrunk, 0, last, 0, n_theta), psi, -a.m);
            c.value = full_sup / std::max(shr_sup, 1e-300);
            c.passed = c.value >= c.lo && c.value <= c.hi;
        }
        report.scaling.push_back(c);
    }

    report.passed = report.identity_residual <= tol;
    for (const auto& c : report.scaling) report.passed = report.passed && c.passed;
    return report;
}

std::vector<std::vector<int>> enumerate_skip_sequences(int k) {
    if (k < 0 || k > 20)
        throw std::invalid_argument("enumerate_skip_sequences: k must lie in 0..20");
    // S[B] = sequences with entries >= 2, gaps >= 2, bounded by B
    std::vector<std::vector<std::vector<int>>> S(k + 2);
    for (int B = 2; B <= k + 1; ++B) {
        S[B] = S[B - 1];
        S[B].push_back({B});
        for (auto seq : S[B - 2]) {
            seq.push_back(B);
            S[B].push_back(std::move(seq));
        }
    }
    auto out = S[k + 1];
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// factors of one skip-sequence term, composed left to right with the pad
// ladder (M - i) * n/2
PaddedTable sequence_term(const Engine& eng, const vecd& ts, int k,
                          const std::vector<int>& seq, int n_theta) {
    const int n = eng.g.n;
    const int last = k + 1;
    struct Factor {
        int i0, i1;
        bool is_r;
    };
    std::vector<Factor> factors;
    int start = 0;
    for (int j : seq) {
        factors.push_back({start, j, true});
        start = j;
    }
    if (seq.back() < last) factors.push_back({start, last, false});

    const int M = static_cast<int>(factors.size());
    auto build = [&](const Factor& f, int pad) {
        return f.is_r ? r_table(eng, ts, f.i0, f.i1, pad, n_theta)
                      : q01_table(eng, ts, f.i0, f.i1, pad);
    };
    PaddedTable acc = build(factors[0], (M - 1) * (n / 2));
    for (int i = 1; i < M; ++i) acc = compose_padded(acc, build(factors[i], (M - 1 - i) * (n / 2)));
    return acc;
}

} // namespace

AssembledRemainder assemble_remainder_R(const TimeDependentSymbol& a, const Partition& pi,
                                        const TorusGrid& g, int n_theta, int n_quad) {
    require_d1(a, g, "assemble_remainder_R");
    const int k = pi.interior();
    if (k < 1 || k > 3)
        throw std::invalid_argument("assemble_remainder_R: 1 to 3 interior points");
    Engine eng(a, g, n_quad);

    AssembledRemainder out;
    PaddedTable total(g, 0);
    for (const auto& seq : enumerate_skip_sequences(k)) {
        PaddedTable term = sequence_term(eng, pi.times, k, seq, n_theta);
        out.terms.push_back({seq, sup_abs(term)});
        add_into(total, term);
    }
    out.R = total.crop();
    return out;
}

FujiwaraReport verify_fujiwara(const TimeDependentSymbol& a, const Partition& pi,
                               const TorusGrid& g, double tol, int n_theta, int n_quad) {
    require_d1(a, g, "verify_fujiwara");
    const int k = pi.interior();
    if (k != 3) throw std::invalid_argument("verify_fujiwara: exactly 3 interior points");
    Engine eng(a, g, n_quad);
    const vecd& ts = pi.times;
    const int n = g.n;

    // LHS: the full product chain p_0 # p_1 # p_2 # p_3 with the pad ladder
    PaddedTable lhs = q0_table(eng, ts[0], ts[1], 3 * (n / 2));
    for (int j = 1; j <= 3; ++j)
        lhs = compose_padded(lhs, q0_table(eng, ts[j], ts[j + 1], (3 - j) * (n / 2)));

    // RHS: (q0 + q1)(pi) + sum of skip-sequence terms
    PaddedTable rhs = q01_table(eng, ts, 0, k + 1, 0);
    FujiwaraReport report;
    for (const auto& seq : enumerate_skip_sequences(k)) {
        PaddedTable term = sequence_term(eng, ts, k, seq, n_theta);
        report.terms.push_back({seq, sup_abs(term)});
        add_into(rhs, term);
    }

    report.identity_residual = sup_abs_diff(lhs, rhs) / std::max(sup_abs(lhs), 1e-300);
    report.passed = report.identity_residual <= tol;
    return report;
}

} // namespace ndsym
