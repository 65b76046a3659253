#pragma once
// Continuous negative definite functions and the symbol classes built on
// them.
//
// A Levy triplet (c, l, Q, nu) with finite atomic nu defines
//
//   psi(xi) = c + i l.xi + (1/2) xi.Q xi
//             + sum_j w_j (1 - e^{i xi.y_j} + i xi.y_j / (1 + |y_j|^2))
//
// which is continuous negative definite; Re psi >= 0 and psi(-xi) =
// conj(psi(xi)).  The anisotropic weight is <xi> = (1 + Re psi(xi))^{1/2},
// and symbol regularity is measured against rho_g(k) = min(k, g):
//
//   |d_xi^alpha D_x^beta a(t; x, xi)| <= C <xi>^{m - rho_g(|alpha|)}.
//
// Assumptions on time-dependent symbols a(t; x, xi):
//   (A1) the weighted sup above is finite for |alpha|, |beta| <= 2,
//   (A2) Re a(t; x, xi) >= c <xi>^{m'} for some c > 0, 0 <= m' <= 2,
//   (A3) |d_xi^alpha D_x^beta a| <= C Re a <xi>^{-rho_2(|alpha|)}.

#include "grid.hpp"

#include <functional>
#include <optional>
#include <string>

namespace ndsym {

// ======================================================================
// Levy triplets
// ======================================================================

struct LevyAtom {
    vecd y;   // jump location, y != 0
    double w; // mass, w >= 0
};

struct LevyTriplet {
    int d = 1;
    double kill = 0.0;             // killing rate c >= 0
    vecd drift;                    // l, size d
    std::vector<double> Q;         // d x d row-major, symmetric PSD
    std::vector<LevyAtom> atoms;   // finite atomic Levy measure

    static LevyTriplet quadratic(int d);             // Q = 2I: psi = |xi|^2
    static LevyTriplet killing(double c, int d = 1); // psi = c
};

cplx eval_levy_khintchine(const LevyTriplet& trip, const vecd& xi);

// ======================================================================
// Reference psi and the anisotropic bracket
// ======================================================================

struct Psi {
    std::string name = "zero";
    std::function<cplx(const vecd&)> eval;
    std::function<cplx(double)> eval1;           // d = 1 fast path
    std::function<cplx(double, int)> deriv1;     // optional analytic d^k/dxi^k, d = 1

    cplx operator()(const vecd& xi) const { return eval(xi); }
    cplx at1(double xi) const { return eval1(xi); }
};

Psi psi_zero();
Psi psi_quadratic();                        // |xi|^2
Psi psi_stable(double alpha, double scale); // scale * |xi|^alpha, alpha in (0, 2]
Psi psi_relativistic();                     // sqrt(1 + |xi|^2) - 1
Psi psi_from_triplet(const LevyTriplet& trip);

// <xi>^2 = 1 + Re psi(xi)
inline double bracket_sq(const Psi& psi, double xi) { return 1.0 + psi.at1(xi).real(); }
inline double bracket_sq(const Psi& psi, const vecd& xi) { return 1.0 + psi(xi).real(); }

// rho_g(k) = min(k, g)
inline int rho_g(int k, int g) { return k < g ? k : g; }

// ======================================================================
// Time-dependent symbols
// ======================================================================

struct TimeDependentSymbol {
    int d = 1;
    double T = 1e9;          // horizon (informational)
    double m = 2.0;          // upper order
    double m_lower = 2.0;    // lower order m' in (A2)
    int g = 2;               // decay budget in rho_g
    bool x_independent = false;
    bool time_independent = true;
    Psi psi_ref;             // reference psi for brackets and weights

    std::function<cplx(double, const vecd&, const vecd&)> eval_any;
    std::function<cplx(double, double, double)> eval1; // d = 1 fast path
    // optional analytic mixed derivative hook (d = 1): dx^i dxi^j a(t, x, xi)
    std::function<cplx(double, double, double, int, int)> deriv1;

    cplx operator()(double t, const vecd& x, const vecd& xi) const {
        return eval_any(t, x, xi);
    }
    cplx at1(double t, double x, double xi) const { return eval1(t, x, xi); }
};

// a(t; x, xi) = psi(xi)
TimeDependentSymbol symbol_multiplier(const Psi& psi, double m, double m_lower, int g,
                                      int d = 1);

// a(t; x, xi) = (1 + amp*sin(freq*x)) * (offset + psi(xi)),  d = 1.
// |amp| < 1 keeps (A2)/(A3); analytic derivative hook provided when psi has one.
TimeDependentSymbol symbol_separable(double amp, double freq, const Psi& psi, double offset,
                                     double m, double m_lower, int g);

// arbitrary evaluator (tests, time-dependent cases); no analytic hook
TimeDependentSymbol symbol_custom(std::function<cplx(double, double, double)> f,
                                  const Psi& psi_ref, double m, double m_lower, int g,
                                  bool x_independent, bool time_independent);

// evaluator-backed mixed derivative dx^i dxi^j a (analytic hook when present,
// otherwise nested 5-point central differences with the fd_step rule)
cplx symbol_derivative(const TimeDependentSymbol& a, double t, double x, double xi, int i,
                       int j);

// int_ta^tb a(tau; x, xi) dtau.  Time-independent symbols take the exact
// product path (tb - ta) * a; otherwise a single-panel n_quad-node
// Gauss-Legendre rule (the integrand is smooth in tau).
cplx time_integral(const TimeDependentSymbol& a, double x, double xi, double ta, double tb,
                   int n_quad);

// ======================================================================
// Reports
// ======================================================================

struct CheckItem {
    std::string check;
    bool passed = false;
    double constant = 0.0;
    std::string witness;
};

struct Report {
    std::vector<CheckItem> items;
    bool passed = true;

    void add(CheckItem item) {
        passed = passed && item.passed;
        items.push_back(std::move(item));
    }
    const CheckItem* find(const std::string& check) const {
        for (const auto& it : items)
            if (it.check == check) return &it;
        return nullptr;
    }
};

// Negative definiteness battery for a candidate psi: hermitian symmetry,
// psi(0), Re psi >= 0, the Peetre-type ratio
//   (1 + |psi(xi)|) / ((1 + |psi(eta)|)(1 + |psi(xi - eta)|)) <= 2,
// sub-quadratic growth |psi(xi)| <= C (1 + |xi|^2) with box-doubling
// stability, and positive semidefiniteness of the Schoenberg matrices
//   H_jk = psi(xi_j) + conj(psi(xi_k)) - psi(xi_j - xi_k).
Report verify_ndf_properties(const Psi& psi, int d, int n_samples, double box,
                             std::uint64_t seed);

// ======================================================================
// Seminorms and assumption checks
// ======================================================================

struct SampleBox {
    double x_lo = -10.0, x_hi = 10.0;
    double xi_lo = -10.0, xi_hi = 10.0;
    int nx = 16, nxi = 33;
    vecd t_samples = {0.0};
};

struct SeminormEstimate {
    double value = 0.0;
    double step_disagreement = 0.0; // relative value change under step halving
    bool warning = false;           // disagreement above 10%
};

// |a|_{l,l'}^{(m)} = max_{|alpha|<=l, |beta|<=l'} sup |d_xi^alpha D_x^beta a|
//                    * <xi>^{-m + rho_g(|alpha|)}
// over the sample box, derivatives by central differences on the evaluator
// (d = 1; l, l' <= 2).
SeminormEstimate estimate_seminorm(const TimeDependentSymbol& a, int l, int lp, double m,
                                   int g, const SampleBox& box);

// (A1)-(A3) on a sample plan; each item reports its best constant and the
// witness sample where the constant is attained.
Report check_assumptions(const TimeDependentSymbol& a, const SampleBox& box);

// ======================================================================
// Faa di Bruno and the exponential decay bound
// ======================================================================

// d^gamma (f o g)(x0) from the derivative tables
//   f_derivs[j]    = f^{(j)} at g(x0), j = 0..|gamma|
//   g_derivs(beta) = d^beta g(x0) for multi-indices 0 < beta <= gamma
// by summing over set partitions of |gamma| derivative slots.
cplx faa_di_bruno_derivative(const std::vector<cplx>& f_derivs,
                             const std::function<cplx(const std::vector<int>&)>& g_derivs,
                             const std::vector<int>& gamma);

// s^j e^{-s} <= (j/e)^j for s > 0 (equality at s = j)
inline double exp_decay_bound(int j) {
    if (j == 0) return 1.0;
    double b = 1.0;
    for (int i = 0; i < j; ++i) b *= j / 2.718281828459045235360287471352662498;
    return b;
}

} // namespace ndsym
