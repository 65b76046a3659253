#pragma once
// Levi-Mizohata parametrix expansion (d = 1).  With e_0(t, s) =
// exp(-int_s^t a) the higher levels solve the transport hierarchy
//
//   q_j(t, s) = sum_{k=0}^{j-1} sum_{|alpha| + k = j, |alpha| <= 2}
//               (1/alpha!) d_xi^alpha a(t) D_x^alpha e_k(t, s),
//   d_t e_j + a e_j = -q_j,   e_j(s, s) = 0,
//
// integrated with the exact integrating factor,
//
//   e_j(t, s) = -int_s^t exp(-int_tau^t a) q_j(tau, s) dtau,
//
// by the trapezoid rule on the stored time nodes.  xi-derivatives of a come
// from the evaluator (analytic hook when available), x-derivatives of the
// e_k tables from periodic 5-point lattice differences.  For x-independent
// symbols every q_j vanishes, so e_j == 0 for j >= 1 and the expansion
// collapses to the frozen exponential.

#include "grid.hpp"
#include "pdo.hpp"
#include "symbols.hpp"

namespace ndsym {

struct ParametrixExpansion {
    TorusGrid g;
    double s = 0.0, t = 0.0;
    int J = 0;
    vecd tau;                                       // time nodes s..t
    std::vector<std::vector<DiscreteSymbol>> e;     // e[j][r], j = 0..J
    std::vector<std::vector<DiscreteSymbol>> q;     // q[j][r], j = 1..J (q[0] empty)

    int nodes() const { return static_cast<int>(tau.size()); }
    // sum_{j <= J_use} e_j at time node r
    DiscreteSymbol sum_at(int r, int J_use) const;
    DiscreteSymbol sum_final(int J_use) const { return sum_at(nodes() - 1, J_use); }
};

// J <= 3, n_time_nodes >= 2 trapezoid nodes on [s, t]
ParametrixExpansion levi_expansion(const TimeDependentSymbol& a, double s, double t, int J,
                                   int n_time_nodes, const TorusGrid& g, int n_quad = 8);

struct CrossValidateRow {
    int J = 0;
    int k = 0;
    double distance = 0.0;      // relative L2 between the two solutions
    double residual_ts = 0.0;   // PDE residual of the sliced solution
    double residual_levi = 0.0; // PDE residual of the parametrix solution
};

struct CrossValidateResult {
    std::vector<CrossValidateRow> rows;
    double final_distance = 0.0;
};

// compares Op(sum_{j<=J} e_j(t)) u0 against the sliced evolution with
// k_slices subintervals, sweeping the expansion depth and the slice count
CrossValidateResult cross_validate(const TimeDependentSymbol& a, double s, double t, int J,
                                   int k_slices, const GridFunction& u0,
                                   int n_time_nodes = 33, int n_quad = 8);

} // namespace ndsym
