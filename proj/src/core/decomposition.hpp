#pragma once
// Second-order decomposition of the sliced propagator symbol (d = 1).
//
// For pi = {t_0, ..., t_{k+1}} write p_j = p(t_j, t_{j+1}) and
// q0(pi) = exp(-int_{t_0}^{t_{k+1}} a).  Expanding the iterated
// Kohn-Nirenberg products p_0 # ... # p_k to first order gives
//
//   q1(pi) = sum_{j=1}^{k} q0(pi_{t_{j+1}, t_{k+1}})
//            * D_x p(t_j, t_{j+1}) * d_xi q0(pi_{t_0, t_j}),
//
// (q1 of a single slice is zero), and the step remainder r(pi) collects the
// integral-form Taylor remainders of the last product:
//
//   r(pi) = int_0^1 (1-th) Os-iint e^{-i y eta}
//             D_x^2 p(t_k, t_{k+1}; x + y, xi) d_z^2 q0(pi_{t_0,t_k}; x, xi + th eta)
//         + sum_{j=1}^{k-1} int_0^1 Os-iint e^{-i y eta}
//             D_x p(t_k, t_{k+1}; x + y, xi) d_z G_j(x, xi + th eta),
//
//   G_j(x, z) = q0(pi_{t_{j+1}, t_k}; x, z) D_x p(t_j, t_{j+1}; x, z)
//               * d_z q0(pi_{t_0, t_j}; x, z),
//
// so that the one-step identity
//
//   (q0 + q1)(pi_{t_0, t_k}) # p(t_k, t_{k+1}) = (q0 + q1 + r)(pi_{t_0, t_{k+1}})
//
// holds exactly (up to finite-difference and theta-quadrature truncation,
// well below the verification tolerance).  Iterating it across the partition
// expresses the full sliced symbol as (q0 + q1)(pi) plus a sum of composed
// remainders indexed by skip sequences 2 <= j_1 < j_2 < ... <= k+1 with all
// gaps >= 2; a trailing index j_J = k+1 means the final (q0 + q1) factor
// degenerates to 1.
//
// Derivatives of tabulated quantities use central differences at the lattice
// step; identity checks tabulate their factors on xi-padded (unwrapped)
// lattices so that the frequency shift xi + eta never wraps.

#include "grid.hpp"
#include "pdo.hpp"
#include "symbols.hpp"
#include "timeslice.hpp"

namespace ndsym {

// q0(pi) = frozen exponential over the whole window (same routine, same bits)
DiscreteSymbol principal_q0(const TimeDependentSymbol& a, const Partition& pi,
                            const TorusGrid& g, int n_quad = 8);

// first-order correction; requires d = 1 and at most 8 interior points
DiscreteSymbol correction_q1(const TimeDependentSymbol& a, const Partition& pi,
                             const TorusGrid& g, int n_quad = 8);

// one-step remainder; requires d = 1, >= 2 subintervals, <= 4 interior points
DiscreteSymbol remainder_r(const TimeDependentSymbol& a, const Partition& pi,
                           const TorusGrid& g, int n_theta = 8, int n_quad = 8);

struct ScalingCheck {
    std::string name;
    double value = 0.0; // measured ratio (or bound value)
    double lo = 0.0, hi = 0.0;
    bool passed = false;
};

struct KeyLemmaReport {
    double identity_residual = 0.0; // sup |LHS - RHS| / sup |LHS|
    std::vector<ScalingCheck> scaling;
    bool passed = false;
};

// checks the one-step identity on pi plus the four scaling behaviours:
// boundedness of q0 + q1, quadratic window shrink of q1, linear last-gap
// shrink of r, and linear inner-window shrink of weighted r
KeyLemmaReport verify_key_lemma(const TimeDependentSymbol& a, const Partition& pi,
                                const TorusGrid& g, double tol = 1e-3, int n_theta = 8,
                                int n_quad = 8);

// all index sequences (j_1, ..., j_J) with 2 <= j_1, j_{i+1} >= j_i + 2,
// j_J <= k + 1, sorted lexicographically; satisfies the count recursion
// |S_{k+1}| = |S_k| + |S_{k-1}| + 1
std::vector<std::vector<int>> enumerate_skip_sequences(int k);

struct RemainderTerm {
    std::vector<int> sequence;
    double sup_norm = 0.0;
};

struct AssembledRemainder {
    DiscreteSymbol R;
    std::vector<RemainderTerm> terms;
};

// R(pi) = sum over skip sequences of r(pi_{t_0,t_{j_1}}) # ... #
// (q0 + q1)(pi_{t_{j_J}, t_{k+1}}); requires k <= 3
AssembledRemainder assemble_remainder_R(const TimeDependentSymbol& a, const Partition& pi,
                                        const TorusGrid& g, int n_theta = 8, int n_quad = 8);

struct FujiwaraReport {
    double identity_residual = 0.0;
    std::vector<RemainderTerm> terms;
    bool passed = false;
};

// full product-chain check at k = 3:
// p_0 # p_1 # p_2 # p_3 = (q0 + q1)(pi) + R(pi)
FujiwaraReport verify_fujiwara(const TimeDependentSymbol& a, const Partition& pi,
                               const TorusGrid& g, double tol = 1e-3, int n_theta = 8,
                               int n_quad = 8);

} // namespace ndsym
