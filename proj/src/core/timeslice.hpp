#pragma once
// Time-sliced approximate evolution.  For a partition
// pi = {s = t_0 <= t_1 <= ... <= t_{k+1} = t} the sliced propagator acts as
//
//   U(pi) = Op(p(t_0, t_1)) ... Op(p(t_k, t_{k+1})),   p = frozen_exp_symbol,
//
// applied right to left (latest slice hits u first), and the sliced symbol
// is the Kohn-Nirenberg product p(t_0,t_1) # ... # p(t_k,t_{k+1}).  Under
// mesh refinement the sliced symbols form a Cauchy family: for a refinement
// pi' of pi the weighted sup distance is O(mesh(pi)), which plim_extrapolate
// uses to trace convergence along the dyadic family.

#include "grid.hpp"
#include "pdo.hpp"
#include "symbols.hpp"

namespace ndsym {

struct Partition {
    vecd times; // t_0 .. t_{k+1}, nondecreasing

    double s() const { return times.front(); }
    double t() const { return times.back(); }
    int intervals() const { return static_cast<int>(times.size()) - 1; }
    int interior() const { return static_cast<int>(times.size()) - 2; }
    double mesh() const;
};

// uniform partition with k interior points (k + 1 equal subintervals)
Partition partition_uniform(double s, double t, int interior);
// uniform partition with the given number of subintervals
Partition partition_uniform_slices(double s, double t, int slices);
Partition partition_explicit(vecd times);
// split every subinterval of parent into `splits` equal pieces
Partition partition_refine(const Partition& parent, int splits);

// true when every node of `coarse` appears in `fine` (same endpoints)
bool is_refinement(const Partition& coarse, const Partition& fine, double tol = 1e-12);

GridFunction evolve_time_sliced(const TimeDependentSymbol& a, const Partition& pi,
                                const GridFunction& u0, int n_quad = 8);

DiscreteSymbol sliced_symbol(const TimeDependentSymbol& a, const Partition& pi,
                             const TorusGrid& g, double eps = 0.0, int n_quad = 8);

// sup_{x,xi} |p(pi') - p(pi)| <xi>^{-2m}; pi' must refine pi
double refinement_delta(const TimeDependentSymbol& a, const Partition& pi,
                        const Partition& pi_fine, const TorusGrid& g, double eps = 0.0,
                        int n_quad = 8);

struct PlimTraceRow {
    int k = 0;          // subinterval count of the level
    double mesh = 0.0;
    double delta = 0.0; // weighted sup distance to the previous level (nan on the first)
    double runtime_ms = 0.0;
};

struct PlimResult {
    DiscreteSymbol p;   // finest sliced symbol reached
    std::vector<PlimTraceRow> trace;
    bool converged = false;
};

// dyadic schedule 1, 2, 4, ... subintervals until the successive weighted
// delta drops below tol (or k_max is hit)
PlimResult plim_extrapolate(const TimeDependentSymbol& a, double s, double t,
                            const TorusGrid& g, double tol, int k_max, double eps = 0.0,
                            int n_quad = 8);

} // namespace ndsym
