#pragma once
// Pseudo-differential operators on the torus lattice.
//
//   Op(a) u(x) = sum_k a(x, xi_k) u_hat(k) e^{i xi_k x}
//
// with u_hat the centered Fourier coefficients.  Multiplier symbols go
// through the FFT (O(n log n)); variable symbols use the dense quadratic
// summation (d = 1).
//
// compose_kn discretizes the Kohn-Nirenberg product
//
//   (b # c)(x, xi) = Os-iint e^{-i y eta} b(x, xi + eta) c(x + y, xi) dy dEta
//
// on the periodic lattice (y over symmetric offsets, eta over the dual
// lattice, xi + eta wrapped modulo the period), so Op(b # c) = Op(b) Op(c):
// b is the symbol of the operator applied *second*.  eps > 0 inserts the
// Gaussian cut-off chi(eps y) chi(eps eta); eps = 0 means chi == 1, which on
// a finite lattice is exact (no oscillatory-integral regularization needed).

#include "grid.hpp"
#include "symbols.hpp"

namespace ndsym {

// sample a(t; x, xi) on the phase-space lattice (multiplier layout when the
// symbol is x-independent; dense d = 1 otherwise)
DiscreteSymbol tabulate_symbol(const TimeDependentSymbol& a, double t, const TorusGrid& g);

GridFunction apply_pdo(const DiscreteSymbol& sym, const GridFunction& u);

// p(s, t; x, xi) = exp(-int_s^t a(tau; x, xi) dtau)
DiscreteSymbol frozen_exp_symbol(const TimeDependentSymbol& a, double s, double t,
                                 const TorusGrid& g, int n_quad = 8);

DiscreteSymbol compose_kn(const DiscreteSymbol& b, const DiscreteSymbol& c, double eps = 0.0);

// || u ||_{H^{s,psi}} = sqrt( L^d sum_k (1 + Re psi(xi_k))^s |u_hat(k)|^2 )
double psi_sobolev_norm(const GridFunction& u, const Psi& psi, double s);

} // namespace ndsym
