#pragma once
// Centered discrete Fourier transforms on a TorusGrid (FFTW behind the
// scenes).  Conventions:
//
//   forward:  c_k = n^{-d} * sum_i u(x_i) e^{-i xi_k . x_i}
//   inverse:  u(x_i) = sum_k c_k e^{+i xi_k . x_i}
//
// with x_i = -L/2 + i L/n and xi_k = 2 pi k / L, k in [-n/2, n/2)^d.  The
// centered origin only changes bin phases: e^{-i xi_k x_i} =
// (-1)^k e^{-2 pi i k i / n} per axis, so both directions reduce to plain
// FFTs plus a (-1)^k checkerboard.  inverse(forward(u)) == u to roundoff.

#include "grid.hpp"

namespace ndsym::dft {

// Fourier coefficients in centered storage order (index j <-> k = j - n/2).
std::vector<cplx> forward(const TorusGrid& g, const std::vector<cplx>& u);

// Values on the spatial lattice from centered coefficients.
std::vector<cplx> inverse(const TorusGrid& g, const std::vector<cplx>& c);

} // namespace ndsym::dft
