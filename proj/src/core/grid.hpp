#pragma once
// Periodic lattice on the torus [-L/2, L/2)^d and the containers that live
// on it.  Spatial nodes are x_i = -L/2 + i*L/n; the dual lattice carries the
// frequencies xi_k = 2*pi*k/L with k in [-n/2, n/2).  Everything downstream
// (transforms, operators, kernels) works in these centered coordinates.

#include <complex>
#include <cstdint>
#include <vector>

namespace ndsym {

using cplx = std::complex<double>;
using vecd = std::vector<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct TorusGrid {
    int d = 1;       // dimension, 1 or 2
    int n = 64;      // nodes per axis, power of two
    double L = 20.0; // period

    TorusGrid() = default;
    TorusGrid(int d_, int n_, double L_);

    int size() const { return d == 1 ? n : n * n; }
    double dx() const { return L / n; }
    double dxi() const { return 2.0 * kPi / L; }

    // i-th node / k-th frequency along one axis (storage order: k = j - n/2).
    double node1(int i) const { return -0.5 * L + i * dx(); }
    double freq1(int j) const { return (j - n / 2) * dxi(); }

    // flatten/unflatten for d = 2 (row-major: index = i0*n + i1)
    int flat(int i0, int i1) const { return i0 * n + i1; }

    vecd node(int flat_index) const;
    vecd freq(int flat_index) const;

    bool operator==(const TorusGrid& o) const {
        return d == o.d && n == o.n && L == o.L;
    }
};

// Complex-valued function sampled on the spatial lattice.
struct GridFunction {
    TorusGrid grid;
    std::vector<cplx> values; // size grid.size()

    GridFunction() = default;
    explicit GridFunction(const TorusGrid& g) : grid(g), values(g.size()) {}

    cplx& operator[](int i) { return values[i]; }
    const cplx& operator[](int i) const { return values[i]; }

    double sup_norm() const;
    double l2_norm() const; // sqrt(dx^d * sum |u_i|^2)
};

double sup_distance(const GridFunction& a, const GridFunction& b);
double l2_distance(const GridFunction& a, const GridFunction& b);

// Symbol tabulated on the phase-space lattice.  A multiplier (x-independent)
// symbol stores a single frequency row; a variable symbol stores the dense
// n x n table (d = 1 only).  at(ix, ik) hides the layout.
struct DiscreteSymbol {
    TorusGrid grid;
    bool multiplier = false;
    std::vector<cplx> values; // multiplier: size(); dense: n*n (d=1)

    DiscreteSymbol() = default;

    static DiscreteSymbol make_multiplier(const TorusGrid& g);
    static DiscreteSymbol make_dense(const TorusGrid& g);

    cplx at(int ix, int ik) const {
        return multiplier ? values[ik] : values[static_cast<std::size_t>(ix) * grid.n + ik];
    }
    cplx& ref(int ix, int ik) {
        return multiplier ? values[ik] : values[static_cast<std::size_t>(ix) * grid.n + ik];
    }

    double sup_norm() const;
};

double sup_distance(const DiscreteSymbol& a, const DiscreteSymbol& b);

} // namespace ndsym
