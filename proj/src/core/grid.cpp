#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ndsym {

static bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

TorusGrid::TorusGrid(int d_, int n_, double L_) : d(d_), n(n_), L(L_) {
    if (d != 1 && d != 2)
        throw std::invalid_argument("TorusGrid: d must be 1 or 2");
    if (!power_of_two(n))
        throw std::invalid_argument("TorusGrid: n must be a power of two");
    if (!(L > 0.0))
        throw std::invalid_argument("TorusGrid: L must be positive");
}

vecd TorusGrid::node(int flat_index) const {
    if (d == 1) return {node1(flat_index)};
    return {node1(flat_index / n), node1(flat_index % n)};
}

vecd TorusGrid::freq(int flat_index) const {
    if (d == 1) return {freq1(flat_index)};
    return {freq1(flat_index / n), freq1(flat_index % n)};
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (const cplx& v : values) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::l2_norm() const {
    double s = 0.0;
    for (const cplx& v : values) s += std::norm(v);
    double cell = std::pow(grid.dx(), grid.d);
    return std::sqrt(cell * s);
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("sup_distance: grid mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

double l2_distance(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("l2_distance: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        s += std::norm(a.values[i] - b.values[i]);
    return std::sqrt(std::pow(a.grid.dx(), a.grid.d) * s);
}

DiscreteSymbol DiscreteSymbol::make_multiplier(const TorusGrid& g) {
    DiscreteSymbol s;
    s.grid = g;
    s.multiplier = true;
    s.values.assign(g.size(), cplx(0.0));
    return s;
}

DiscreteSymbol DiscreteSymbol::make_dense(const TorusGrid& g) {
    if (g.d != 1)
        throw std::invalid_argument("DiscreteSymbol: dense tables are d=1 only");
    DiscreteSymbol s;
    s.grid = g;
    s.multiplier = false;
    s.values.assign(static_cast<std::size_t>(g.n) * g.n, cplx(0.0));
    return s;
}

double DiscreteSymbol::sup_norm() const {
    double m = 0.0;
    for (const cplx& v : values) m = std::max(m, std::abs(v));
    return m;
}

double sup_distance(const DiscreteSymbol& a, const DiscreteSymbol& b) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument("sup_distance: grid mismatch");
    if (a.multiplier == b.multiplier) {
        double m = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i)
            m = std::max(m, std::abs(a.values[i] - b.values[i]));
        return m;
    }
    // mixed layouts: compare elementwise through at()
    double m = 0.0;
    int rows = a.grid.d == 1 ? a.grid.n : a.grid.size();
    for (int ix = 0; ix < rows; ++ix)
        for (int ik = 0; ik < a.grid.size(); ++ik)
            m = std::max(m, std::abs(a.at(ix, ik) - b.at(ix, ik)));
    return m;
}

} // namespace ndsym
