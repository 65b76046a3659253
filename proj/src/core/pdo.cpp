#include "pdo.hpp"

#include "fourier.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ndsym {

DiscreteSymbol tabulate_symbol(const TimeDependentSymbol& a, double t, const TorusGrid& g) {
    if (a.x_independent) {
        DiscreteSymbol s = DiscreteSymbol::make_multiplier(g);
        for (int j = 0; j < g.size(); ++j) s.values[j] = a(t, vecd(g.d, 0.0), g.freq(j));
        return s;
    }
    if (g.d != 1)
        throw std::invalid_argument("tabulate_symbol: variable symbols need d = 1");
    DiscreteSymbol s = DiscreteSymbol::make_dense(g);
    for (int ix = 0; ix < g.n; ++ix)
        for (int ik = 0; ik < g.n; ++ik)
            s.ref(ix, ik) = a.at1(t, g.node1(ix), g.freq1(ik));
    return s;
}

GridFunction apply_pdo(const DiscreteSymbol& sym, const GridFunction& u) {
    const TorusGrid& g = u.grid;
    if (!(sym.grid == g))
        throw std::invalid_argument("apply_pdo: symbol and function grids differ");

    std::vector<cplx> c = dft::forward(g, u.values);
    GridFunction out(g);

    if (sym.multiplier) {
        for (int j = 0; j < g.size(); ++j) c[j] *= sym.values[j];
        out.values = dft::inverse(g, c);
        return out;
    }

    // dense path (d = 1): out(x_i) = sum_k a(x_i, xi_k) c_k e^{i xi_k x_i},
    // e^{i xi_k x_i} = (-1)^k e^{2 pi i k i / n} with the checkerboard folded
    // into the coefficients.
    const int n = g.n;
    std::vector<cplx> t(n);
    for (int j = 0; j < n; ++j) t[j] = ((j - n / 2) & 1) ? -c[j] : c[j];
    for (int i = 0; i < n; ++i) {
        const cplx w = std::polar(1.0, 2.0 * kPi * i / n);
        cplx phase = (i & 1) ? -1.0 : 1.0; // e^{2 pi i (-n/2) i / n} = (-1)^i
        cplx acc(0.0);
        for (int j = 0; j < n; ++j) {
            acc += sym.at(i, j) * t[j] * phase;
            phase *= w;
        }
        out.values[i] = acc;
    }
    return out;
}

DiscreteSymbol frozen_exp_symbol(const TimeDependentSymbol& a, double s, double t,
                                 const TorusGrid& g, int n_quad) {
    if (t < s) throw std::invalid_argument("frozen_exp_symbol: t < s");

    auto integral = [&](const vecd& xv, const vecd& kv) -> cplx {
        if (g.d == 1) return time_integral(a, xv[0], kv[0], s, t, n_quad);
        if (a.time_independent) return (t - s) * a(s, xv, kv);
        return gauss_integrate([&](double tau) { return a(tau, xv, kv); }, s, t, n_quad);
    };
    auto freeze = [&](const vecd& xv, const vecd& kv) -> cplx {
        cplx acc = integral(xv, kv);
        if (-acc.real() > 700.0) {
            std::ostringstream os;
            os << "frozen_exp_symbol: exponent overflow (Re int = " << acc.real() << ")";
            throw std::domain_error(os.str());
        }
        return std::exp(-acc);
    };

    if (a.x_independent) {
        DiscreteSymbol sym = DiscreteSymbol::make_multiplier(g);
        const vecd x0(g.d, 0.0);
        for (int j = 0; j < g.size(); ++j) sym.values[j] = freeze(x0, g.freq(j));
        return sym;
    }

    if (g.d != 1)
        throw std::invalid_argument("frozen_exp_symbol: variable symbols need d = 1");
    DiscreteSymbol sym = DiscreteSymbol::make_dense(g);
    for (int ix = 0; ix < g.n; ++ix)
        for (int ik = 0; ik < g.n; ++ik)
            sym.ref(ix, ik) = freeze({g.node1(ix)}, {g.freq1(ik)});
    return sym;
}

DiscreteSymbol compose_kn(const DiscreteSymbol& b, const DiscreteSymbol& c, double eps) {
    const TorusGrid& g = b.grid;
    if (!(g == c.grid))
        throw std::invalid_argument("compose_kn: grids differ");

    // multiplier case: the y-sum is the exact lattice delta at eta = 0, so
    // with chi == 1 the product collapses pointwise (any d)
    if (b.multiplier && c.multiplier && eps == 0.0) {
        DiscreteSymbol out = DiscreteSymbol::make_multiplier(g);
        for (int j = 0; j < g.size(); ++j) out.values[j] = b.values[j] * c.values[j];
        return out;
    }

    if (g.d != 1)
        throw std::invalid_argument("compose_kn: d = 1 only for variable symbols");
    const int n = g.n;

    DiscreteSymbol out = DiscreteSymbol::make_dense(g);
    const double dx = g.dx(), dxi = g.dxi();

    if (eps == 0.0) {
        // chi == 1: the y-sum is a plain DFT of the rotated row of c, i.e.
        // S(i, k, m) = e^{2 pi i i mt / n} * sum_p e^{-2 pi i p mt / n} c(p, k)
        // with mt = m - n/2.  Precompute the x-transform of each c-column.
        std::vector<cplx> chat(static_cast<std::size_t>(n) * n);
        {
            TorusGrid line(1, n, g.L);
            std::vector<cplx> col(n);
            for (int k = 0; k < n; ++k) {
                for (int p = 0; p < n; ++p) col[p] = c.at(p, k);
                std::vector<cplx> f = dft::forward(line, col); // centered, 1/n scale
                // uncentered bins: sum_p e^{-2 pi i p mt / n} c(p,k) = n*(-1)^{mt}... use
                // the centered coefficients directly: f[j] = (1/n)(-1)^{k'} FFT bin, so
                // reconstruct sum_p e^{-2 pi i p mt/n} col_p = n * parity(mt) * f[mt + n/2]
                for (int m = 0; m < n; ++m) {
                    int mt = m - n / 2;
                    double par = (mt & 1) ? -1.0 : 1.0;
                    chat[static_cast<std::size_t>(m) * n + k] =
                        static_cast<double>(n) * par * f[m];
                }
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                cplx acc(0.0);
                for (int m = 0; m < n; ++m) {
                    int mt = m - n / 2;
                    int kw = ((k + mt) % n + n) % n; // xi + eta wrapped to the lattice
                    // e^{2 pi i i mt / n}
                    cplx rot = std::polar(1.0, 2.0 * kPi * i * mt / n);
                    acc += b.at(i, kw) * rot * chat[static_cast<std::size_t>(m) * n + k];
                }
                out.ref(i, k) = acc / static_cast<double>(n);
            }
        }
        return out;
    }

    // eps > 0: direct windowed double sum with chi(v) = e^{-|v|^2}
    std::vector<double> chi_y(n), chi_e(n);
    for (int q = 0; q < n; ++q) {
        double y = (q - n / 2) * dx;
        chi_y[q] = std::exp(-(eps * y) * (eps * y));
    }
    for (int m = 0; m < n; ++m) {
        double eta = (m - n / 2) * dxi;
        chi_e[m] = std::exp(-(eps * eta) * (eps * eta));
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            cplx acc(0.0);
            for (int m = 0; m < n; ++m) {
                int mt = m - n / 2;
                int kw = ((k + mt) % n + n) % n;
                cplx inner(0.0);
                for (int q = 0; q < n; ++q) {
                    int qt = q - n / 2;
                    // e^{-i y_q eta_m} = e^{-2 pi i qt mt / n}
                    cplx phase = std::polar(1.0, -2.0 * kPi * qt * mt / n);
                    inner += phase * chi_y[q] * c.at(((i + qt) % n + n) % n, k);
                }
                acc += chi_e[m] * b.at(i, kw) * inner;
            }
            out.ref(i, k) = acc / static_cast<double>(n);
        }
    }
    return out;
}

double psi_sobolev_norm(const GridFunction& u, const Psi& psi, double s) {
    const TorusGrid& g = u.grid;
    std::vector<cplx> c = dft::forward(g, u.values);
    double acc = 0.0;
    for (int j = 0; j < g.size(); ++j) {
        double w = std::pow(1.0 + psi(g.freq(j)).real(), s);
        acc += w * std::norm(c[j]);
    }
    return std::sqrt(std::pow(g.L, g.d) * acc);
}

} // namespace ndsym
