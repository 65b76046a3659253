#pragma once
// Small shared numerics: Gauss-Legendre rules and central finite-difference
// stencils.  The 5-point stencils are 4th-order accurate:
//
//   f'(z)  ~ [ f(z-2h) - 8 f(z-h) + 8 f(z+h) - f(z+2h) ] / (12 h)
//   f''(z) ~ [ -f(z-2h) + 16 f(z-h) - 30 f(z) + 16 f(z+h) - f(z+2h) ] / (12 h^2)

#include "grid.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace ndsym {

struct GaussRule {
    vecd nodes;   // on [-1, 1]
    vecd weights; // sum to 2
};

// Gauss-Legendre nodes by Newton iteration on P_n (cached per n).
inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: n out of range");

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n(x) = 0
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // three-term recurrence for P_n(x) and P_{n-1}(x)
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0); // P_n'(x)
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[n - 1 - i] = x; // ascending order
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return cache.emplace(n, rule).first->second;
}

// integral of f over [a, b] with an n-node Gauss-Legendre rule
inline cplx gauss_integrate(const std::function<cplx(double)>& f, double a, double b, int n) {
    if (a == b) return cplx(0.0);
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cplx acc(0.0);
    for (int i = 0; i < n; ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * acc;
}

// central 5-point derivative of order 1 or 2 with step h
inline cplx fd_central(const std::function<cplx(double)>& f, double z, int order, double h) {
    if (order == 0) return f(z);
    const cplx fm2 = f(z - 2 * h), fm1 = f(z - h), fp1 = f(z + h), fp2 = f(z + 2 * h);
    if (order == 1) return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    if (order == 2) {
        const cplx f0 = f(z);
        return (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    }
    throw std::invalid_argument("fd_central: order must be 0, 1 or 2");
}

// step rule for evaluator-backed derivatives: scale-aware, and widened with
// the total differentiation order so nested stencils stay above roundoff
// (the noise of a nested difference grows like eps / h^total_order)
inline double fd_step(double z, int total_order) {
    double scale = 1e-4;
    if (total_order == 2) scale = 1e-3;
    if (total_order == 3) scale = 3e-3;
    if (total_order >= 4) scale = 1e-2;
    return scale * (1.0 + std::abs(z));
}

} // namespace ndsym
