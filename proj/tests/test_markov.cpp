#include <doctest.h>

#include "core/markov.hpp"
#include "core/symbols.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace ndsym;

namespace {

TimeDependentSymbol sine_symbol(double L) {
    return symbol_separable(0.5, 2.0 * kPi / L, psi_stable(1.5, 1.0), 0.0, 1.5, 1.5, 2);
}

std::vector<TransitionKernel> uniform_chain(const TimeDependentSymbol& a, const TorusGrid& g,
                                            double s, double t, int steps, double smoothing) {
    std::vector<TransitionKernel> out;
    for (int m = 0; m < steps; ++m) {
        double ta = s + (t - s) * m / steps;
        double tb = (m + 1 == steps) ? t : s + (t - s) * (m + 1) / steps;
        out.push_back(transition_kernel(a, g, ta, tb, 1, smoothing));
    }
    return out;
}

} // namespace

TEST_CASE("zero symbol gives the identity kernel") {
    TorusGrid g(1, 64, 20.0);
    TimeDependentSymbol zero = symbol_multiplier(psi_zero(), 2.0, 2.0, 2);

    // zero-length window: the construction never applies an operator
    TransitionKernel id = transition_kernel(zero, g, 0.3, 0.3, 4, 0.0);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            CHECK(id.at(i, j) == (i == j ? 1.0 : 0.0));

    // positive window: identity up to transform roundoff
    TransitionKernel k = transition_kernel(zero, g, 0.0, 0.5, 4, 0.0);
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            worst = std::max(worst, std::abs(k.at(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(worst <= 1e-12);
}

TEST_CASE("zero symbol with smoothing reproduces the mollifier row") {
    TorusGrid g(1, 64, 20.0);
    TimeDependentSymbol zero = symbol_multiplier(psi_zero(), 2.0, 2.0, 2);
    double smoothing = 1.0;
    TransitionKernel k = transition_kernel(zero, g, 0.0, 0.5, 2, smoothing);

    // expected row: the normalized periodic Gaussian bump, minimum image
    std::vector<double> bump(g.n);
    double c0 = 0.0;
    for (int o = 0; o < g.n; ++o) {
        int off = o <= g.n / 2 ? o : o - g.n;
        bump[o] = std::exp(-0.5 * (off / smoothing) * (off / smoothing));
        c0 += bump[o];
    }
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            double want = bump[((i - j) % g.n + g.n) % g.n] / c0;
            worst = std::max(worst, std::abs(k.at(i, j) - want));
        }
    CHECK(worst <= 1e-12);
    CHECK(k.row_sum_dev <= 1e-13);
}

TEST_CASE("heat kernel row matches the periodized Gaussian density") {
    TorusGrid g(1, 256, 20.0);
    TimeDependentSymbol heat = symbol_multiplier(psi_quadratic(), 2.0, 2.0, 2);
    double dt = 0.25;
    TransitionKernel k = transition_kernel(heat, g, 0.0, dt, 4, 0.0);

    double var = 2.0 * dt, dx = g.L / g.n;
    int i0 = g.n / 2; // row at x = 0
    for (int j = 0; j < g.n; ++j) {
        double y = g.node1(j);
        double density = std::exp(-0.5 * y * y / var) / std::sqrt(2.0 * kPi * var);
        if (density < 1e-6) continue; // tails are below the comparison floor
        CHECK(std::abs(k.at(i0, j) - density * dx) <= 1e-3 * density * dx);
    }
}

TEST_CASE("kernel rows are exactly stochastic for conservative symbols") {
    TorusGrid g(1, 64, 20.0);
    TransitionKernel k = transition_kernel(symbol_multiplier(psi_stable(1.5, 1.0), 1.5, 1.5, 2),
                                           g, 0.0, 0.25, 4, 0.0);
    CHECK(k.row_sum_dev <= 1e-6);
    CHECK(k.min_entry >= -1e-4);
    CHECK(k.max_imag <= 1e-10);

    TransitionKernel ks = transition_kernel(sine_symbol(g.L), g, 0.0, 0.25, 8, 0.0);
    CHECK(ks.row_sum_dev <= 1e-6);
}

TEST_CASE("kernel construction rejects non-conservative symbols") {
    TorusGrid g(1, 32, 20.0);
    // killing part: a(x, 0) = 1 != 0
    TimeDependentSymbol killed = symbol_custom(
        [](double, double, double xi) { return cplx(1.0 + xi * xi); }, psi_quadratic(), 2.0,
        2.0, 2, true, true);
    CHECK_THROWS_AS(transition_kernel(killed, g, 0.0, 0.25, 2, 0.0), std::invalid_argument);

    // negative real part fails the ellipticity screen
    TimeDependentSymbol neg = symbol_custom(
        [](double, double, double xi) { return cplx(-xi * xi); }, psi_quadratic(), 2.0, 2.0,
        2, true, true);
    CHECK_THROWS(transition_kernel(neg, g, 0.0, 0.25, 2, 0.0));
}

TEST_CASE("evolution family axioms for the heat multiplier") {
    TorusGrid g(1, 64, 20.0);
    TimeDependentSymbol heat = symbol_multiplier(psi_quadratic(), 2.0, 2.0, 2);
    // windows wide enough that the kernel is resolved at dx = 0.3125
    Report rep = verify_evolution_family(heat, g, 0.0, 0.25, 0.5, 4);
    for (const auto& item : rep.items) {
        CAPTURE(item.check);
        CAPTURE(item.constant);
        CHECK(item.passed);
    }
    CHECK(rep.passed);
    REQUIRE(rep.find("chapman_kolmogorov") != nullptr);
    CHECK(rep.find("chapman_kolmogorov")->constant <= 1e-8);
}

TEST_CASE("evolution family axioms for the sine-modulated symbol") {
    TorusGrid g(1, 128, 20.0);
    Report rep = verify_evolution_family(sine_symbol(g.L), g, 0.0, 0.125, 0.25, 16);
    for (const auto& item : rep.items) {
        CAPTURE(item.check);
        CAPTURE(item.constant);
        CAPTURE(item.witness);
        CHECK(item.passed);
    }
    REQUIRE(rep.find("chapman_kolmogorov") != nullptr);
    CHECK(rep.find("chapman_kolmogorov")->constant <= 1e-3);
}

TEST_CASE("constant paths under the identity kernel chain") {
    TorusGrid g(1, 64, 20.0);
    TimeDependentSymbol zero = symbol_multiplier(psi_zero(), 2.0, 2.0, 2);
    auto chain = uniform_chain(zero, g, 0.0, 0.5, 4, 0.0);
    PathEnsemble ens = sample_paths(chain, 1.3, 200, 7);

    int cell0 = ens.cells[0][0];
    CHECK(g.node1(cell0) == doctest::Approx(1.25).epsilon(1e-12)); // snapped to the lattice
    bool constant = true;
    for (int p = 0; p < ens.n_paths(); ++p)
        for (int c = 0; c < ens.n_columns(); ++c) constant = constant && ens.cells[p][c] == cell0;
    CHECK(constant);
    CHECK(empirical_check(ens, chain[0], 0) <= 1e-12);

    // an exactly-identity kernel gives total variation exactly zero
    TransitionKernel id;
    id.grid = g;
    id.s = 0.0;
    id.t = 0.1;
    id.P.assign(static_cast<std::size_t>(g.n) * g.n, 0.0);
    for (int i = 0; i < g.n; ++i) id.P[static_cast<std::size_t>(i) * g.n + i] = 1.0;
    PathEnsemble exact = sample_paths({id}, 1.3, 100, 9);
    CHECK(exact.clamped_mass == 0.0);
    CHECK(empirical_check(exact, id, 0) == 0.0);
}

TEST_CASE("sampling is reproducible and seed-sensitive") {
    TorusGrid g(1, 64, 20.0);
    TimeDependentSymbol heat = symbol_multiplier(psi_quadratic(), 2.0, 2.0, 2);
    auto chain = uniform_chain(heat, g, 0.0, 0.5, 4, 0.0);

    PathEnsemble a = sample_paths(chain, 0.0, 500, 42);
    PathEnsemble b = sample_paths(chain, 0.0, 500, 42);
    CHECK(a.cells == b.cells);

    PathEnsemble c = sample_paths(chain, 0.0, 500, 43);
    CHECK(a.cells != c.cells);
}

TEST_CASE("heat ensemble statistics: variance and one-step distribution") {
    TorusGrid g(1, 128, 20.0);
    TimeDependentSymbol heat = symbol_multiplier(psi_quadratic(), 2.0, 2.0, 2);
    double t = 0.5;
    auto chain = uniform_chain(heat, g, 0.0, t, 8, 0.0);
    int n_paths = 10000;
    PathEnsemble ens = sample_paths(chain, 0.0, n_paths, 12345);

    double mean = 0.0, var = 0.0;
    for (int p = 0; p < n_paths; ++p) mean += ens.position(p, ens.n_columns() - 1);
    mean /= n_paths;
    for (int p = 0; p < n_paths; ++p) {
        double d = ens.position(p, ens.n_columns() - 1) - mean;
        var += d * d;
    }
    var /= n_paths;
    CHECK(std::abs(var - 2.0 * t) <= 0.05 * (2.0 * t));

    CHECK(empirical_check(ens, chain[0], 0) <= 0.05);
}

TEST_CASE("sampler enforces the clamped-mass budget") {
    TorusGrid g(1, 8, 8.0);
    TransitionKernel bad;
    bad.grid = g;
    bad.s = 0.0;
    bad.t = 0.1;
    bad.P.assign(static_cast<std::size_t>(g.n) * g.n, 0.0);
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) bad.P[static_cast<std::size_t>(i) * g.n + j] = 1.0 / g.n;
        // push one entry negative beyond the 1e-3 budget
        bad.P[static_cast<std::size_t>(i) * g.n] = -0.01;
        bad.P[static_cast<std::size_t>(i) * g.n + 1] += 0.01 + 1.0 / g.n;
    }
    CHECK_THROWS_AS(sample_paths({bad}, 0.0, 10, 1), std::runtime_error);
}

TEST_CASE("sampler validates the kernel chain") {
    TorusGrid g(1, 32, 20.0);
    TimeDependentSymbol heat = symbol_multiplier(psi_quadratic(), 2.0, 2.0, 2);
    TransitionKernel k1 = transition_kernel(heat, g, 0.0, 0.1, 1, 0.0);
    TransitionKernel k3 = transition_kernel(heat, g, 0.2, 0.3, 1, 0.0); // gap after k1
    CHECK_THROWS_AS(sample_paths({k1, k3}, 0.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_paths({}, 0.0, 10, 1), std::invalid_argument);
}
