// End-to-end acceptance checks.  Each criterion prints one [PASS]/[FAIL]
// line with its measured constants; the process exits nonzero if any fail.

#include "core/decomposition.hpp"
#include "core/markov.hpp"
#include "core/parametrix.hpp"
#include "core/pdo.hpp"
#include "core/rng.hpp"
#include "core/symbols.hpp"
#include "core/timeslice.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace ndsym;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

class Gate {
  public:
    void expect(bool cond, const std::string& what) {
        ok_ = ok_ && cond;
        if (!cond) failures_.push_back(what);
    }
    void note(const std::string& s) { notes_.push_back(s); }
    Outcome finish() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < notes_.size(); ++i)
            os << (i ? ", " : "") << notes_[i];
        for (const auto& f : failures_) os << "; FAILED: " << f;
        return {ok_, os.str()};
    }

  private:
    bool ok_ = true;
    std::vector<std::string> notes_;
    std::vector<std::string> failures_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

GridFunction gaussian(const TorusGrid& g, double sigma) {
    GridFunction u(g);
    for (int i = 0; i < g.n; ++i) {
        double x = g.node1(i);
        u.values[i] = std::exp(-0.5 * x * x / (sigma * sigma));
    }
    return u;
}

TimeDependentSymbol heat_symbol() {
    return symbol_multiplier(psi_quadratic(), 2.0, 2.0, 2);
}

TimeDependentSymbol sine_symbol(double L) {
    return symbol_separable(0.5, 2.0 * kPi / L, psi_stable(1.5, 1.0), 0.0, 1.5, 1.5, 2);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------
// 1. multiplier exactness + Gaussian closed form, within one second
Outcome criterion1() {
    Gate gate;
    auto t0 = std::chrono::steady_clock::now();

    TorusGrid g(1, 256, 20.0);
    TimeDependentSymbol a = heat_symbol();
    GridFunction u0 = gaussian(g, 1.0);
    double t = 0.5;

    GridFunction u1 = evolve_time_sliced(a, partition_uniform(0.0, t, 1), u0);
    GridFunction u16 = evolve_time_sliced(a, partition_uniform(0.0, t, 16), u0);
    double part = sup_distance(u1, u16);
    gate.note("partition dev " + fmt(part));
    gate.expect(part <= 1e-10, "uniform(1) vs uniform(16) sup " + fmt(part) + " > 1e-10");

    double var = 1.0 + 2.0 * t, worst = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double x = g.node1(i);
        double want = std::exp(-0.5 * x * x / var) / std::sqrt(var);
        worst = std::max(worst, std::abs(u16.values[i] - want));
    }
    gate.note("closed-form dev " + fmt(worst));
    gate.expect(worst <= 1e-6, "Gaussian closed form sup " + fmt(worst) + " > 1e-6");

    double elapsed = seconds_since(t0);
    gate.note(fmt(elapsed) + " s");
    gate.expect(elapsed <= 1.0, "runtime " + fmt(elapsed) + " s > 1 s");
    return gate.finish();
}

// ---------------------------------------------------------------------
// 2. refinement deltas halve across three consecutive mesh halvings
Outcome criterion2() {
    Gate gate;
    auto t0 = std::chrono::steady_clock::now();

    TorusGrid g(1, 64, 20.0);
    TimeDependentSymbol a = sine_symbol(g.L);
    double s = 0.0, t = 0.4;

    vecd deltas;
    for (int k : {1, 2, 4, 8})
        deltas.push_back(refinement_delta(a, partition_uniform_slices(s, t, k),
                                          partition_uniform_slices(s, t, 2 * k), g));
    for (int i = 0; i < 3; ++i) {
        double ratio = deltas[i] / deltas[i + 1];
        gate.note("ratio " + fmt(ratio));
        gate.expect(ratio >= 1.5 && ratio <= 2.6,
                    "halving ratio " + fmt(ratio) + " outside [1.5, 2.6]");
    }

    double elapsed = seconds_since(t0);
    gate.note(fmt(elapsed) + " s");
    gate.expect(elapsed <= 60.0, "runtime " + fmt(elapsed) + " s > 60 s");
    return gate.finish();
}

// ---------------------------------------------------------------------
// 3. key-lemma identity and its four scaling sub-checks at k = 1, 2, 3
Outcome criterion3() {
    Gate gate;
    auto t0 = std::chrono::steady_clock::now();

    TorusGrid g(1, 32, 20.0);
    TimeDependentSymbol a = sine_symbol(g.L);
    for (int k = 1; k <= 3; ++k) {
        KeyLemmaReport rep = verify_key_lemma(a, partition_uniform(0.0, 0.05, k), g);
        gate.note("k=" + std::to_string(k) + " residual " + fmt(rep.identity_residual));
        gate.expect(rep.identity_residual <= 1e-3,
                    "identity residual " + fmt(rep.identity_residual) + " > 1e-3 at k=" +
                        std::to_string(k));
        for (const auto& c : rep.scaling)
            gate.expect(c.passed, c.name + " = " + fmt(c.value) + " outside [" + fmt(c.lo) +
                                      ", " + fmt(c.hi) + "] at k=" + std::to_string(k));
    }

    double elapsed = seconds_since(t0);
    gate.note(fmt(elapsed) + " s");
    gate.expect(elapsed <= 120.0, "runtime " + fmt(elapsed) + " s > 120 s");
    return gate.finish();
}

// ---------------------------------------------------------------------
// 4. telescoped remainder assembly and the skip-sequence combinatorics
Outcome criterion4() {
    Gate gate;

    TorusGrid g(1, 32, 20.0);
    TimeDependentSymbol a = sine_symbol(g.L);
    FujiwaraReport rep = verify_fujiwara(a, partition_uniform(0.0, 0.1, 3), g);
    gate.note("residual " + fmt(rep.identity_residual));
    gate.expect(rep.identity_residual <= 1e-3,
                "assembled residual " + fmt(rep.identity_residual) + " > 1e-3");

    auto s3 = enumerate_skip_sequences(3);
    std::set<std::vector<int>> got(s3.begin(), s3.end());
    std::set<std::vector<int>> want = {{2}, {3}, {4}, {2, 4}};
    gate.expect(got == want, "skip sequences at k=3 differ from {(2),(3),(4),(2,4)}");
    gate.note("skip sets ok");

    for (int k = 0; k <= 12; ++k) {
        std::set<std::vector<int>> brute;
        for (unsigned mask = 1; mask < (1u << k); ++mask) {
            std::vector<int> seq;
            for (int b = 0; b < k; ++b)
                if (mask & (1u << b)) seq.push_back(b + 2);
            bool admissible = true;
            for (std::size_t i = 1; i < seq.size(); ++i)
                if (seq[i] - seq[i - 1] < 2) admissible = false;
            if (admissible) brute.insert(seq);
        }
        auto fast = enumerate_skip_sequences(k);
        gate.expect(fast.size() == brute.size() &&
                        std::set<std::vector<int>>(fast.begin(), fast.end()) == brute,
                    "skip count mismatch at k=" + std::to_string(k));
    }
    gate.note("counts match brute force to k=12");
    return gate.finish();
}

// ---------------------------------------------------------------------
// 5. evolution-family axioms for the heat and sine symbols
Outcome criterion5() {
    Gate gate;
    TorusGrid g(1, 128, 20.0);
    double r = 0.0, s = 0.125, t = 0.25;
    int k = 16;

    for (bool variable : {false, true}) {
        TimeDependentSymbol a = variable ? sine_symbol(g.L) : heat_symbol();
        const char* tag = variable ? "sine" : "heat";
        Report rep = verify_evolution_family(a, g, r, s, t, k);
        for (const auto& item : rep.items)
            gate.expect(item.passed, std::string(tag) + " " + item.check + " = " +
                                         fmt(item.constant) + " (" + item.witness + ")");
        const CheckItem* ck = rep.find("chapman_kolmogorov");
        const CheckItem* ratio = rep.find("ck_ratio");
        if (ck) gate.note(std::string(tag) + " CK " + fmt(ck->constant));
        if (variable && ratio) {
            gate.note("shrink ratio " + fmt(ratio->constant));
            gate.expect(ratio->constant >= 1.4 && ratio->constant <= 2.8,
                        "sine CK shrink ratio " + fmt(ratio->constant) +
                            " outside [1.4, 2.8]");
        }
    }
    return gate.finish();
}

// ---------------------------------------------------------------------
// 6. heat-kernel row against the Gaussian density
Outcome criterion6() {
    Gate gate;
    TorusGrid g(1, 256, 20.0);
    double dt = 0.25;
    TransitionKernel k = transition_kernel(heat_symbol(), g, 0.0, dt, 4, 0.0);

    double var = 2.0 * dt, dx = g.L / g.n;
    int i0 = g.n / 2; // the x = 0 row
    double worst = 0.0;
    for (int j = 0; j < g.n; ++j) {
        double y = g.node1(j);
        double density = std::exp(-0.5 * y * y / var) / std::sqrt(2.0 * kPi * var);
        if (density < 1e-6) continue;
        worst = std::max(worst, std::abs(k.at(i0, j) / (density * dx) - 1.0));
    }
    gate.note("max rel dev " + fmt(worst));
    gate.expect(worst <= 1e-3, "row deviation " + fmt(worst) + " > 1e-3");
    return gate.finish();
}

// ---------------------------------------------------------------------
// 7. parametrix vs time-slicing cross-validation
Outcome criterion7() {
    Gate gate;
    TorusGrid g(1, 64, 20.0);
    TimeDependentSymbol a = sine_symbol(g.L);
    int J = 2, k = 32;
    CrossValidateResult res = cross_validate(a, 0.0, 0.1, J, k, gaussian(g, 1.0));

    gate.note("final distance " + fmt(res.final_distance));
    gate.expect(res.final_distance <= 1e-2,
                "relative distance " + fmt(res.final_distance) + " > 1e-2");

    for (int j = 0; j < J; ++j)
        gate.expect(res.rows[j + 1].distance <= res.rows[j].distance * 1.1 + 1e-15,
                    "distance grew from J=" + std::to_string(j) + " (" +
                        fmt(res.rows[j].distance) + " -> " + fmt(res.rows[j + 1].distance) +
                        ")");
    // slice sweep rows follow the depth sweep: k = 8, 16, then the final 32
    if (res.rows.size() >= static_cast<std::size_t>(J + 3)) {
        const auto& k8 = res.rows[J + 1];
        const auto& k16 = res.rows[J + 2];
        gate.expect(k16.distance <= k8.distance * 1.1 + 1e-15,
                    "distance grew from k=8 to k=16");
        gate.expect(res.rows[J].distance <= k16.distance * 1.1 + 1e-15,
                    "distance grew from k=16 to k=32");
    } else {
        gate.expect(false, "missing slice-sweep rows");
    }
    return gate.finish();
}

// ---------------------------------------------------------------------
// 8. inequality fuzzing over the built-in negative definite functions
Outcome criterion8() {
    Gate gate;
    struct Entry {
        std::string name;
        Psi psi;
    };
    LevyTriplet trip;
    trip.d = 1;
    trip.drift = {0.0};
    trip.Q = {1.0};
    trip.atoms = {{{1.0}, 1.0}, {{-2.0}, 0.5}};
    std::vector<Entry> psis = {
        {"quadratic", psi_quadratic()},       {"stable-0.5", psi_stable(0.5, 1.0)},
        {"stable-1", psi_stable(1.0, 1.0)},   {"stable-1.5", psi_stable(1.5, 1.0)},
        {"stable-2", psi_stable(2.0, 1.0)},   {"relativistic", psi_relativistic()},
        {"triplet", psi_from_triplet(trip)},
    };

    const int pairs = 100000;
    const double box = 8.0;
    for (const auto& entry : psis) {
        SplitMix64 rng(1234);
        int violations = 0;
        for (int i = 0; i < pairs; ++i) {
            double xi = rng.next_in(-box, box);
            double eta = rng.next_in(-box, box);
            double r = (1.0 + std::abs(entry.psi.at1(xi))) /
                       ((1.0 + std::abs(entry.psi.at1(eta))) *
                        (1.0 + std::abs(entry.psi.at1(xi - eta))));
            if (r > 2.0 + 1e-12) ++violations;
        }
        gate.expect(violations == 0, entry.name + ": " + std::to_string(violations) +
                                         " Peetre violations");

        auto growth_const = [&](double b) {
            SplitMix64 r2(77);
            double c = 0.0;
            for (int i = 0; i < pairs; ++i) {
                double xi = r2.next_in(-b, b);
                c = std::max(c, std::abs(entry.psi.at1(xi)) / (1.0 + xi * xi));
            }
            return c;
        };
        double c1 = growth_const(box), c2 = growth_const(2.0 * box);
        gate.expect(std::abs(c2 / c1 - 1.0) <= 0.1,
                    entry.name + ": growth constant moved " + fmt(c1) + " -> " + fmt(c2));

        // the library battery agrees end to end
        Report rep = verify_ndf_properties(entry.psi, 1, pairs, box, 2026);
        gate.expect(rep.passed, entry.name + ": property battery failed");
    }
    gate.note("7 families x 1e5 pairs clean");
    return gate.finish();
}

// ---------------------------------------------------------------------
// 9. Monte Carlo consistency of the sampled heat process
Outcome criterion9() {
    Gate gate;
    TorusGrid g(1, 128, 20.0);
    TimeDependentSymbol a = heat_symbol();
    double t = 0.5;
    int steps = 8, n_paths = 10000;
    std::uint64_t seed = 12345;

    std::vector<TransitionKernel> chain;
    for (int m = 0; m < steps; ++m)
        chain.push_back(transition_kernel(a, g, t * m / steps, t * (m + 1) / steps, 1, 0.0));

    PathEnsemble ens = sample_paths(chain, 0.0, n_paths, seed);

    double mean = 0.0, var = 0.0;
    int last = ens.n_columns() - 1;
    for (int p = 0; p < n_paths; ++p) mean += ens.position(p, last);
    mean /= n_paths;
    for (int p = 0; p < n_paths; ++p) {
        double d = ens.position(p, last) - mean;
        var += d * d;
    }
    var /= n_paths;
    gate.note("variance " + fmt(var) + " (target " + fmt(2.0 * t) + ")");
    gate.expect(std::abs(var - 2.0 * t) <= 0.05 * 2.0 * t,
                "ensemble variance " + fmt(var) + " off 2t by more than 5%");

    double tv = empirical_check(ens, chain[0], 0);
    gate.note("one-step TV " + fmt(tv));
    gate.expect(tv <= 0.05, "one-step TV " + fmt(tv) + " > 0.05");

    PathEnsemble again = sample_paths(chain, 0.0, n_paths, seed);
    gate.expect(again.cells == ens.cells, "same seed produced different ensembles");
    gate.note("seed-stable");
    return gate.finish();
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"multiplier exactness and Gaussian closed form", criterion1},
        {"refinement deltas halve with the mesh", criterion2},
        {"key-lemma identity and scaling checks", criterion3},
        {"remainder assembly and skip sequences", criterion4},
        {"evolution-family axioms (heat, sine)", criterion5},
        {"heat-kernel row vs Gaussian density", criterion6},
        {"parametrix vs time-slicing cross-validation", criterion7},
        {"negative-definiteness inequality fuzzing", criterion8},
        {"Monte Carlo path consistency", criterion9},
    };

    int failures = 0;
    int idx = 0;
    for (const auto& c : criteria) {
        ++idx;
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.ok = false;
            out.detail = std::string("exception: ") + e.what();
        }
        if (!out.ok) ++failures;
        std::printf("[%s] criterion %d: %s (%s)\n", out.ok ? "PASS" : "FAIL", idx, c.name,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    if (failures) std::printf("%d of 9 criteria failed\n", failures);
    else std::printf("all 9 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
