#include "fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ndsym::dft {
namespace {

// FFTW plans are cached per (d, n, sign) and executed on internal buffers;
// plan creation is not thread-safe, execution on private buffers is fine
// under the mutex we hold anyway.
struct PlanSlot {
    fftw_plan plan = nullptr;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    int count = 0;
};

std::mutex g_mutex;
std::map<std::tuple<int, int, int>, PlanSlot>& plan_cache() {
    static std::map<std::tuple<int, int, int>, PlanSlot> cache;
    return cache;
}

PlanSlot& get_plan(int d, int n, int sign) {
    auto key = std::make_tuple(d, n, sign);
    auto& cache = plan_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    PlanSlot slot;
    slot.count = d == 1 ? n : n * n;
    slot.in = fftw_alloc_complex(slot.count);
    slot.out = fftw_alloc_complex(slot.count);
    slot.plan = d == 1
                    ? fftw_plan_dft_1d(n, slot.in, slot.out, sign, FFTW_ESTIMATE)
                    : fftw_plan_dft_2d(n, n, slot.in, slot.out, sign, FFTW_ESTIMATE);
    if (!slot.plan) throw std::runtime_error("fftw plan creation failed");
    return cache.emplace(key, slot).first->second;
}

// run the raw FFT (no centering, no normalization).  fftw_complex is
// layout-compatible with std::complex<double>.
std::vector<cplx> run_fft(const TorusGrid& g, const std::vector<cplx>& x, int sign) {
    if (static_cast<int>(x.size()) != g.size())
        throw std::invalid_argument("dft: input size does not match grid");
    std::lock_guard<std::mutex> lock(g_mutex);
    PlanSlot& slot = get_plan(g.d, g.n, sign);
    std::copy(x.begin(), x.end(), reinterpret_cast<cplx*>(slot.in));
    fftw_execute(slot.plan);
    const cplx* out = reinterpret_cast<const cplx*>(slot.out);
    return std::vector<cplx>(out, out + x.size());
}

inline double parity(int k) { return (k & 1) ? -1.0 : 1.0; }

} // namespace

std::vector<cplx> forward(const TorusGrid& g, const std::vector<cplx>& u) {
    std::vector<cplx> y = run_fft(g, u, FFTW_FORWARD);
    const int n = g.n;
    std::vector<cplx> c(u.size());
    const double scale = 1.0 / g.size();
    if (g.d == 1) {
        for (int j = 0; j < n; ++j) {
            int k = j - n / 2;
            c[j] = parity(k) * scale * y[(k + n) % n];
        }
    } else {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1) {
                int k0 = j0 - n / 2, k1 = j1 - n / 2;
                c[g.flat(j0, j1)] =
                    parity(k0 + k1) * scale * y[g.flat((k0 + n) % n, (k1 + n) % n)];
            }
    }
    return c;
}

std::vector<cplx> inverse(const TorusGrid& g, const std::vector<cplx>& c) {
    const int n = g.n;
    std::vector<cplx> v(c.size());
    if (g.d == 1) {
        for (int j = 0; j < n; ++j) {
            int k = j - n / 2;
            v[(k + n) % n] = parity(k) * c[j];
        }
    } else {
        for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1) {
                int k0 = j0 - n / 2, k1 = j1 - n / 2;
                v[g.flat((k0 + n) % n, (k1 + n) % n)] = parity(k0 + k1) * c[g.flat(j0, j1)];
            }
    }
    return run_fft(g, v, FFTW_BACKWARD);
}

} // namespace ndsym::dft
