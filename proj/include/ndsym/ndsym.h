/* ndsym — evolution of pseudo-differential symbols on the torus.
 *
 * C interface to the shared library.  All entry points return an
 * ndsym_status; on any failure the thread-local message retrieved by
 * ndsym_last_error() describes what went wrong.  Objects returned through
 * out-parameters are owned by the caller and released with the matching
 * *_destroy / ndsym_string_free call.  Handles are opaque and safe to use
 * from multiple threads as long as each handle is confined to one thread at
 * a time.
 */
#ifndef NDSYM_H
#define NDSYM_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ndsym_status {
    NDSYM_OK = 0,
    NDSYM_ERR_INVALID_ARGUMENT = 1, /* bad pointer, dimension, or range   */
    NDSYM_ERR_CONFIG = 2,           /* malformed JSON or unknown command  */
    NDSYM_ERR_CHECK_FAILED = 3,     /* run completed, verification failed */
    NDSYM_ERR_RUNTIME = 4           /* construction/IO failure            */
} ndsym_status;

/* library version, static storage */
const char* ndsym_version(void);

/* message for the most recent failure on this thread ("" if none) */
const char* ndsym_last_error(void);

typedef struct ndsym_symbol ndsym_symbol;
typedef struct ndsym_grid ndsym_grid;
typedef struct ndsym_kernel ndsym_kernel;

/* Symbol from a JSON spec, e.g.
 *   {"kind":"multiplier","psi":{"type":"quadratic"},"m":2}
 *   {"kind":"separable","phi":{"amp":0.5,"freq":0.628},
 *    "psi":{"type":"stable","alpha":1.5},"m":1.5}
 */
ndsym_status ndsym_symbol_create(const char* spec_json, ndsym_symbol** out);
void ndsym_symbol_destroy(ndsym_symbol* sym);

/* a(t; x, xi) for x, xi of length d (must match the symbol dimension) */
ndsym_status ndsym_symbol_eval(const ndsym_symbol* sym, double t, const double* x,
                               const double* xi, int d, double* re, double* im);

/* periodic grid: d in {1,2}, n a power of two, period L > 0 */
ndsym_status ndsym_grid_create(int d, int n, double L, ndsym_grid** out);
void ndsym_grid_destroy(ndsym_grid* grid);

/* Time-sliced evolution of u0 over [s, t] with `slices` uniform
 * subintervals.  u0 and out hold grid-size complex values as interleaved
 * (re, im) pairs; out may alias u0. */
ndsym_status ndsym_evolve(const ndsym_symbol* sym, const ndsym_grid* grid, double s,
                          double t, int slices, int n_quad, const double* u0, double* out);

/* Markov transition kernel over [s, t]; smoothing is the mollifier width in
 * cells (0 = exact cell indicators). */
ndsym_status ndsym_kernel_build(const ndsym_symbol* sym, const ndsym_grid* grid, double s,
                                double t, int slices, double smoothing, int n_quad,
                                ndsym_kernel** out);
void ndsym_kernel_destroy(ndsym_kernel* kernel);

/* number of states (rows) of the kernel matrix */
int ndsym_kernel_size(const ndsym_kernel* kernel);

/* transition probability from state i into cell j */
ndsym_status ndsym_kernel_get(const ndsym_kernel* kernel, int i, int j, double* p);

/* Sample n_paths trajectories of the associated process on a d = 1 grid:
 * `steps` equal kernel steps over [s, t], each built from slices_per_step
 * uniform slices.  positions receives n_paths * (steps + 1) doubles,
 * path-major; deterministic in seed. */
ndsym_status ndsym_sample_paths(const ndsym_symbol* sym, const ndsym_grid* grid, double s,
                                double t, int steps, int slices_per_step, double smoothing,
                                double x0, int n_paths, unsigned long long seed,
                                double* positions);

/* Run a batch command from a JSON config (see the README for the schema);
 * artifacts land in out_dir.  On NDSYM_OK and NDSYM_ERR_CHECK_FAILED,
 * *summary_json (if non-NULL) receives the malloc'd summary document. */
ndsym_status ndsym_run_json(const char* config_json, const char* out_dir,
                            char** summary_json);

void ndsym_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NDSYM_H */
