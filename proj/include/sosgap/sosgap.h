#ifndef SOSGAP_H
#define SOSGAP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SOSGAP_API __declspec(dllexport)
#else
#define SOSGAP_API __attribute__((visibility("default")))
#endif

typedef enum sosgap_status {
  SOSGAP_OK = 0,
  SOSGAP_E_INVALID_ARGUMENT = 1,
  SOSGAP_E_INVALID_FAMILY = 2,
  SOSGAP_E_INCOMPATIBLE_ELEMENTS = 3,
  SOSGAP_E_UNSUPPORTED_INVERSION = 4,
  SOSGAP_E_RESOURCE_LIMIT = 5,
  SOSGAP_E_MISMATCHED_BALLS = 6,
  SOSGAP_E_SUPPORT_OVERFLOW = 7,
  SOSGAP_E_INCONSISTENT_BALLS = 8,
  SOSGAP_E_CLOSURE = 9,
  SOSGAP_E_NUMERICAL_FAILURE = 10,
  SOSGAP_E_CERTIFICATE_SCOPE = 11,
  SOSGAP_E_MALFORMED_RESIDUAL = 12,
  SOSGAP_E_INTERNAL = 13,
  SOSGAP_E_IO = 14,
  SOSGAP_E_FORMAT = 15,
  SOSGAP_E_BUFFER_TOO_SMALL = 16,
  SOSGAP_E_UNKNOWN = 99
} sosgap_status;

typedef struct sosgap_ball sosgap_ball;
typedef struct sosgap_element sosgap_element;
typedef struct sosgap_certificate sosgap_certificate;

/* Strings are returned by copying into caller buffers. When len is too small
   the call fails with SOSGAP_E_BUFFER_TOO_SMALL; *needed (if non-null) always
   receives the required size including the terminating zero. */

SOSGAP_API const char* sosgap_version(void);
/* Message of the last failure on the calling thread. */
SOSGAP_API const char* sosgap_last_error(void);
SOSGAP_API const char* sosgap_status_name(sosgap_status s);

typedef void (*sosgap_log_fn)(const char* line, void* user);
SOSGAP_API void sosgap_set_log(sosgap_log_fn fn, void* user);
SOSGAP_API void sosgap_set_threads(int threads);
SOSGAP_API int sosgap_threads(void);

/* Balls: family is "sl" or "saut". cap 0 selects the default element cap. */
SOSGAP_API sosgap_status sosgap_ball_create(const char* family, int rank, int radius, uint64_t cap,
                                            sosgap_ball** out);
SOSGAP_API sosgap_status sosgap_ball_load(const char* path, sosgap_ball** out);
SOSGAP_API sosgap_status sosgap_ball_save(const sosgap_ball* ball, const char* path);
SOSGAP_API void sosgap_ball_free(sosgap_ball* ball);
SOSGAP_API uint32_t sosgap_ball_size(const sosgap_ball* ball);
SOSGAP_API int sosgap_ball_radius(const sosgap_ball* ball);
SOSGAP_API uint64_t sosgap_ball_hash(const sosgap_ball* ball);
/* Writes up to capacity layer sizes; *count receives radius + 1. */
SOSGAP_API sosgap_status sosgap_ball_layers(const sosgap_ball* ball, uint32_t* sizes, size_t capacity,
                                            size_t* count);

/* Elements over a ball. which: delta, sq, adj, op, x, adj_plus_k_op (k is a
   rational string, ignored otherwise). n is the rank the element is built for. */
SOSGAP_API sosgap_status sosgap_element_build(const sosgap_ball* universe, const char* which, int n,
                                              const char* k, sosgap_element** out);
SOSGAP_API sosgap_status sosgap_element_mul(const sosgap_element* a, const sosgap_element* b,
                                            const sosgap_ball* universe, sosgap_element** out);
SOSGAP_API sosgap_status sosgap_element_load(const char* path, const sosgap_ball* ball, sosgap_element** out);
SOSGAP_API sosgap_status sosgap_element_save(const sosgap_element* x, const char* path);
SOSGAP_API void sosgap_element_free(sosgap_element* x);
SOSGAP_API size_t sosgap_element_support(const sosgap_element* x);
SOSGAP_API sosgap_status sosgap_element_equal(const sosgap_element* a, const sosgap_element* b, int* equal);
/* key=value lines: support, augmentation, l1, star_invariant, alternating_invariant, radius. */
SOSGAP_API sosgap_status sosgap_element_describe(const sosgap_element* x, char* buf, size_t len, size_t* needed);

/* Identity suite; one line per check. *failures receives the failing count. */
SOSGAP_API sosgap_status sosgap_verify_identities(const char* family, int n_max, int m_max, int symmetrization,
                                                  int x_identities, char* buf, size_t len, size_t* needed,
                                                  int* failures);
/* Exact check of the order unit square decompositions at the given rank. */
SOSGAP_API sosgap_status sosgap_order_unit_witnesses(const char* family, int rank, int* total, int* exact);

typedef struct sosgap_options {
  const char* family; /* "sl" or "saut" */
  int rank;
  int radius;
  const char* target; /* delta2, adj, adj+<k>op */
  const char* lambda; /* NULL: maximize (solve) or probe first (pipeline) */
  uint64_t max_iters;
  uint64_t probe_iters;
  const char* margin; /* subtracted from the probe value */
  double eps;
  double rho;
  double wall_clock_limit; /* seconds, 0 = none */
  uint64_t log_interval;
  const char* checkpoint; /* NULL or path */
  uint64_t checkpoint_interval;
  int resume;
  int bits;
  uint64_t element_cap;
  uint64_t config_hash;
} sosgap_options;

typedef struct sosgap_solve_report {
  double lambda;
  int status; /* 0 optimal, 1 feasible, 2 iteration limit, 3 infeasible-likely */
  double primal_residual;
  double dual_residual;
  double constraint_residual;
  double min_eigenvalue;
  uint64_t iterations;
  double wall_time;
  uint32_t dimension;
  uint32_t constraints;
} sosgap_solve_report;

SOSGAP_API void sosgap_options_init(sosgap_options* options);
SOSGAP_API const char* sosgap_solve_status_name(int status);

/* Solves the decomposition problem and writes a solution file. */
SOSGAP_API sosgap_status sosgap_solve(const sosgap_options* options, const char* solution_path,
                                      sosgap_solve_report* report);
/* Rationalizes a stored solution. lambda NULL uses the stored fixed value, or
   the maximized value rounded down to 6 decimals. */
SOSGAP_API sosgap_status sosgap_certify_solution(const char* solution_path, const char* lambda, int bits,
                                                 uint64_t config_hash, sosgap_certificate** out);
/* Solve, rationalize and certify in one call. report may be null. */
SOSGAP_API sosgap_status sosgap_pipeline(const sosgap_options* options, sosgap_certificate** out,
                                         sosgap_solve_report* report);

SOSGAP_API void sosgap_certificate_free(sosgap_certificate* c);
SOSGAP_API int sosgap_certificate_valid(const sosgap_certificate* c);
SOSGAP_API double sosgap_certificate_gap(const sosgap_certificate* c);
/* field: lambda, epsilon, b_l1, certified_gap, statement, target, family. */
SOSGAP_API sosgap_status sosgap_certificate_field(const sosgap_certificate* c, const char* field, char* buf,
                                                  size_t len, size_t* needed);
SOSGAP_API sosgap_status sosgap_certificate_save(const sosgap_certificate* c, const char* path);
SOSGAP_API sosgap_status sosgap_certificate_load(const char* path, sosgap_certificate** out);
/* *ok is 1 only when every stored value is reproduced and the certificate is
   valid; divergences are written to buf one per line. */
SOSGAP_API sosgap_status sosgap_verify_certificate(const char* path, int independent, int* ok, char* buf,
                                                   size_t len, size_t* needed);

SOSGAP_API sosgap_status sosgap_order_unit_bound(int radius, char* buf, size_t len, size_t* needed);
SOSGAP_API sosgap_status sosgap_epsilon_bound(const sosgap_element* b, int radius, char* buf, size_t len,
                                              size_t* needed);
/* Kazhdan constant lower bound from an exact gap, rounded down to 5 decimals. */
SOSGAP_API sosgap_status sosgap_kazhdan_constant(const char* gap, const char* family, int m, char* buf, size_t len,
                                                 size_t* needed);
/* Bound table for m in [m_min, m_max] from a manifest file; json selects the
   machine-readable form. check_certificates verifies cert: provenance. */
SOSGAP_API sosgap_status sosgap_bounds(const char* manifest_path, int m_min, int m_max, int json,
                                       int check_certificates, char* buf, size_t len, size_t* needed);
SOSGAP_API sosgap_status sosgap_mixing_bound(uint64_t generators, const char* gap, double log_gamma, double eps,
                                             double* out);

#ifdef __cplusplus
}
#endif

#endif
