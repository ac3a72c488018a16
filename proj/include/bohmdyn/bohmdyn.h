/* C interface to the bohmdyn library. Every call returns a status code; on
 * failure bohmdyn_last_error() describes the problem for the calling thread.
 * Strings handed out by the library are released with bohmdyn_string_free. */
#ifndef BOHMDYN_BOHMDYN_H
#define BOHMDYN_BOHMDYN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BOHMDYN_API __declspec(dllexport)
#else
#define BOHMDYN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bohmdyn_status {
  BOHMDYN_OK = 0,
  BOHMDYN_ERR_DOMAIN = 1,
  BOHMDYN_ERR_SINGULARITY = 2,
  BOHMDYN_ERR_NODE = 3,
  BOHMDYN_ERR_USAGE = 4,
  BOHMDYN_ERR_CONFIG = 5,
  BOHMDYN_ERR_IO = 6,
  BOHMDYN_ERR_INVALID_ARGUMENT = 7,
  BOHMDYN_ERR_INTERNAL = 8
} bohmdyn_status;

typedef enum bohmdyn_velocity_mode {
  BOHMDYN_MODE_BOHM = 0,
  BOHMDYN_MODE_AUGMENTED_PLUS = 1,
  BOHMDYN_MODE_AUGMENTED_MINUS = 2
} bohmdyn_velocity_mode;

typedef enum bohmdyn_termination {
  BOHMDYN_COMPLETED = 0,
  BOHMDYN_NODE_ABORT = 1,
  BOHMDYN_STEP_LIMIT = 2
} bohmdyn_termination;

typedef struct bohmdyn_model bohmdyn_model;

typedef struct bohmdyn_model_info {
  size_t n;
  size_t d;
  double mass;
  double hbar;
  int stationary;
  double energy; /* meaningful only when stationary */
  int real_valued;
  int normalizable;
} bohmdyn_model_info;

typedef struct bohmdyn_budget {
  double kinetic_v;
  double kinetic_u;
  double compression;
  double potential_U;
  double minus_dS_dt;
  double residual;
} bohmdyn_budget;

typedef struct bohmdyn_job_request {
  const char* command;     /* catalog, fields, traj, verify, ensemble */
  const char* state_id;    /* may be NULL; "all" for verify over the catalog */
  const char* config_path; /* may be NULL */
  const char* output_dir;  /* may be NULL */
  uint64_t seed;
  int has_seed;
  int json;
} bohmdyn_job_request;

BOHMDYN_API const char* bohmdyn_version(void);
BOHMDYN_API const char* bohmdyn_last_error(void);
BOHMDYN_API void bohmdyn_string_free(char* text);

BOHMDYN_API bohmdyn_status bohmdyn_model_create(const char* state_id, bohmdyn_model** out);
BOHMDYN_API void bohmdyn_model_destroy(bohmdyn_model* model);
BOHMDYN_API bohmdyn_status bohmdyn_model_info_get(const bohmdyn_model* model, bohmdyn_model_info* out);
BOHMDYN_API bohmdyn_status bohmdyn_model_label(const bohmdyn_model* model, char** out);

/* `coords` holds n*d values, particle-major. */
BOHMDYN_API bohmdyn_status bohmdyn_density(const bohmdyn_model* model, const double* coords, size_t count, double t,
                                           double* out);
BOHMDYN_API bohmdyn_status bohmdyn_potential_energy(const bohmdyn_model* model, const double* coords, size_t count,
                                                    double* out);
BOHMDYN_API bohmdyn_status bohmdyn_pressure(const bohmdyn_model* model, const double* coords, size_t count, double t,
                                            size_t particle, double* out);
BOHMDYN_API bohmdyn_status bohmdyn_velocity(const bohmdyn_model* model, const double* coords, size_t count, double t,
                                            bohmdyn_velocity_mode mode, double node_epsilon, double* out,
                                            size_t out_count);
BOHMDYN_API bohmdyn_status bohmdyn_quantum_potential(const bohmdyn_model* model, const double* coords, size_t count,
                                                     double t, double node_epsilon, double* q, double* kinetic_u,
                                                     double* compression);
/* stationary != 0 compares against the exact eigenvalue instead of -dS/dt. */
BOHMDYN_API bohmdyn_status bohmdyn_energy_budget(const bohmdyn_model* model, const double* coords, size_t count,
                                                 double t, int stationary, double node_epsilon, bohmdyn_budget* out);
/* RK4 transport from t0 to t1; the final configuration overwrites `out`. */
BOHMDYN_API bohmdyn_status bohmdyn_trajectory_end(const bohmdyn_model* model, const double* coords, size_t count,
                                                  double t0, double t1, bohmdyn_velocity_mode mode, double dt,
                                                  double* out, bohmdyn_termination* termination);

/* Runs a CLI command. exit_code follows the CLI contract; report and errors
 * receive stdout and stderr text and must be freed. */
BOHMDYN_API bohmdyn_status bohmdyn_job_run(const bohmdyn_job_request* request, int* exit_code, char** report,
                                           char** errors);

#ifdef __cplusplus
}
#endif

#endif
