/*
 * C API of the conservative DG solver for generalized KdV equations.
 *
 * All objects are opaque handles created and destroyed through this
 * interface; every fallible call returns a kdv_status and writes results
 * through out-pointers. kdv_last_error() carries a human-readable detail
 * message for the most recent failure on the calling thread.
 */
#ifndef KDVDG_H
#define KDVDG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kdv_status {
  KDV_OK = 0,
  KDV_ERROR_INVALID_ARGUMENT = 1,
  KDV_ERROR_NO_CONVERGENCE = 2,
  KDV_ERROR_SINGULAR_JACOBIAN = 3,
  KDV_ERROR_OUT_OF_RANGE = 4,
  KDV_ERROR_INTERNAL = 5
} kdv_status;

const char* kdv_status_message(kdv_status status);
const char* kdv_last_error(void);
const char* kdv_version(void);

/* ------------------------------------------------------------------ */
/* Problems                                                            */
/* ------------------------------------------------------------------ */

typedef struct kdv_problem kdv_problem;

/*
 * name is one of "linear", "nonlinear", "cnoidal". eps is honored by the
 * nonlinear problem only (must be positive there); the other two carry
 * fixed coefficients.
 */
kdv_status kdv_problem_create(const char* name, double eps, kdv_problem** out);
void kdv_problem_destroy(kdv_problem* problem);

kdv_status kdv_problem_domain(const kdv_problem* problem, double* a, double* b);
int kdv_problem_has_exact(const kdv_problem* problem);
kdv_status kdv_problem_exact(const kdv_problem* problem, double x, double t, double* u,
                             double* q, double* p);
/* The experiments' default time step for this problem at degree k, N elements. */
kdv_status kdv_problem_default_dt(const kdv_problem* problem, int degree, int num_elements,
                                  double* dt);

/* ------------------------------------------------------------------ */
/* Simulations                                                         */
/* ------------------------------------------------------------------ */

typedef struct kdv_sim_options {
  int degree;           /* polynomial degree k >= 0 */
  int num_elements;     /* N >= 2 */
  double dt;            /* target step; adjusted so steps * dt == final_time */
  double final_time;    /* T >= 0; T == 0 yields the projected initial state */
  double tol_residual;  /* Newton tolerance, absolute inf-norm */
  int max_newton_iterations;
} kdv_sim_options;

void kdv_sim_options_defaults(kdv_sim_options* options);

typedef struct kdv_sim kdv_sim;

kdv_status kdv_sim_create(const kdv_problem* problem, const kdv_sim_options* options,
                          kdv_sim** out);
void kdv_sim_destroy(kdv_sim* sim);

int kdv_sim_total_steps(const kdv_sim* sim);
int kdv_sim_steps_taken(const kdv_sim* sim);
double kdv_sim_time(const kdv_sim* sim);
double kdv_sim_dt(const kdv_sim* sim);

/* Advance one whole step (the first call performs the startup solve). */
kdv_status kdv_sim_step(kdv_sim* sim);
/* Advance to the final time. */
kdv_status kdv_sim_run(kdv_sim* sim);

typedef struct kdv_invariants {
  double t;
  double mass;
  double energy;
  double hamiltonian;
  double tau_qu;
  double tau_pu;
  /* Absolute residuals of the two conservation constraints at the half step
   * that produced this state. */
  double constraint_residual_energy;
  double constraint_residual_hamiltonian;
  int newton_iterations;
} kdv_invariants;

kdv_status kdv_sim_invariants(const kdv_sim* sim, kdv_invariants* out);

/* L2 errors of (u, q, p) against the exact solution at the current time. */
kdv_status kdv_sim_errors(const kdv_sim* sim, double* err_u, double* err_q, double* err_p);

/* Sample the fields on equispaced points per element (endpoints included).
 * Each buffer must hold kdv_sim_sample_count() doubles; null buffers are
 * skipped. */
size_t kdv_sim_sample_count(const kdv_sim* sim, int points_per_element);
kdv_status kdv_sim_sample(const kdv_sim* sim, int points_per_element, double* x, double* u,
                          double* q, double* p);

#ifdef __cplusplus
}
#endif

#endif /* KDVDG_H */
