#include "kdvdg.h"

#include <cstring>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "kdvdg/integrator.hpp"
#include "kdvdg/problems.hpp"

namespace {

thread_local std::string g_last_error;

kdv_status fail(kdv_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
kdv_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const kdvdg::SolveError& err) {
    const kdv_status status = err.kind() == kdvdg::SolveErrorKind::NoConvergence
                                  ? KDV_ERROR_NO_CONVERGENCE
                                  : KDV_ERROR_SINGULAR_JACOBIAN;
    return fail(status, err.what());
  } catch (const std::invalid_argument& err) {
    return fail(KDV_ERROR_INVALID_ARGUMENT, err.what());
  } catch (const std::out_of_range& err) {
    return fail(KDV_ERROR_OUT_OF_RANGE, err.what());
  } catch (const std::bad_alloc&) {
    return fail(KDV_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& err) {
    return fail(KDV_ERROR_INTERNAL, err.what());
  }
}

}  // namespace

struct kdv_problem {
  kdvdg::ProblemSpec spec;
};

struct kdv_sim {
  std::unique_ptr<kdvdg::Simulation> sim;
};

extern "C" {

const char* kdv_status_message(kdv_status status) {
  switch (status) {
    case KDV_OK:
      return "ok";
    case KDV_ERROR_INVALID_ARGUMENT:
      return "invalid argument";
    case KDV_ERROR_NO_CONVERGENCE:
      return "nonlinear solver did not converge";
    case KDV_ERROR_SINGULAR_JACOBIAN:
      return "singular Jacobian";
    case KDV_ERROR_OUT_OF_RANGE:
      return "out of range";
    case KDV_ERROR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* kdv_last_error(void) { return g_last_error.c_str(); }

const char* kdv_version(void) { return "1.0.0"; }

kdv_status kdv_problem_create(const char* name, double eps, kdv_problem** out) {
  if (out == nullptr || name == nullptr) {
    return fail(KDV_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  *out = nullptr;
  return guarded([&]() {
    kdvdg::ProblemSpec spec;
    const std::string id(name);
    if (id == "linear") {
      spec = kdvdg::linear_problem();
    } else if (id == "nonlinear") {
      spec = kdvdg::nonlinear_problem(eps);
    } else if (id == "cnoidal") {
      spec = kdvdg::cnoidal_problem();
    } else {
      return fail(KDV_ERROR_INVALID_ARGUMENT, "unknown problem name: " + id);
    }
    *out = new kdv_problem{std::move(spec)};
    return KDV_OK;
  });
}

void kdv_problem_destroy(kdv_problem* problem) { delete problem; }

kdv_status kdv_problem_domain(const kdv_problem* problem, double* a, double* b) {
  if (problem == nullptr) return fail(KDV_ERROR_INVALID_ARGUMENT, "null problem");
  if (a != nullptr) *a = problem->spec.domain_a;
  if (b != nullptr) *b = problem->spec.domain_b;
  return KDV_OK;
}

int kdv_problem_has_exact(const kdv_problem* problem) {
  return problem != nullptr && problem->spec.exact.has_value() ? 1 : 0;
}

kdv_status kdv_problem_exact(const kdv_problem* problem, double x, double t, double* u,
                             double* q, double* p) {
  if (problem == nullptr) return fail(KDV_ERROR_INVALID_ARGUMENT, "null problem");
  if (!problem->spec.exact) {
    return fail(KDV_ERROR_INVALID_ARGUMENT, "problem has no exact solution");
  }
  return guarded([&]() {
    const auto& exact = *problem->spec.exact;
    if (u != nullptr) *u = exact.u(x, t);
    if (q != nullptr) *q = exact.q(x, t);
    if (p != nullptr) *p = exact.p(x, t);
    return KDV_OK;
  });
}

kdv_status kdv_problem_default_dt(const kdv_problem* problem, int degree, int num_elements,
                                  double* dt) {
  if (problem == nullptr || dt == nullptr) {
    return fail(KDV_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  return guarded([&]() {
    *dt = kdvdg::default_time_step(problem->spec, degree, num_elements);
    return KDV_OK;
  });
}

void kdv_sim_options_defaults(kdv_sim_options* options) {
  if (options == nullptr) return;
  std::memset(options, 0, sizeof(*options));
  options->degree = 2;
  options->num_elements = 32;
  options->dt = 0.0;
  options->final_time = 0.0;
  options->tol_residual = 1e-12;
  options->max_newton_iterations = 40;
}

kdv_status kdv_sim_create(const kdv_problem* problem, const kdv_sim_options* options,
                          kdv_sim** out) {
  if (problem == nullptr || options == nullptr || out == nullptr) {
    return fail(KDV_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  *out = nullptr;
  return guarded([&]() {
    kdvdg::RunOptions run;
    double dt = options->dt;
    if (dt <= 0.0) {
      dt = kdvdg::default_time_step(problem->spec, options->degree, options->num_elements);
    }
    run.dt = dt;
    run.final_time = options->final_time;
    if (options->tol_residual > 0.0) run.solver.tol_residual = options->tol_residual;
    if (options->max_newton_iterations > 0) {
      run.solver.max_iterations = options->max_newton_iterations;
    }
    const kdvdg::Mesh mesh = kdvdg::Mesh::uniform(problem->spec.domain_a,
                                                  problem->spec.domain_b,
                                                  options->num_elements);
    auto sim = std::make_unique<kdvdg::Simulation>(problem->spec, mesh, options->degree, run);
    sim->startup();
    *out = new kdv_sim{std::move(sim)};
    return KDV_OK;
  });
}

void kdv_sim_destroy(kdv_sim* sim) { delete sim; }

int kdv_sim_total_steps(const kdv_sim* sim) {
  return sim != nullptr ? sim->sim->total_steps() : 0;
}

int kdv_sim_steps_taken(const kdv_sim* sim) {
  return sim != nullptr ? sim->sim->steps_taken() : 0;
}

double kdv_sim_time(const kdv_sim* sim) { return sim != nullptr ? sim->sim->time() : 0.0; }

double kdv_sim_dt(const kdv_sim* sim) { return sim != nullptr ? sim->sim->dt() : 0.0; }

kdv_status kdv_sim_step(kdv_sim* sim) {
  if (sim == nullptr) return fail(KDV_ERROR_INVALID_ARGUMENT, "null simulation");
  return guarded([&]() {
    sim->sim->step();
    return KDV_OK;
  });
}

kdv_status kdv_sim_run(kdv_sim* sim) {
  if (sim == nullptr) return fail(KDV_ERROR_INVALID_ARGUMENT, "null simulation");
  return guarded([&]() {
    sim->sim->run();
    return KDV_OK;
  });
}

kdv_status kdv_sim_invariants(const kdv_sim* sim, kdv_invariants* out) {
  if (sim == nullptr || out == nullptr) {
    return fail(KDV_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  const auto& log = sim->sim->invariants();
  if (log.empty()) return fail(KDV_ERROR_OUT_OF_RANGE, "no invariants recorded yet");
  const kdvdg::InvariantRecord& rec = log.back();
  out->t = rec.t;
  out->mass = rec.mass;
  out->energy = rec.energy;
  out->hamiltonian = rec.hamiltonian;
  out->tau_qu = rec.tau_qu;
  out->tau_pu = rec.tau_pu;
  out->constraint_residual_energy = rec.constraint_residual_energy;
  out->constraint_residual_hamiltonian = rec.constraint_residual_hamiltonian;
  out->newton_iterations = rec.newton_iterations;
  return KDV_OK;
}

kdv_status kdv_sim_errors(const kdv_sim* sim, double* err_u, double* err_q, double* err_p) {
  if (sim == nullptr) return fail(KDV_ERROR_INVALID_ARGUMENT, "null simulation");
  return guarded([&]() {
    const auto errs = sim->sim->errors_vs_exact();
    if (err_u != nullptr) *err_u = errs.u;
    if (err_q != nullptr) *err_q = errs.q;
    if (err_p != nullptr) *err_p = errs.p;
    return KDV_OK;
  });
}

size_t kdv_sim_sample_count(const kdv_sim* sim, int points_per_element) {
  if (sim == nullptr || points_per_element < 1) return 0;
  return static_cast<size_t>(sim->sim->ops().num_elements()) *
         static_cast<size_t>(points_per_element);
}

kdv_status kdv_sim_sample(const kdv_sim* sim, int points_per_element, double* x, double* u,
                          double* q, double* p) {
  if (sim == nullptr) return fail(KDV_ERROR_INVALID_ARGUMENT, "null simulation");
  return guarded([&]() {
    const auto snap = sim->sim->sample(points_per_element);
    const size_t count = static_cast<size_t>(snap.x.size());
    if (x != nullptr) std::memcpy(x, snap.x.data(), count * sizeof(double));
    if (u != nullptr) std::memcpy(u, snap.u.data(), count * sizeof(double));
    if (q != nullptr) std::memcpy(q, snap.q.data(), count * sizeof(double));
    if (p != nullptr) std::memcpy(p, snap.p.data(), count * sizeof(double));
    return KDV_OK;
  });
}

}  // extern "C"
