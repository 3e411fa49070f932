#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "kdvdg/newton.hpp"

namespace kdvdg {

/// Three-point closure for [u_h]_t at the unknown half level t_{n+1/2} from
/// the two stored levels at t_{n-1/2} and t_n (uniform spacing dt/2):
///   [u]_t = ( [u]^{n-1/2} - 4 [u]^n + 3 [u]^{n+1/2} ) / dt.
JumpTimeClosure uniform_jump_t(const Eigen::VectorXd& jumps_prev_half,
                               const Eigen::VectorXd& jumps_prev_whole, double dt);

/// First-step closure on the nonuniform stencil t = 0, (dt/2)^2, dt/2.
JumpTimeClosure nonuniform_jump_t(const Eigen::VectorXd& jumps_t0,
                                  const Eigen::VectorXd& jumps_startup, double dt);

/// The stencil weights (c1, c2, c3) of the nonuniform formula.
std::array<double, 3> nonuniform_jump_t_coeffs(double dt);

struct RunOptions {
  double dt = 0.0;          // target step; rounded so that steps * dt == final_time
  double final_time = 0.0;  // T >= 0; T == 0 runs nothing but the projection
  SolverConfig solver{};
};

/// Implicit-midpoint time marching of the conservative scheme: each step
/// solves the coupled half-step system, extrapolates u^{n+1}, recovers
/// q^{n+1} from the gradient equation and (p, tau) from the post-step
/// subsystem, and logs the invariants.
class Simulation {
 public:
  Simulation(ProblemSpec problem, Mesh mesh, int degree, RunOptions options);

  int total_steps() const { return total_steps_; }
  int steps_taken() const { return step_; }
  double dt() const { return dt_; }
  double time() const { return step_ * dt_; }
  bool finished() const { return step_ >= total_steps_; }

  /// Projects the initial data, evaluates q and p at t = 0, and primes the
  /// jump history with one backward Euler solve of the same scheme at
  /// t = (dt/2)^2. Called lazily by step().
  void startup();
  void step();
  void run();

  const OperatorSet& ops() const { return ops_; }
  const ProblemSpec& problem() const { return problem_; }
  const Eigen::VectorXd& u() const { return u_; }
  const Eigen::VectorXd& q() const { return q_; }
  const Eigen::VectorXd& p() const { return p_; }
  TraceParams taus() const { return taus_; }
  const std::vector<InvariantRecord>& invariants() const { return log_; }
  int max_newton_iterations() const { return max_newton_; }
  double max_constraint_residual() const { return max_constraint_res_; }
  /// Largest residual left by the closed-form post-step recoveries; nonzero
  /// beyond round-off only when a recovery subsystem was infeasible.
  double max_poststep_residual() const { return max_poststep_res_; }

  /// Interface jumps of the projected initial data and of the backward Euler
  /// startup state (available once started).
  const Eigen::VectorXd& jumps_initial() const { return jumps_t0_; }
  const Eigen::VectorXd& jumps_startup_state() const { return jumps_startup_; }

  struct L2Errors {
    double u;
    double q;
    double p;
  };
  /// L2 errors against the exact solution at the current time, by a fixed
  /// 10-point Gauss rule per element. Requires the problem to carry one.
  L2Errors errors_vs_exact() const;

  struct Snapshot {
    Eigen::VectorXd x, u, q, p;
  };
  /// Field values on `points_per_element` equispaced reference points per
  /// element (both endpoints included, so interface jumps are visible).
  Snapshot sample(int points_per_element) const;

 private:
  Eigen::VectorXd project_g(double t) const;
  void record_invariants(double res_energy, double res_hamiltonian, int iters);

  ProblemSpec problem_;
  OperatorSet ops_;
  RunOptions opts_;
  double dt_ = 0.0;
  int total_steps_ = 0;
  int step_ = 0;
  bool started_ = false;

  Eigen::VectorXd u_, q_, p_;
  TraceParams taus_;
  SolverState half_guess_;
  Eigen::VectorXd jumps_t0_, jumps_startup_, jumps_prev_half_;
  std::vector<InvariantRecord> log_;
  int max_newton_ = 0;
  double max_constraint_res_ = 0.0;
  double max_poststep_res_ = 0.0;
};

/// Convenience wrapper: build, run to final time, return the finished
/// simulation. Solver failures carry the failing step index in the message.
Simulation run(const ProblemSpec& problem, const Mesh& mesh, int degree, double dt,
               double final_time, const SolverConfig& cfg = {});

}  // namespace kdvdg
