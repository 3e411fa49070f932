#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "kdvdg/functionals.hpp"
#include "kdvdg/operators.hpp"
#include "kdvdg/problems.hpp"

namespace kdvdg {

enum class SolveErrorKind { NoConvergence, SingularJacobian };

class SolveError : public std::runtime_error {
 public:
  SolveError(SolveErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  SolveErrorKind kind() const { return kind_; }

 private:
  SolveErrorKind kind_;
};

struct SolverConfig {
  double tol_residual = 1e-12;  // absolute, inf norm of the stacked residual
  int max_iterations = 40;
  bool line_search = true;
  int max_backtracks = 20;
  // Per-iteration bound on the tau move, relative to 1 + |tau|. The
  // small-dispersion problems carry tau values of order 1/eps; walking them
  // in bounded increments keeps the bilinear tau-field coupling inside the
  // line search's trust.
  double tau_step_limit = 10.0;
  // Jumps are treated as vanished when eta(u, u) drops below
  // max(floor, rel * energy(u)); the constraint rows then pin both taus to 0.
  double degeneracy_rel = 1e-12;
  double degeneracy_floor = 1e-14;
  // Take one extra full Newton step after the tolerance is met, which parks
  // the residual at its round-off floor.
  bool polish = true;
  // Print one line per iteration to stderr.
  bool trace = false;
};

/// Affine-in-the-unknown closure for the nodal values of d/dt [u_h]:
///   [u]_t = unknown_coeff * [u]^{new} + known.
struct JumpTimeClosure {
  double unknown_coeff = 0.0;
  Eigen::VectorXd known;
};

/// Data of one implicit solve of the coupled scheme at a fixed time level.
/// `dt_half` is the coefficient of the spatial terms in the time equation:
/// half the step for the midpoint solves, the full (tiny) step for the
/// backward Euler startup.
struct HalfStepSystem {
  const OperatorSet& ops;
  const ProblemSpec& problem;
  double dt_half = 0.0;
  Eigen::VectorXd u_prev;
  Eigen::VectorXd g_proj;  // projection of g at the solve time (zero if none)
  JumpTimeClosure jump_t;
};

struct SolverState {
  Eigen::VectorXd u;
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  TraceParams taus;
};

inline int system_size(const OperatorSet& ops) { return 3 * ops.size() + 2; }

Eigen::VectorXd pack_state(const SolverState& state);
SolverState unpack_state(const OperatorSet& ops, const Eigen::VectorXd& x);

/// Stacked residual of the five equation blocks, length 3N(k+1) + 2:
///   M[q] + (D+A)[u]
///   M[p] + eps (D+A)[q] - eps tau_qu J[u] - M[Pi f(u_h)]
///   M[u] - dt_half (D+A)[p] + dt_half tau_pu J[u] - M[u_prev] - dt_half M[g]
///   V_f - tau_pu eta(u,u) + eps tau_qu eta(q,u)
///   tau_pu eta(p,u) + eps tau_qu sum_i [u][u]_t (x_i)
Eigen::VectorXd residual(const HalfStepSystem& sys, const SolverState& state);

/// Analytic Jacobian of `residual` with respect to (u, q, p, tau_qu, tau_pu).
Eigen::MatrixXd jacobian(const HalfStepSystem& sys, const SolverState& state);

struct SolveReport {
  int iterations = 0;
  double residual_inf = 0.0;
  bool degenerate_taus = false;
  // Unscaled absolute residuals of the two constraint rows at the solution.
  double constraint_residual_energy = 0.0;
  double constraint_residual_hamiltonian = 0.0;
};

/// Damped Newton with the analytic Jacobian, one dense factorization per
/// iteration, and step control by the affine-covariant natural monotonicity
/// test. `state` carries the initial guess in and the solution out.
SolveReport solve_halfstep(const HalfStepSystem& sys, SolverState& state,
                           const SolverConfig& cfg);

/// Post-step recovery: with u and q fixed, solve the momentum equation plus
/// the two constraint rows for (p, tau_qu, tau_pu). `jump_t` holds the known
/// nodal values of d/dt [u_h] at the recovery time. The subsystem reduces to
/// a scalar quadratic in tau_qu and is solved in closed form; when that
/// quadratic has no real root the minimizing tau is returned and the gap is
/// reported through `residual_inf` rather than thrown, since the recovered
/// quantities are diagnostics the time marching never consumes.
SolveReport solve_poststep(const OperatorSet& ops, const ProblemSpec& problem,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& jump_t, Eigen::VectorXd& p,
                           TraceParams& taus, const SolverConfig& cfg);

}  // namespace kdvdg
