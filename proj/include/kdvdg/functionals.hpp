#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

#include "kdvdg/operators.hpp"

namespace kdvdg {

/// The pair of stabilization constants solved for alongside the fields.
struct TraceParams {
  double tau_qu = 0.0;
  double tau_pu = 0.0;
};

/// One sample of the conserved quantities along a run.
struct InvariantRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double hamiltonian = 0.0;
  double tau_qu = 0.0;
  double tau_pu = 0.0;
  // Absolute residuals of the two conservation constraints at the half step
  // that produced this state, and the Newton work it took.
  double constraint_residual_energy = 0.0;
  double constraint_residual_hamiltonian = 0.0;
  int newton_iterations = 0;
};

/// eta(w, v) = sum_i [w](x_i) [v](x_i) over the N interface nodes.
double eta(const OperatorSet& ops, const Eigen::VectorXd& w, const Eigen::VectorXd& v);

/// V_f = sum_i ( [V(u_h)] - {Pi f(u_h)} [u_h] )(x_i). The flux is projected
/// element-wise first; the average is taken of the projected polynomial.
double v_f(const OperatorSet& ops, const Eigen::VectorXd& u,
           const std::function<double(double)>& f, const std::function<double(double)>& V);

/// Same with the projection Pi f(u_h) already at hand.
double v_f_with_projection(const OperatorSet& ops, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& flux_proj,
                           const std::function<double(double)>& V);

double mass(const OperatorSet& ops, const Eigen::VectorXd& u);
double energy(const OperatorSet& ops, const Eigen::VectorXd& u);
double hamiltonian(const OperatorSet& ops, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& q, double eps,
                   const std::function<double(double)>& V);

struct ClosedFormTaus {
  bool degenerate = false;
  TraceParams taus;
};

/// The closed forms obtained by eliminating the two constraint equations,
/// given the four interface sums and V_f. Signals degeneracy when the
/// denominator eta(q,u) eta(p,u) + eta(u_t,u) eta(u,u) vanishes relative to
/// the size of its terms.
ClosedFormTaus closed_form_taus_from_sums(double eta_qu, double eta_pu, double eta_ut_u,
                                          double eta_uu, double vf, double eps);

/// Cross-check form evaluated on full states; `jump_t` holds the nodal values
/// of d/dt [u_h] used by the solver.
ClosedFormTaus closed_form_taus(const OperatorSet& ops, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                                const Eigen::VectorXd& jump_t, double eps,
                                const std::function<double(double)>& f,
                                const std::function<double(double)>& V);

/// Right-hand sides of the two conservation conditions with the scheme's
/// traces substituted: both vanish exactly when the constraint pair holds.
/// Returned as (energy condition, Hamiltonian condition).
std::pair<double, double> lemma_condition_residuals(
    const OperatorSet& ops, const Eigen::VectorXd& u, const Eigen::VectorXd& q,
    const Eigen::VectorXd& p, const TraceParams& taus, const Eigen::VectorXd& jump_t,
    double eps, const std::function<double(double)>& f,
    const std::function<double(double)>& V);

}  // namespace kdvdg
