#include "kdvdg/functionals.hpp"

#include <cmath>

namespace kdvdg {

double eta(const OperatorSet& ops, const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
  return (ops.trace_jump * w).dot(ops.trace_jump * v);
}

double v_f_with_projection(const OperatorSet& ops, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& flux_proj,
                           const std::function<double(double)>& V) {
  const int n = ops.num_elements();
  const int k = ops.degree;
  const Eigen::VectorXd ju = ops.trace_jump * u;
  const Eigen::VectorXd avg_flux = ops.trace_avg * flux_proj;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const int right = (i + 1) % n;
    const double jump_V = V(trace_right(u, k, i)) - V(trace_left(u, k, right));
    sum += jump_V - avg_flux(i) * ju(i);
  }
  return sum;
}

double v_f(const OperatorSet& ops, const Eigen::VectorXd& u,
           const std::function<double(double)>& f, const std::function<double(double)>& V) {
  return v_f_with_projection(ops, u, project_flux(ops, u, f), V);
}

double mass(const OperatorSet& ops, const Eigen::VectorXd& u) {
  // Only the mean mode integrates; higher Legendre modes have zero mean.
  double s = 0.0;
  for (int e = 0; e < ops.num_elements(); ++e) {
    s += ops.mesh.element_size(e) * u(e * ops.modes());
  }
  return s;
}

double energy(const OperatorSet& ops, const Eigen::VectorXd& u) {
  return u.dot(mass_apply(ops, u));
}

double hamiltonian(const OperatorSet& ops, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& q, double eps,
                   const std::function<double(double)>& V) {
  double potential = 0.0;
  const int k1 = ops.modes();
  for (int e = 0; e < ops.num_elements(); ++e) {
    const Eigen::VectorXd uvals = ops.phi * u.segment(e * k1, k1);
    double s = 0.0;
    for (int iq = 0; iq < ops.quad.count(); ++iq) {
      s += ops.quad.weights(iq) * V(uvals(iq));
    }
    potential += 0.5 * ops.mesh.element_size(e) * s;
  }
  return 0.5 * eps * q.dot(mass_apply(ops, q)) - potential;
}

ClosedFormTaus closed_form_taus_from_sums(double eta_qu, double eta_pu, double eta_ut_u,
                                          double eta_uu, double vf, double eps) {
  ClosedFormTaus out;
  const double det = eta_qu * eta_pu + eta_ut_u * eta_uu;
  const double scale = std::abs(eta_qu * eta_pu) + std::abs(eta_ut_u * eta_uu);
  if (scale == 0.0 || std::abs(det) < 1e-12 * scale) {
    out.degenerate = true;
    return out;
  }
  out.taus.tau_qu = -(1.0 / eps) * eta_pu * vf / det;
  out.taus.tau_pu = eta_ut_u * vf / det;
  return out;
}

ClosedFormTaus closed_form_taus(const OperatorSet& ops, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                                const Eigen::VectorXd& jump_t, double eps,
                                const std::function<double(double)>& f,
                                const std::function<double(double)>& V) {
  const Eigen::VectorXd ju = ops.trace_jump * u;
  const double eta_qu = (ops.trace_jump * q).dot(ju);
  const double eta_pu = (ops.trace_jump * p).dot(ju);
  const double eta_ut_u = jump_t.dot(ju);
  const double eta_uu = ju.squaredNorm();
  const double vf = v_f(ops, u, f, V);
  return closed_form_taus_from_sums(eta_qu, eta_pu, eta_ut_u, eta_uu, vf, eps);
}

std::pair<double, double> lemma_condition_residuals(
    const OperatorSet& ops, const Eigen::VectorXd& u, const Eigen::VectorXd& q,
    const Eigen::VectorXd& p, const TraceParams& taus, const Eigen::VectorXd& jump_t,
    double eps, const std::function<double(double)>& f,
    const std::function<double(double)>& V) {
  const int n = ops.num_elements();
  const int k = ops.degree;
  const Eigen::VectorXd flux_proj = project_flux(ops, u, f);
  const Eigen::VectorXd avg_flux = ops.trace_avg * flux_proj;
  const Eigen::VectorXd ju = ops.trace_jump * u;
  const Eigen::VectorXd jq = ops.trace_jump * q;
  const Eigen::VectorXd jp = ops.trace_jump * p;

  double cond_energy = 0.0;
  double cond_hamiltonian = 0.0;
  for (int i = 0; i < n; ++i) {
    const int right = (i + 1) % n;
    const double jump_V = V(trace_right(u, k, i)) - V(trace_left(u, k, right));
    // u-trace is the plain average, so the (u_hat - {u}) terms drop out.
    const double phat_m_avg = taus.tau_pu * ju(i);
    const double qhat_m_avg = taus.tau_qu * ju(i);
    cond_energy += jump_V - avg_flux(i) * ju(i) - ju(i) * phat_m_avg + eps * jq(i) * qhat_m_avg;
    cond_hamiltonian += jp(i) * phat_m_avg + eps * jump_t(i) * qhat_m_avg;
  }
  return {cond_energy, cond_hamiltonian};
}

}  // namespace kdvdg
