#include "kdvdg/integrator.hpp"

#include <cmath>
#include <stdexcept>

namespace kdvdg {

JumpTimeClosure uniform_jump_t(const Eigen::VectorXd& jumps_prev_half,
                               const Eigen::VectorXd& jumps_prev_whole, double dt) {
  JumpTimeClosure cl;
  cl.unknown_coeff = 3.0 / dt;
  cl.known = (jumps_prev_half - 4.0 * jumps_prev_whole) / dt;
  return cl;
}

std::array<double, 3> nonuniform_jump_t_coeffs(double dt) {
  const double s = 0.5 * dt;
  if (s == 1.0) throw std::invalid_argument("nonuniform_jump_t: singular at dt = 2");
  const double c1 = (1.0 - s) / (s * s);
  const double c2 = -1.0 / (s * s * (1.0 - s));
  const double c3 = (2.0 - s) / (s * (1.0 - s));
  return {c1, c2, c3};
}

JumpTimeClosure nonuniform_jump_t(const Eigen::VectorXd& jumps_t0,
                                  const Eigen::VectorXd& jumps_startup, double dt) {
  const auto [c1, c2, c3] = nonuniform_jump_t_coeffs(dt);
  JumpTimeClosure cl;
  cl.unknown_coeff = c3;
  cl.known = c1 * jumps_t0 + c2 * jumps_startup;
  return cl;
}

Simulation::Simulation(ProblemSpec problem, Mesh mesh, int degree, RunOptions options)
    : problem_(std::move(problem)),
      ops_(assemble_operators(mesh, degree)),
      opts_(std::move(options)) {
  if (!(opts_.dt > 0.0)) throw std::invalid_argument("Simulation: dt must be positive");
  if (opts_.final_time < 0.0) throw std::invalid_argument("Simulation: final time must be >= 0");
  if (opts_.final_time > 0.0) {
    total_steps_ = std::max(1, static_cast<int>(std::llround(opts_.final_time / opts_.dt)));
    dt_ = opts_.final_time / total_steps_;
  } else {
    total_steps_ = 0;
    dt_ = opts_.dt;
  }
  if (total_steps_ > 0 && dt_ >= 2.0) {
    throw std::invalid_argument(
        "Simulation: dt must be below 2 (startup stencil is singular at dt/2 = 1)");
  }
}

Eigen::VectorXd Simulation::project_g(double t) const {
  if (!problem_.g) return Eigen::VectorXd::Zero(ops_.size());
  const auto& g = problem_.g;
  return l2_project([&](double x) { return g(x, t); }, ops_.mesh, ops_.degree, ops_.quad)
      .values;
}

void Simulation::record_invariants(double res_energy, double res_hamiltonian, int iters) {
  InvariantRecord rec;
  rec.t = time();
  rec.mass = mass(ops_, u_);
  rec.energy = energy(ops_, u_);
  rec.hamiltonian = hamiltonian(ops_, u_, q_, problem_.eps, problem_.V);
  rec.tau_qu = taus_.tau_qu;
  rec.tau_pu = taus_.tau_pu;
  rec.constraint_residual_energy = res_energy;
  rec.constraint_residual_hamiltonian = res_hamiltonian;
  rec.newton_iterations = iters;
  log_.push_back(rec);
}

void Simulation::startup() {
  if (started_) return;
  u_ = l2_project(problem_.u0, ops_.mesh, ops_.degree, ops_.quad).values;
  q_ = -(ops_.grad * u_).cwiseQuotient(ops_.mass_diag);
  const Eigen::VectorXd flux0 = project_flux(ops_, u_, problem_.f);
  p_ = flux0 - problem_.eps * (ops_.grad * q_).cwiseQuotient(ops_.mass_diag);
  taus_ = TraceParams{};
  jumps_t0_ = ops_.trace_jump * u_;
  record_invariants(0.0, 0.0, 0);

  if (total_steps_ > 0) {
    // One backward Euler solve of the same scheme at t = (dt/2)^2 primes the
    // nonuniform jump-derivative stencil; only the jumps of that state are
    // kept. The jump derivative inside this solve is the two-point backward
    // difference over the tiny step.
    const double delta = 0.25 * dt_ * dt_;
    JumpTimeClosure cl;
    cl.unknown_coeff = 1.0 / delta;
    cl.known = -jumps_t0_ / delta;
    const HalfStepSystem sys{ops_, problem_, delta, u_, project_g(delta), cl};
    SolverState st{u_, q_, p_, TraceParams{}};
    solve_halfstep(sys, st, opts_.solver);
    jumps_startup_ = ops_.trace_jump * st.u;
    half_guess_ = SolverState{u_, q_, p_, TraceParams{}};
  }
  started_ = true;
}

void Simulation::step() {
  if (!started_) startup();
  if (finished()) throw std::out_of_range("Simulation::step: already at final time");

  const double t_n = time();
  const Eigen::VectorXd jumps_n = ops_.trace_jump * u_;
  const JumpTimeClosure closure = (step_ == 0)
                                      ? nonuniform_jump_t(jumps_t0_, jumps_startup_, dt_)
                                      : uniform_jump_t(jumps_prev_half_, jumps_n, dt_);
  const HalfStepSystem sys{ops_, problem_, 0.5 * dt_, u_, project_g(t_n + 0.5 * dt_),
                           closure};

  SolverState half = half_guess_;
  SolveReport half_report;
  try {
    half_report = solve_halfstep(sys, half, opts_.solver);
  } catch (const SolveError& err) {
    throw SolveError(err.kind(), std::string(err.what()) + " (half step " +
                                     std::to_string(step_) + " at t = " + std::to_string(t_n) +
                                     ")");
  }
  half_guess_ = half;

  const Eigen::VectorXd u_new = 2.0 * half.u - u_;
  const Eigen::VectorXd q_new = -(ops_.grad * u_new).cwiseQuotient(ops_.mass_diag);
  const Eigen::VectorXd jumps_half = ops_.trace_jump * half.u;
  const Eigen::VectorXd jumps_new = ops_.trace_jump * u_new;
  // Backward three-point jump derivative over t_n, t_{n+1/2}, t_{n+1}.
  const Eigen::VectorXd jump_t_new = (jumps_n - 4.0 * jumps_half + 3.0 * jumps_new) / dt_;

  Eigen::VectorXd p_new = half.p;
  TraceParams taus_new = half.taus;
  SolveReport post_report;
  try {
    post_report =
        solve_poststep(ops_, problem_, u_new, q_new, jump_t_new, p_new, taus_new, opts_.solver);
  } catch (const SolveError& err) {
    throw SolveError(err.kind(), std::string(err.what()) + " (post step " +
                                     std::to_string(step_) + " at t = " + std::to_string(t_n) +
                                     ")");
  }

  u_ = u_new;
  q_ = q_new;
  p_ = p_new;
  taus_ = taus_new;
  jumps_prev_half_ = jumps_half;
  ++step_;

  max_newton_ = std::max({max_newton_, half_report.iterations, post_report.iterations});
  const double res_energy = half_report.constraint_residual_energy;
  const double res_ham = half_report.constraint_residual_hamiltonian;
  max_constraint_res_ = std::max({max_constraint_res_, res_energy, res_ham});
  max_poststep_res_ = std::max(max_poststep_res_, post_report.residual_inf);
  record_invariants(res_energy, res_ham, half_report.iterations + post_report.iterations);
}

void Simulation::run() {
  if (!started_) startup();
  while (!finished()) step();
}

Simulation::L2Errors Simulation::errors_vs_exact() const {
  if (!problem_.exact) {
    throw std::logic_error("errors_vs_exact: problem has no exact solution");
  }
  const auto& exact = *problem_.exact;
  const double t = time();
  const QuadratureRule rule = gauss_rule(10);
  const int k = ops_.degree;
  double eu = 0.0, eq = 0.0, ep = 0.0;
  for (int e = 0; e < ops_.num_elements(); ++e) {
    const double half_h = 0.5 * ops_.mesh.element_size(e);
    for (int iq = 0; iq < rule.count(); ++iq) {
      const double xi = rule.nodes(iq);
      const double x = ops_.mesh.to_physical(e, xi);
      const double w = rule.weights(iq) * half_h;
      const double du = exact.u(x, t) - eval_field(u_, k, e, xi);
      const double dq = exact.q(x, t) - eval_field(q_, k, e, xi);
      const double dp = exact.p(x, t) - eval_field(p_, k, e, xi);
      eu += w * du * du;
      eq += w * dq * dq;
      ep += w * dp * dp;
    }
  }
  return {std::sqrt(eu), std::sqrt(eq), std::sqrt(ep)};
}

Simulation::Snapshot Simulation::sample(int points_per_element) const {
  if (points_per_element < 1) {
    throw std::invalid_argument("sample: need at least one point per element");
  }
  const int pts = points_per_element;
  const int total = ops_.num_elements() * pts;
  Snapshot snap;
  snap.x.resize(total);
  snap.u.resize(total);
  snap.q.resize(total);
  snap.p.resize(total);
  int idx = 0;
  for (int e = 0; e < ops_.num_elements(); ++e) {
    for (int r = 0; r < pts; ++r) {
      const double xi = (pts == 1) ? 0.0 : -1.0 + 2.0 * r / (pts - 1);
      snap.x(idx) = ops_.mesh.to_physical(e, xi);
      snap.u(idx) = eval_field(u_, ops_.degree, e, xi);
      snap.q(idx) = eval_field(q_, ops_.degree, e, xi);
      snap.p(idx) = eval_field(p_, ops_.degree, e, xi);
      ++idx;
    }
  }
  return snap;
}

Simulation run(const ProblemSpec& problem, const Mesh& mesh, int degree, double dt,
               double final_time, const SolverConfig& cfg) {
  RunOptions opts;
  opts.dt = dt;
  opts.final_time = final_time;
  opts.solver = cfg;
  Simulation sim(problem, mesh, degree, opts);
  sim.run();
  return sim;
}

}  // namespace kdvdg
