#include "kdvdg/problems.hpp"

#include <cmath>
#include <stdexcept>

#include "kdvdg/elliptic.hpp"

namespace kdvdg {

ProblemSpec linear_problem() {
  ProblemSpec prob;
  prob.name = "linear";
  prob.domain_a = 0.0;
  prob.domain_b = 4.0 * M_PI;
  prob.eps = 1.0;
  prob.f = [](double u) { return u; };
  prob.f_prime = [](double) { return 1.0; };
  prob.V = [](double u) { return 0.5 * u * u; };
  prob.g = nullptr;
  prob.u0 = [](double x) { return std::sin(0.5 * x); };
  ExactSolution exact;
  exact.u = [](double x, double t) { return std::sin(0.5 * x - 0.375 * t); };
  exact.q = [](double x, double t) { return 0.5 * std::cos(0.5 * x - 0.375 * t); };
  exact.p = [](double x, double t) { return 0.75 * std::sin(0.5 * x - 0.375 * t); };
  prob.exact = exact;
  return prob;
}

ProblemSpec nonlinear_problem(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("nonlinear_problem: eps must be positive");
  ProblemSpec prob;
  prob.name = "nonlinear";
  prob.domain_a = 0.0;
  prob.domain_b = 1.0;
  prob.eps = eps;
  prob.f = [](double u) { return 0.5 * u * u; };
  prob.f_prime = [](double u) { return u; };
  prob.V = [](double u) { return u * u * u / 6.0; };
  // Source that manufactures u = sin(2 pi x + t):
  //   u_t + eps u_xxx + u u_x
  //     = (1 - 8 pi^3 eps) cos(2 pi x + t) + pi sin(4 pi x + 2 t).
  const double c1 = 1.0 - 8.0 * M_PI * M_PI * M_PI * eps;
  prob.g = [c1](double x, double t) {
    return c1 * std::cos(2.0 * M_PI * x + t) + M_PI * std::sin(4.0 * M_PI * x + 2.0 * t);
  };
  prob.u0 = [](double x) { return std::sin(2.0 * M_PI * x); };
  ExactSolution exact;
  exact.u = [](double x, double t) { return std::sin(2.0 * M_PI * x + t); };
  exact.q = [](double x, double t) { return 2.0 * M_PI * std::cos(2.0 * M_PI * x + t); };
  exact.p = [eps](double x, double t) {
    const double s = std::sin(2.0 * M_PI * x + t);
    return -4.0 * M_PI * M_PI * eps * s + 0.5 * s * s;
  };
  prob.exact = exact;
  return prob;
}

ProblemSpec cnoidal_problem() {
  ProblemSpec prob;
  prob.name = "cnoidal";
  prob.domain_a = 0.0;
  prob.domain_b = 1.0;
  prob.eps = 1.0 / (24.0 * 24.0);
  prob.f = [](double u) { return 0.5 * u * u; };
  prob.f_prime = [](double u) { return u; };
  prob.V = [](double u) { return u * u * u / 6.0; };
  prob.g = nullptr;

  const double m = 0.9;
  const double eps = prob.eps;
  const double K = elliptic_K(m);
  const double A = 192.0 * m * eps * K * K;
  const double v = 64.0 * eps * (2.0 * m - 1.0) * K * K;

  auto phase = [K, v](double x, double t) { return 4.0 * K * (x - v * t); };
  ExactSolution exact;
  exact.u = [phase, m, A](double x, double t) {
    const double cn = jacobi_cn(phase(x, t), m);
    return A * cn * cn;
  };
  exact.q = [phase, m, A, K](double x, double t) {
    const JacobiValues j = jacobi_elliptic(phase(x, t), m);
    return -8.0 * A * K * j.cn * j.sn * j.dn;
  };
  exact.p = [phase, m, A, K, eps](double x, double t) {
    const double cn = jacobi_cn(phase(x, t), m);
    const double c2 = cn * cn;
    const double u = A * c2;
    // q_x from the elliptic derivative identities.
    const double qx =
        -32.0 * A * K * K * (3.0 * m * c2 * c2 + 2.0 * (1.0 - 2.0 * m) * c2 - (1.0 - m));
    return eps * qx + 0.5 * u * u;
  };
  prob.exact = exact;
  prob.u0 = [u = exact.u](double x) { return u(x, 0.0); };
  return prob;
}

double default_time_step(const ProblemSpec& problem, int degree, int num_elements) {
  if (num_elements < 1) throw std::invalid_argument("default_time_step: need elements");
  const double h = (problem.domain_b - problem.domain_a) / num_elements;
  if (problem.name == "cnoidal") return 0.2 * h;
  const double scaled = h / (problem.domain_b - problem.domain_a);
  return 0.2 * std::pow(scaled, std::min(degree, 1));
}

}  // namespace kdvdg
