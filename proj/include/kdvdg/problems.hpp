#pragma once

#include <functional>
#include <optional>
#include <string>

namespace kdvdg {

using SpaceTimeFn = std::function<double(double, double)>;
using ScalarFn = std::function<double(double)>;

struct ExactSolution {
  SpaceTimeFn u;
  SpaceTimeFn q;  // u_x
  SpaceTimeFn p;  // eps u_xx + f(u)
};

/// One generalized KdV test problem: u_t + eps u_xxx + f(u)_x = g on a
/// periodic domain, with V an antiderivative of f.
struct ProblemSpec {
  std::string name;
  double domain_a = 0.0;
  double domain_b = 1.0;
  double eps = 1.0;
  ScalarFn f;
  ScalarFn f_prime;
  ScalarFn V;
  SpaceTimeFn g;  // null means zero source
  ScalarFn u0;
  std::optional<ExactSolution> exact;
};

/// Third-order linear equation, f(u) = u, on [0, 4 pi] with a traveling
/// sine solution and no source.
ProblemSpec linear_problem();

/// Third-order nonlinear equation, f(u) = u^2 / 2, on [0, 1] with the
/// manufactured solution sin(2 pi x + t) and the matching source term.
ProblemSpec nonlinear_problem(double eps);

/// Classical KdV cnoidal wave on [0, 1], eps = 1/24^2, f(u) = u^2 / 2.
ProblemSpec cnoidal_problem();

/// Default time step of the experiments: 0.2 (h/|Omega|)^min(k,1) for the
/// linear and nonlinear sine problems, 0.2 h for the cnoidal wave.
double default_time_step(const ProblemSpec& problem, int degree, int num_elements);

}  // namespace kdvdg
