#include "kdvdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "kdvdg/mesh.hpp"

namespace kdvdg {

QuadratureRule gauss_rule(int num_points) {
  if (num_points < 1) throw std::invalid_argument("gauss_rule: need at least one point");
  const int n = num_points;
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on the roots of P_n, seeded by the Chebyshev estimate.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double p = legendre_eval(n, x);
      dp = legendre_deriv(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    dp = legendre_deriv(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes(i) = -x;
    rule.weights(i) = w;
    rule.nodes(n - 1 - i) = x;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) {
    rule.nodes(n / 2) = 0.0;
    const double dp = legendre_deriv(n, 0.0);
    rule.weights(n / 2) = 2.0 / (dp * dp);
  }
  return rule;
}

int default_quadrature_points(int degree) {
  const int k = degree;
  const int for_flux = (3 * k + 2 + 1) / 2;  // ceil((3k + 2) / 2)
  return std::max(k + 2, for_flux) + 2;
}

}  // namespace kdvdg
