#pragma once

#include <Eigen/Dense>

namespace kdvdg {

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n - 1.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  int count() const { return static_cast<int>(nodes.size()); }
};

QuadratureRule gauss_rule(int num_points);

/// Node count used for all element integrals at polynomial degree k. Chosen
/// so that integrands up to degree 3k (quadratic flux times a test function)
/// are integrated exactly with margin.
int default_quadrature_points(int degree);

}  // namespace kdvdg
