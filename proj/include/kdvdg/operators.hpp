#pragma once

#include <Eigen/Dense>
#include <functional>

#include "kdvdg/mesh.hpp"
#include "kdvdg/quadrature.hpp"

namespace kdvdg {

/// Global operators of the periodic DG discretization for a fixed mesh and
/// polynomial degree, sized N(k+1) square. Rows correspond to test modes.
///
///   mass:  block diagonal with entries h_i / (2l + 1)
///   deriv: block diagonal, row t / column s entry = int P_s P_t' dxi
///   average: block tridiagonal with periodic wrap; for all w, v in the
///            space  w' * average * v = -<{v}, w n>
///   jump:  block tridiagonal with periodic wrap; for all w, v
///          w' * jump * v = <[v], w n> = sum_i [v](x_i) [w](x_i)
///
/// `grad` caches deriv + average so that the first scheme equation reads
/// M[q] + grad[u] = 0. `trace_jump` (E) and `trace_avg` (B) map coefficient
/// vectors to per-interface jump/average values; jump = E' E, average = -E' B.
struct OperatorSet {
  OperatorSet(Mesh mesh_in, int degree_in) : mesh(std::move(mesh_in)), degree(degree_in) {}

  Mesh mesh;
  int degree = 0;

  QuadratureRule quad;       // volume rule for this degree
  Eigen::MatrixXd phi;       // P_l(xi_q), n_q x (k+1)
  Eigen::MatrixXd proj;      // (2l+1)/2 * w_q * P_l(xi_q), (k+1) x n_q

  Eigen::VectorXd mass_diag;
  Eigen::MatrixXd deriv;
  Eigen::MatrixXd average;
  Eigen::MatrixXd jump;
  Eigen::MatrixXd grad;
  Eigen::MatrixXd trace_jump;  // N x N(k+1)
  Eigen::MatrixXd trace_avg;   // N x N(k+1)

  int num_elements() const { return mesh.num_elements(); }
  int modes() const { return degree + 1; }
  int size() const { return num_elements() * modes(); }
};

OperatorSet assemble_operators(const Mesh& mesh, int degree);

Eigen::MatrixXd assemble_mass(const Mesh& mesh, int degree);
Eigen::MatrixXd assemble_deriv(const Mesh& mesh, int degree);
Eigen::MatrixXd assemble_average(const Mesh& mesh, int degree);
Eigen::MatrixXd assemble_jump(const Mesh& mesh, int degree);

/// Element-wise L2 projection of g onto the DG space.
DGCoefficients l2_project(const std::function<double(double)>& g, const Mesh& mesh,
                          int degree, const QuadratureRule& rule);
DGCoefficients l2_project(const std::function<double(double)>& g, const Mesh& mesh,
                          int degree);

/// Coefficients of the projection of f(u_h), evaluated with the operator
/// set's volume rule.
Eigen::VectorXd project_flux(const OperatorSet& ops, const Eigen::VectorXd& u,
                             const std::function<double(double)>& f);

/// Per-interface jump/average values; interface i sits at node x_{i+1} with
/// the periodic wrap placing the last interface at x_N = x_0.
Eigen::VectorXd interface_jumps(const OperatorSet& ops, const Eigen::VectorXd& w);
Eigen::VectorXd interface_averages(const OperatorSet& ops, const Eigen::VectorXd& w);

/// M v for the diagonal mass matrix.
Eigen::VectorXd mass_apply(const OperatorSet& ops, const Eigen::VectorXd& v);

}  // namespace kdvdg
