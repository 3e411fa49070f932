#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kdvdg {

/// Periodic 1D mesh over [a, b]. The first and last node describe the same
/// trace point, so a valid periodic mesh needs at least two elements.
class Mesh {
 public:
  static Mesh uniform(double a, double b, int num_elements);
  static Mesh from_nodes(std::vector<double> nodes);

  double a() const { return nodes_.front(); }
  double b() const { return nodes_.back(); }
  double length() const { return b() - a(); }
  int num_elements() const { return static_cast<int>(nodes_.size()) - 1; }
  double node(int i) const { return nodes_[static_cast<size_t>(i)]; }
  double element_size(int e) const { return nodes_[e + 1] - nodes_[e]; }
  double max_element_size() const;

  /// Map a reference coordinate xi in [-1, 1] onto element e.
  double to_physical(int e, double xi) const {
    return 0.5 * (nodes_[e] + nodes_[e + 1]) + 0.5 * xi * element_size(e);
  }

 private:
  explicit Mesh(std::vector<double> nodes);
  std::vector<double> nodes_;
};

/// Legendre polynomial P_l(xi) by the three-term recurrence.
double legendre_eval(int l, double xi);

/// d/dxi P_l(xi), valid on the closed interval [-1, 1].
double legendre_deriv(int l, double xi);

/// Integral of P_l * P_j' over [-1, 1]: equals 2 when j > l with j - l odd,
/// zero otherwise.
double legendre_deriv_integral(int l, int j);

/// Modal coefficients of one scalar DG field, stored element-major:
/// (c_1^0 .. c_1^k, ..., c_N^0 .. c_N^k) for unnormalized Legendre modes.
struct DGCoefficients {
  int num_elements = 0;
  int degree = 0;
  Eigen::VectorXd values;

  int modes() const { return degree + 1; }
  int size() const { return num_elements * modes(); }

  Eigen::VectorBlock<Eigen::VectorXd> block(int e) {
    return values.segment(e * modes(), modes());
  }
  Eigen::VectorBlock<const Eigen::VectorXd> block(int e) const {
    return values.segment(e * modes(), modes());
  }

  static DGCoefficients zero(int num_elements, int degree);
};

/// u_h restricted to `element`, evaluated at reference coordinate xi.
double eval_field(const DGCoefficients& coeffs, int element, double xi);
double eval_field(const Eigen::VectorXd& values, int degree, int element, double xi);

/// Trace values at the two endpoints of one element. With P_l(1) = 1 and
/// P_l(-1) = (-1)^l these are plain (alternating) sums of the modes.
double trace_right(const Eigen::VectorXd& values, int degree, int element);
double trace_left(const Eigen::VectorXd& values, int degree, int element);

}  // namespace kdvdg
