#include "kdvdg/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace kdvdg {

Mesh::Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {}

Mesh Mesh::uniform(double a, double b, int num_elements) {
  if (num_elements < 2) {
    throw std::invalid_argument("Mesh::uniform: a periodic mesh needs at least 2 elements");
  }
  if (!(a < b)) {
    throw std::invalid_argument("Mesh::uniform: requires a < b");
  }
  std::vector<double> nodes(static_cast<size_t>(num_elements) + 1);
  const double h = (b - a) / num_elements;
  for (int i = 0; i <= num_elements; ++i) {
    nodes[i] = a + i * h;
  }
  nodes.front() = a;
  nodes.back() = b;
  return Mesh(std::move(nodes));
}

Mesh Mesh::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 3) {
    throw std::invalid_argument("Mesh::from_nodes: a periodic mesh needs at least 2 elements");
  }
  if (!std::is_sorted(nodes.begin(), nodes.end()) ||
      std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    throw std::invalid_argument("Mesh::from_nodes: nodes must be strictly increasing");
  }
  return Mesh(std::move(nodes));
}

double Mesh::max_element_size() const {
  double h = 0.0;
  for (int e = 0; e < num_elements(); ++e) h = std::max(h, element_size(e));
  return h;
}

double legendre_eval(int l, double xi) {
  if (l == 0) return 1.0;
  if (l == 1) return xi;
  double pm = 1.0, p = xi;
  for (int n = 1; n < l; ++n) {
    const double pn = ((2 * n + 1) * xi * p - n * pm) / (n + 1);
    pm = p;
    p = pn;
  }
  return p;
}

double legendre_deriv(int l, double xi) {
  // P'_{n+1} = (2n+1) P_n + P'_{n-1}; stable up to the endpoints.
  if (l == 0) return 0.0;
  if (l == 1) return 1.0;
  double pm = 1.0, p = xi;    // P_{n-1}, P_n
  double dm = 0.0, d = 1.0;   // P'_{n-1}, P'_n
  for (int n = 1; n < l; ++n) {
    const double dn = (2 * n + 1) * p + dm;
    const double pn = ((2 * n + 1) * xi * p - n * pm) / (n + 1);
    pm = p;
    p = pn;
    dm = d;
    d = dn;
  }
  return d;
}

double legendre_deriv_integral(int l, int j) {
  if (l < 0 || j < 0) throw std::invalid_argument("legendre_deriv_integral: negative mode index");
  return (j > l && ((j - l) % 2 == 1)) ? 2.0 : 0.0;
}

DGCoefficients DGCoefficients::zero(int num_elements, int degree) {
  DGCoefficients c;
  c.num_elements = num_elements;
  c.degree = degree;
  c.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_elements) * (degree + 1));
  return c;
}

double eval_field(const Eigen::VectorXd& values, int degree, int element, double xi) {
  const int k1 = degree + 1;
  double s = 0.0;
  for (int l = 0; l < k1; ++l) {
    s += values(element * k1 + l) * legendre_eval(l, xi);
  }
  return s;
}

double eval_field(const DGCoefficients& coeffs, int element, double xi) {
  return eval_field(coeffs.values, coeffs.degree, element, xi);
}

double trace_right(const Eigen::VectorXd& values, int degree, int element) {
  const int k1 = degree + 1;
  return values.segment(element * k1, k1).sum();
}

double trace_left(const Eigen::VectorXd& values, int degree, int element) {
  const int k1 = degree + 1;
  double s = 0.0;
  for (int l = 0; l < k1; ++l) {
    s += (l % 2 == 0 ? 1.0 : -1.0) * values(element * k1 + l);
  }
  return s;
}

}  // namespace kdvdg
