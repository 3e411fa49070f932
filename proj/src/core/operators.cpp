#include "kdvdg/operators.hpp"

#include <stdexcept>

namespace kdvdg {

namespace {

// E: row per interface, [w](x_{e+1}) = right trace of element e minus left
// trace of element e+1 (periodic).
Eigen::MatrixXd build_trace_jump(int n_elems, int degree) {
  const int k1 = degree + 1;
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n_elems, n_elems * k1);
  for (int e = 0; e < n_elems; ++e) {
    const int right = (e + 1) % n_elems;
    for (int j = 0; j < k1; ++j) {
      E(e, e * k1 + j) += 1.0;
      E(e, right * k1 + j) -= (j % 2 == 0 ? 1.0 : -1.0);
    }
  }
  return E;
}

Eigen::MatrixXd build_trace_avg(int n_elems, int degree) {
  const int k1 = degree + 1;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n_elems, n_elems * k1);
  for (int e = 0; e < n_elems; ++e) {
    const int right = (e + 1) % n_elems;
    for (int j = 0; j < k1; ++j) {
      B(e, e * k1 + j) += 0.5;
      B(e, right * k1 + j) += 0.5 * (j % 2 == 0 ? 1.0 : -1.0);
    }
  }
  return B;
}

}  // namespace

Eigen::MatrixXd assemble_mass(const Mesh& mesh, int degree) {
  const int n = mesh.num_elements();
  const int k1 = degree + 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n * k1, n * k1);
  for (int e = 0; e < n; ++e) {
    for (int l = 0; l < k1; ++l) {
      M(e * k1 + l, e * k1 + l) = mesh.element_size(e) / (2 * l + 1);
    }
  }
  return M;
}

Eigen::MatrixXd assemble_deriv(const Mesh& mesh, int degree) {
  // Oriented so that row t of deriv * [u] equals (u_h, (phi^t)_x) on each
  // element; the entry (t, s) is int P_s P_t' dxi and the element size
  // cancels under the chain rule.
  const int n = mesh.num_elements();
  const int k1 = degree + 1;
  Eigen::MatrixXd block(k1, k1);
  for (int t = 0; t < k1; ++t) {
    for (int s = 0; s < k1; ++s) {
      block(t, s) = legendre_deriv_integral(s, t);
    }
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n * k1, n * k1);
  for (int e = 0; e < n; ++e) {
    D.block(e * k1, e * k1, k1, k1) = block;
  }
  return D;
}

Eigen::MatrixXd assemble_average(const Mesh& mesh, int degree) {
  const int n = mesh.num_elements();
  return -build_trace_jump(n, degree).transpose() * build_trace_avg(n, degree);
}

Eigen::MatrixXd assemble_jump(const Mesh& mesh, int degree) {
  const Eigen::MatrixXd E = build_trace_jump(mesh.num_elements(), degree);
  return E.transpose() * E;
}

OperatorSet assemble_operators(const Mesh& mesh, int degree) {
  if (degree < 0) throw std::invalid_argument("assemble_operators: degree must be >= 0");
  OperatorSet ops(mesh, degree);
  const int n = mesh.num_elements();
  const int k1 = degree + 1;

  ops.quad = gauss_rule(default_quadrature_points(degree));
  const int nq = ops.quad.count();
  ops.phi.resize(nq, k1);
  for (int q = 0; q < nq; ++q) {
    for (int l = 0; l < k1; ++l) {
      ops.phi(q, l) = legendre_eval(l, ops.quad.nodes(q));
    }
  }
  ops.proj.resize(k1, nq);
  for (int l = 0; l < k1; ++l) {
    for (int q = 0; q < nq; ++q) {
      ops.proj(l, q) = 0.5 * (2 * l + 1) * ops.quad.weights(q) * ops.phi(q, l);
    }
  }

  ops.mass_diag.resize(n * k1);
  for (int e = 0; e < n; ++e) {
    for (int l = 0; l < k1; ++l) {
      ops.mass_diag(e * k1 + l) = mesh.element_size(e) / (2 * l + 1);
    }
  }
  ops.deriv = assemble_deriv(mesh, degree);
  ops.trace_jump = build_trace_jump(n, degree);
  ops.trace_avg = build_trace_avg(n, degree);
  ops.average = -ops.trace_jump.transpose() * ops.trace_avg;
  ops.jump = ops.trace_jump.transpose() * ops.trace_jump;
  ops.grad = ops.deriv + ops.average;
  return ops;
}

DGCoefficients l2_project(const std::function<double(double)>& g, const Mesh& mesh,
                          int degree, const QuadratureRule& rule) {
  const int n = mesh.num_elements();
  const int k1 = degree + 1;
  DGCoefficients c = DGCoefficients::zero(n, degree);
  for (int e = 0; e < n; ++e) {
    for (int l = 0; l < k1; ++l) {
      double s = 0.0;
      for (int q = 0; q < rule.count(); ++q) {
        const double xi = rule.nodes(q);
        s += rule.weights(q) * g(mesh.to_physical(e, xi)) * legendre_eval(l, xi);
      }
      c.values(e * k1 + l) = 0.5 * (2 * l + 1) * s;
    }
  }
  return c;
}

DGCoefficients l2_project(const std::function<double(double)>& g, const Mesh& mesh,
                          int degree) {
  return l2_project(g, mesh, degree, gauss_rule(default_quadrature_points(degree)));
}

Eigen::VectorXd project_flux(const OperatorSet& ops, const Eigen::VectorXd& u,
                             const std::function<double(double)>& f) {
  const int n = ops.num_elements();
  const int k1 = ops.modes();
  Eigen::VectorXd out(n * k1);
  Eigen::VectorXd fvals(ops.quad.count());
  for (int e = 0; e < n; ++e) {
    const Eigen::VectorXd uvals = ops.phi * u.segment(e * k1, k1);
    for (int q = 0; q < ops.quad.count(); ++q) fvals(q) = f(uvals(q));
    out.segment(e * k1, k1) = ops.proj * fvals;
  }
  return out;
}

Eigen::VectorXd interface_jumps(const OperatorSet& ops, const Eigen::VectorXd& w) {
  return ops.trace_jump * w;
}

Eigen::VectorXd interface_averages(const OperatorSet& ops, const Eigen::VectorXd& w) {
  return ops.trace_avg * w;
}

Eigen::VectorXd mass_apply(const OperatorSet& ops, const Eigen::VectorXd& v) {
  return ops.mass_diag.cwiseProduct(v);
}

}  // namespace kdvdg
