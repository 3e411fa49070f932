#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kdvdg/mesh.hpp"
#include "kdvdg/quadrature.hpp"

using namespace kdvdg;

TEST_CASE("uniform mesh construction") {
  const Mesh mesh = Mesh::uniform(0.0, 4.0 * M_PI, 8);
  CHECK(mesh.num_elements() == 8);
  CHECK(mesh.node(0) == doctest::Approx(0.0));
  CHECK(mesh.node(1) == doctest::Approx(M_PI / 2.0));
  CHECK(mesh.node(8) == doctest::Approx(4.0 * M_PI));
  for (int e = 0; e < 8; ++e) {
    CHECK(mesh.element_size(e) == doctest::Approx(M_PI / 2.0));
  }

  const Mesh small = Mesh::uniform(0.0, 1.0, 2);
  CHECK(small.node(0) == 0.0);
  CHECK(small.node(1) == 0.5);
  CHECK(small.node(2) == 1.0);

  CHECK_THROWS_AS(Mesh::uniform(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Mesh::uniform(1.0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("nonuniform mesh requires sorted nodes") {
  CHECK_NOTHROW(Mesh::from_nodes({0.0, 0.25, 1.0}));
  CHECK_THROWS_AS(Mesh::from_nodes({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Mesh::from_nodes({0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("legendre values") {
  CHECK(legendre_eval(0, 0.3) == doctest::Approx(1.0));
  CHECK(legendre_eval(1, -1.0) == doctest::Approx(-1.0));
  CHECK(legendre_eval(2, 0.5) == doctest::Approx(-0.125));
  // Endpoint convention P_l(1) = 1, P_l(-1) = (-1)^l.
  for (int l = 0; l <= 6; ++l) {
    CHECK(legendre_eval(l, 1.0) == doctest::Approx(1.0));
    CHECK(legendre_eval(l, -1.0) == doctest::Approx(l % 2 == 0 ? 1.0 : -1.0));
  }
}

TEST_CASE("legendre derivative matches finite differences") {
  const double h = 1e-6;
  for (int l = 0; l <= 5; ++l) {
    for (double xi : {-0.9, -0.3, 0.1, 0.77}) {
      const double fd = (legendre_eval(l, xi + h) - legendre_eval(l, xi - h)) / (2 * h);
      CHECK(legendre_deriv(l, xi) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("gauss rules") {
  const QuadratureRule one = gauss_rule(1);
  CHECK(one.nodes(0) == doctest::Approx(0.0));
  CHECK(one.weights(0) == doctest::Approx(2.0));

  const QuadratureRule two = gauss_rule(2);
  CHECK(two.nodes(0) == doctest::Approx(-1.0 / std::sqrt(3.0)));
  CHECK(two.nodes(1) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(two.weights(0) == doctest::Approx(1.0));
  CHECK(two.weights(1) == doctest::Approx(1.0));
  CHECK(two.weights.sum() == doctest::Approx(2.0));

  // 5 points integrate xi^8 exactly: 2/9.
  const QuadratureRule five = gauss_rule(5);
  double s = 0.0;
  for (int q = 0; q < 5; ++q) s += five.weights(q) * std::pow(five.nodes(q), 8);
  CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-14));

  CHECK_THROWS_AS(gauss_rule(0), std::invalid_argument);
}

TEST_CASE("quadrature exactness on random polynomials") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int n = 1; n <= 12; ++n) {
    const QuadratureRule rule = gauss_rule(n);
    const int deg = 2 * n - 1;
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> c(deg + 1);
      for (auto& v : c) v = coef(rng);
      double quad = 0.0;
      for (int q = 0; q < rule.count(); ++q) {
        double val = 0.0, pw = 1.0;
        for (int j = 0; j <= deg; ++j) {
          val += c[j] * pw;
          pw *= rule.nodes(q);
        }
        quad += rule.weights(q) * val;
      }
      double exact = 0.0;  // odd monomials drop out over [-1, 1]
      for (int j = 0; j <= deg; j += 2) exact += 2.0 * c[j] / (j + 1);
      CHECK(quad == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("legendre orthogonality under the k+1 point rule") {
  for (int k = 0; k <= 4; ++k) {
    const QuadratureRule rule = gauss_rule(k + 1);
    for (int l = 0; l <= k; ++l) {
      for (int j = 0; j <= k; ++j) {
        double s = 0.0;
        for (int q = 0; q < rule.count(); ++q) {
          s += rule.weights(q) * legendre_eval(l, rule.nodes(q)) *
               legendre_eval(j, rule.nodes(q));
        }
        const double expected = (l == j) ? 2.0 / (2 * l + 1) : 0.0;
        CHECK(s == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("eval_field") {
  DGCoefficients c = DGCoefficients::zero(3, 2);
  c.values(0 * 3 + 0) = 3.0;
  CHECK(eval_field(c, 0, -0.7) == doctest::Approx(3.0));
  CHECK(eval_field(c, 0, 0.9) == doctest::Approx(3.0));

  DGCoefficients lin = DGCoefficients::zero(2, 2);
  lin.values(1 * 3 + 1) = 1.0;
  CHECK(eval_field(lin, 1, 1.0) == doctest::Approx(1.0));

  DGCoefficients two = DGCoefficients::zero(2, 1);
  two.values(0) = 1.0;
  two.values(1) = 2.0;
  CHECK(eval_field(two, 0, -1.0) == doctest::Approx(-1.0));
}

TEST_CASE("endpoint traces agree with eval_field") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int k = 0; k <= 3; ++k) {
    DGCoefficients c = DGCoefficients::zero(4, k);
    for (int i = 0; i < c.size(); ++i) c.values(i) = coef(rng);
    for (int e = 0; e < 4; ++e) {
      CHECK(trace_right(c.values, k, e) == doctest::Approx(eval_field(c, e, 1.0)));
      CHECK(trace_left(c.values, k, e) == doctest::Approx(eval_field(c, e, -1.0)));
    }
  }
}

TEST_CASE("default quadrature order covers the cubic potential") {
  for (int k = 0; k <= 4; ++k) {
    const int n = default_quadrature_points(k);
    CHECK(2 * n - 1 >= 3 * k);  // V(u_h) integrands for quadratic flux
    CHECK(2 * n - 1 >= 2 * k);  // mass-type integrands
  }
}
