#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdvdg/elliptic.hpp"

using namespace kdvdg;

namespace {

// Adaptive Simpson quadrature of the defining integral
// K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta).
double k_integrand(double theta, double m) {
  const double s = std::sin(theta);
  return 1.0 / std::sqrt(1.0 - m * s * s);
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                        double tol, double m, int depth) {
  const double mid = 0.5 * (a + b);
  const double lm = k_integrand(0.5 * (a + mid), m);
  const double rm = k_integrand(0.5 * (mid + b), m);
  const double left = simpson(a, mid, fa, lm, fm);
  const double right = simpson(mid, b, fm, rm, fb);
  if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(a, mid, fa, lm, fm, left, 0.5 * tol, m, depth + 1) +
         adaptive_simpson(mid, b, fm, rm, fb, right, 0.5 * tol, m, depth + 1);
}

double elliptic_K_quadrature(double m) {
  const double a = 0.0, b = 0.5 * M_PI;
  const double fa = k_integrand(a, m);
  const double fm = k_integrand(0.5 * (a + b), m);
  const double fb = k_integrand(b, m);
  return adaptive_simpson(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), 1e-15, m, 0);
}

}  // namespace

TEST_CASE("K at the endpoints of its easy range") {
  CHECK(elliptic_K(0.0) == doctest::Approx(0.5 * M_PI).epsilon(1e-15));
  CHECK(elliptic_K(0.5) < elliptic_K(0.9));
  CHECK_THROWS_AS(elliptic_K(1.0), std::invalid_argument);
  CHECK_THROWS_AS(elliptic_K(-0.1), std::invalid_argument);
}

TEST_CASE("K(0.9) against the quadrature oracle and the frozen value") {
  const double oracle = elliptic_K_quadrature(0.9);
  CHECK(elliptic_K(0.9) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(elliptic_K(0.9) == doctest::Approx(2.5780921133481732).epsilon(1e-12));
}

TEST_CASE("AGM K matches quadrature across the parameter range") {
  for (double m : {0.1, 0.5, 0.9, 0.99}) {
    CHECK(elliptic_K(m) == doctest::Approx(elliptic_K_quadrature(m)).epsilon(1e-12));
  }
}

TEST_CASE("cn limits and special points") {
  for (double m : {0.0, 0.3, 0.9}) {
    CHECK(jacobi_cn(0.0, m) == doctest::Approx(1.0));
  }
  CHECK(std::abs(jacobi_cn(elliptic_K(0.9), 0.9)) < 1e-10);
  for (double z : {0.3, 1.2}) {
    CHECK(jacobi_cn(z, 0.0) == doctest::Approx(std::cos(z)).epsilon(1e-14));
  }
}

TEST_CASE("pythagorean identity over several periods") {
  for (double m : {0.2, 0.9, 0.99}) {
    const double K = elliptic_K(m);
    for (int i = 0; i <= 80; ++i) {
      const double z = -4.0 * K + 8.0 * K * i / 80.0;
      const JacobiValues v = jacobi_elliptic(z, m);
      CHECK(std::abs(v.sn * v.sn + v.cn * v.cn - 1.0) < 1e-11);
      CHECK(std::abs(v.dn * v.dn + m * v.sn * v.sn - 1.0) < 1e-11);
      CHECK(std::abs(v.cn) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("cn is 4K periodic") {
  for (double m : {0.5, 0.9}) {
    const double K = elliptic_K(m);
    for (double z : {0.0, 0.37, 1.9, -2.6}) {
      CHECK(jacobi_cn(z + 4.0 * K, m) == doctest::Approx(jacobi_cn(z, m)).epsilon(1e-10));
    }
  }
}

TEST_CASE("sn solves the defining ODE (sn')^2 = (1-sn^2)(1-m sn^2)") {
  const double m = 0.9;
  const double h = 1e-5;
  for (double z : {0.2, 0.8, 1.7, 3.1}) {
    const double sp = (jacobi_elliptic(z + h, m).sn - jacobi_elliptic(z - h, m).sn) / (2 * h);
    const double s = jacobi_elliptic(z, m).sn;
    CHECK(sp * sp ==
          doctest::Approx((1.0 - s * s) * (1.0 - m * s * s)).epsilon(1e-8));
  }
}
