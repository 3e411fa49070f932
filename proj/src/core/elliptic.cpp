#include "kdvdg/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kdvdg {

namespace {

void check_parameter(double m) {
  if (!(m >= 0.0) || !(m < 1.0)) {
    throw std::invalid_argument("elliptic functions require parameter m in [0, 1)");
  }
}

}  // namespace

double elliptic_K(double m) {
  check_parameter(m);
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  // Quadratic convergence; a handful of sweeps reaches round-off.
  for (int it = 0; it < 40 && std::abs(a - b) > 1e-17 * a; ++it) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return M_PI / (2.0 * a);
}

JacobiValues jacobi_elliptic(double z, double m) {
  check_parameter(m);
  if (m == 0.0) {
    return {std::sin(z), std::cos(z), 1.0};
  }

  // AGM scale ladder shared by K(m) and the amplitude recursion.
  constexpr int kMaxLevels = 32;
  double a[kMaxLevels], c[kMaxLevels];
  a[0] = 1.0;
  c[0] = std::sqrt(m);
  double b = std::sqrt(1.0 - m);
  int levels = 0;
  while (levels + 1 < kMaxLevels && std::abs(c[levels]) > 1e-17 * a[levels]) {
    const double an = 0.5 * (a[levels] + b);
    const double cn = 0.5 * (a[levels] - b);
    b = std::sqrt(a[levels] * b);
    ++levels;
    a[levels] = an;
    c[levels] = cn;
  }
  const double K = M_PI / (2.0 * a[levels]);

  // Reduce by the full period so the forward amplitude stays moderate.
  const double period = 4.0 * K;
  z -= period * std::round(z / period);

  double phi = std::ldexp(a[levels] * z, levels);
  for (int i = levels; i >= 1; --i) {
    const double s = std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0);
    phi = 0.5 * (phi + std::asin(s));
  }

  JacobiValues v;
  v.sn = std::sin(phi);
  v.cn = std::cos(phi);
  v.dn = std::sqrt(1.0 - m * v.sn * v.sn);
  return v;
}

double jacobi_cn(double z, double m) { return jacobi_elliptic(z, m).cn; }

}  // namespace kdvdg
