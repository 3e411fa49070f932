#pragma once

namespace kdvdg {

/// Complete elliptic integral of the first kind in the parameter convention,
///   K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta),   0 <= m < 1,
/// computed by the arithmetic-geometric mean iteration.
double elliptic_K(double m);

struct JacobiValues {
  double sn;
  double cn;
  double dn;
};

/// Jacobi elliptic functions sn, cn, dn at real argument z with parameter m
/// (same convention as elliptic_K). Uses the descending Landen / AGM scheme
/// with backward amplitude recovery after reducing z by the period 4K(m).
JacobiValues jacobi_elliptic(double z, double m);

double jacobi_cn(double z, double m);

}  // namespace kdvdg
