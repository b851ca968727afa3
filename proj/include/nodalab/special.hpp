#pragma once

#include <vector>

namespace nodalab::special {

/// Bessel function of the first kind, order zero. Power series for |x| <= 8,
/// Miller's downward recurrence (normalised by J0 + 2 sum J_2k = 1) beyond.
double bessel_j0(double x);

/// Legendre polynomial P_l(x), upward three-term recurrence.
double legendre_p(int l, double x);

/// sin(x)/x with its Taylor expansion near zero.
double sinc(double x);

/// Orthonormal associated Legendre functions of a single degree l at colatitude
/// theta, for orders m = 0..l, with the Condon-Shortley phase and the
/// normalisation  2*pi * int |Pbar_l^m(cos t)|^2 sin t dt = 1.
struct LegendreRow {
  std::vector<double> value;      // Pbar_l^m(cos theta)
  std::vector<double> dtheta;     // d/dtheta Pbar_l^m(cos theta)
  std::vector<double> over_sin;   // Pbar_l^m / sin theta for m >= 1 (finite at the poles); 0 for m = 0
};

LegendreRow legendre_row(int l, double theta);

}  // namespace nodalab::special
