#pragma once

// Bessel functions of the first and second kind (orders 0 and 1) and the
// Hankel functions built from them, for real positive arguments.
//
// Evaluation uses the ascending power series (accumulated in long double)
// for z <= kSeriesSwitch and the Hankel asymptotic expansion above it.

#include "imscat/types.hpp"

namespace imscat::specfun {

inline constexpr double kSeriesSwitch = 16.0;

double bessel_j0(double z);
double bessel_j1(double z);
double bessel_y0(double z);
double bessel_y1(double z);

/// H0^(1)(z) = J0(z) + i Y0(z).
Complex hankel0_first(double z);
/// H1^(1)(z) = J1(z) + i Y1(z).
Complex hankel1_first(double z);

namespace detail {

// Branches exposed for switchover tests. Each returns {J_nu, Y_nu}.
struct BesselPair {
  long double j;
  long double y;
};
BesselPair order0_series(long double z);
BesselPair order1_series(long double z);
BesselPair order0_asymptotic(long double z);
BesselPair order1_asymptotic(long double z);

}  // namespace detail
}  // namespace imscat::specfun
