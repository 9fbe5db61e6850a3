#include "imscat/specfun.hpp"

#include <cmath>
#include <string>

namespace imscat::specfun {
namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;
constexpr long double kTiny = 1e-24L;

void require_nonnegative(double z, const char* name) {
  if (!std::isfinite(z) || z < 0.0) {
    throw std::domain_error(std::string(name) + ": argument must be finite and >= 0");
  }
}

void require_positive(double z, const char* name) {
  if (!std::isfinite(z) || z <= 0.0) {
    throw std::domain_error(std::string(name) + ": argument must be finite and > 0");
  }
}

// Asymptotic P/Q sums for order nu; stops at the smallest term.
detail::BesselPair asymptotic(long double z, int nu) {
  const long double mu = 4.0L * nu * nu;
  long double p = 1.0L;
  long double q = 0.0L;
  long double term = 1.0L;
  long double last = 1.0L;
  for (int k = 1; k < 200; ++k) {
    const long double odd = 2.0L * k - 1.0L;
    term *= (mu - odd * odd) / (k * 8.0L * z);
    const long double mag = std::fabs(term);
    if (mag > last) break;
    last = mag;
    const long double sign = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
    if (mag < kTiny) break;
  }
  const long double chi = z - (0.5L * nu + 0.25L) * kPiL;
  const long double amp = std::sqrt(2.0L / (kPiL * z));
  const long double c = std::cos(chi);
  const long double s = std::sin(chi);
  return {amp * (p * c - q * s), amp * (p * s + q * c)};
}

}  // namespace

namespace detail {

BesselPair order0_series(long double z) {
  const long double t = 0.25L * z * z;
  long double term = 1.0L;  // t^k / (k!)^2 with sign
  long double j = 1.0L;
  long double harmonic = 0.0L;
  long double ysum = 0.0L;
  for (int k = 1; k < 400; ++k) {
    term *= -t / (static_cast<long double>(k) * k);
    harmonic += 1.0L / k;
    j += term;
    // (-1)^{k+1} H_k t^k / (k!)^2 == -term * H_k
    ysum -= term * harmonic;
    if (std::fabs(term) * (1.0L + harmonic) < kTiny * (1.0L + std::fabs(j)) && k > t) break;
  }
  const long double y = (2.0L / kPiL) * ((std::log(0.5L * z) + kEulerGamma) * j + ysum);
  return {j, y};
}

BesselPair order1_series(long double z) {
  const long double t = 0.25L * z * z;
  const long double half = 0.5L * z;
  long double term = 1.0L;  // (-t)^k / (k! (k+1)!)
  long double jsum = 1.0L;
  long double hk = 0.0L;   // H_k
  long double hk1 = 1.0L;  // H_{k+1}
  long double ysum = (hk - kEulerGamma) + (hk1 - kEulerGamma);
  for (int k = 1; k < 400; ++k) {
    term *= -t / (static_cast<long double>(k) * (k + 1));
    hk = hk1;
    hk1 += 1.0L / (k + 1);
    jsum += term;
    ysum += term * ((hk - kEulerGamma) + (hk1 - kEulerGamma));
    if (std::fabs(term) * (1.0L + hk1) < kTiny * (1.0L + std::fabs(jsum)) && k > t) break;
  }
  const long double j = half * jsum;
  const long double y = -2.0L / (kPiL * z) + (2.0L / kPiL) * std::log(half) * j - (half / kPiL) * ysum;
  return {j, y};
}

BesselPair order0_asymptotic(long double z) { return asymptotic(z, 0); }
BesselPair order1_asymptotic(long double z) { return asymptotic(z, 1); }

}  // namespace detail

namespace {

detail::BesselPair order0(double z) {
  return z <= kSeriesSwitch ? detail::order0_series(z) : detail::order0_asymptotic(z);
}

detail::BesselPair order1(double z) {
  return z <= kSeriesSwitch ? detail::order1_series(z) : detail::order1_asymptotic(z);
}

}  // namespace

double bessel_j0(double z) {
  require_nonnegative(z, "bessel_j0");
  if (z == 0.0) return 1.0;
  return static_cast<double>(order0(z).j);
}

double bessel_j1(double z) {
  require_nonnegative(z, "bessel_j1");
  if (z == 0.0) return 0.0;
  return static_cast<double>(order1(z).j);
}

double bessel_y0(double z) {
  require_positive(z, "bessel_y0");
  return static_cast<double>(order0(z).y);
}

double bessel_y1(double z) {
  require_positive(z, "bessel_y1");
  return static_cast<double>(order1(z).y);
}

Complex hankel0_first(double z) {
  require_positive(z, "hankel0_first");
  const auto v = order0(z);
  return {static_cast<double>(v.j), static_cast<double>(v.y)};
}

Complex hankel1_first(double z) {
  require_positive(z, "hankel1_first");
  const auto v = order1(z);
  return {static_cast<double>(v.j), static_cast<double>(v.y)};
}

}  // namespace imscat::specfun
