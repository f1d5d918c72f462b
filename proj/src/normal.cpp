#include "wetting/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace wetting::normal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Beyond this point erfc(z / sqrt 2) is close to underflow; switch to the
// asymptotic series, whose truncation error there is below 1e-12 relative.
constexpr double kAsymptoticTail = 37.0;

}  // namespace

double log1mexp(double x) {
  if (x >= 0.0) return -kInf;
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

double log_upper_tail(double z) {
  if (z == kInf) return -kInf;
  if (z == -kInf) return 0.0;
  if (z <= 0.0) return std::log1p(-0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0));
  if (z < kAsymptoticTail) return std::log(0.5 * std::erfc(z * std::numbers::sqrt2 / 2.0));
  const double r = 1.0 / (z * z);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_interval_mass(double lo, double hi) {
  if (!(lo < hi)) return -kInf;
  if (lo >= 0.0) {
    const double a = log_upper_tail(lo);
    const double b = log_upper_tail(hi);
    return a + log1mexp(b - a);
  }
  if (hi <= 0.0) return log_interval_mass(-hi, -lo);
  const double outside = std::exp(log_upper_tail(hi)) + std::exp(log_upper_tail(-lo));
  return std::log1p(-outside);
}

double quantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double upper_quantile(double q) {
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

}  // namespace wetting::normal
