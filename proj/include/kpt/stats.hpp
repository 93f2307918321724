#pragma once

#include <cmath>
#include <utility>

namespace kpt {

// Two-sided normal quantiles used throughout: confidence is fixed at 99%
// for every interval the tool reports.
inline constexpr double kZ99TwoSided = 2.5758293035489004;  // Phi^-1(0.995)
inline constexpr double kZ99UpperTail = 2.3263478740408408; // Phi^-1(0.99)

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(long successes, long n,
                                double z = kZ99TwoSided) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  double lo = center - half, hi = center + half;
  if (lo < 0.0) lo = 0.0;
  if (hi > 1.0) hi = 1.0;
  return {lo, hi};
}

// Hoeffding deviation radius: a mean of n samples in [0,1] is within this
// of its expectation except with probability delta.
inline double hoeffding_radius(long n, double delta) {
  if (n <= 0) return 1.0;
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

// Sample count for which the Hoeffding radius drops to eps.
inline long hoeffding_samples(double eps, double delta) {
  return static_cast<long>(
      std::ceil(std::log(2.0 / delta) / (2.0 * eps * eps)));
}

inline double binomial_sigma(double p, long n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// Upper-tail chi-square critical value via the Wilson-Hilferty cube
// approximation; z is the matching upper-tail normal quantile. Accurate to
// well under 1% for the df sizes used here (hundreds to thousands).
inline double chi2_critical_upper(long df, double z = kZ99UpperTail) {
  const double d = static_cast<double>(df);
  const double a = 2.0 / (9.0 * d);
  const double t = 1.0 - a + z * std::sqrt(a);
  return d * t * t * t;
}

}  // namespace kpt
