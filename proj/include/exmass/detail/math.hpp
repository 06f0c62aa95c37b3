#pragma once

#include <cmath>
#include <span>

namespace exmass::detail {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438187;

inline double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

//! P(Z <= z) for standard normal
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

//! smallest k >= 0 with P(|Z| > k) <= tail, by bisection on erfc
inline double normal_two_sided_quantile(double tail) {
  double lo = 0.0, hi = 45.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > tail)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

inline double geometric_mean(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += std::log(x);
  return std::exp(acc / static_cast<double>(xs.size()));
}

}  // namespace exmass::detail
