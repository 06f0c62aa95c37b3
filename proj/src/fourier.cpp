#include "exmass/fourier.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "exmass/detail/math.hpp"

namespace exmass::fourier {

using detail::kPi;

FourierCoefficients coefficients(double nu, int order, double scale) {
  if (!std::isfinite(nu) || !std::isfinite(scale))
    throw std::invalid_argument("coefficients: non-finite input");
  if (nu < 0.0) throw std::invalid_argument("coefficients: level must be nonnegative");
  if (order < 1) throw std::invalid_argument("coefficients: order must be at least 1");
  if (scale < 1e-12) throw std::invalid_argument("coefficients: scale too small");

  FourierCoefficients out;
  out.nu = nu;
  out.scale = scale;
  out.order = order;
  out.c.assign(static_cast<std::size_t>(order) + 1, 0.0);
  if (nu >= scale) return out;  // the kernel vanishes on [-scale, scale]

  out.c[0] = 0.5 * (scale - nu) * (scale - nu);
  const double front = 2.0 * scale * scale / (kPi * kPi);
  for (int k = 1; k <= order; ++k) {
    const double parity = (k % 2 == 0) ? 1.0 : -1.0;  // cos(pi k)
    out.c[static_cast<std::size_t>(k)] =
        front / (static_cast<double>(k) * static_cast<double>(k)) *
        (parity - std::cos(kPi * k * nu / scale));
  }
  return out;
}

double exact_phi(double u, double nu) {
  const double a = std::abs(u);
  return a > nu ? a - nu : 0.0;
}

double approx_phi(const FourierCoefficients& coeffs, double u) {
  if (std::abs(u) > coeffs.scale)
    throw std::domain_error("approx_phi: |u| exceeds the series scale");
  // Chebyshev-style recurrence for cos(k theta); |u| keeps evenness exact
  const double theta = kPi * std::abs(u) / coeffs.scale;
  const double c1 = std::cos(theta);
  double prev = 1.0, cur = c1;
  double sum = coeffs.c[0];
  if (coeffs.order >= 1) sum += coeffs.c[1] * c1;
  for (int k = 2; k <= coeffs.order; ++k) {
    const double next = 2.0 * c1 * cur - prev;
    prev = cur;
    cur = next;
    sum += coeffs.c[static_cast<std::size_t>(k)] * cur;
  }
  return sum / coeffs.scale;
}

double tail_bound(int order, double scale) {
  if (order < 1) throw std::invalid_argument("tail_bound: order must be at least 1");
  return 4.0 * scale * scale / (kPi * kPi * static_cast<double>(order));
}

FourierCoefficients coefficients_numeric(const std::function<double(double)>& even_kernel,
                                         int order, double scale, std::size_t points) {
  if (order < 1) throw std::invalid_argument("coefficients_numeric: order must be at least 1");
  if (!(scale > 0.0)) throw std::invalid_argument("coefficients_numeric: scale must be positive");
  if (points < 16) throw std::invalid_argument("coefficients_numeric: too few quadrature points");

  FourierCoefficients out;
  out.nu = std::numeric_limits<double>::quiet_NaN();  // not an excess-mass kernel
  out.scale = scale;
  out.order = order;
  out.c.assign(static_cast<std::size_t>(order) + 1, 0.0);
  // evenness halves the domain: c_k = 2 int_0^R phi(u) cos(pi k u / R) du
  const double step = scale / static_cast<double>(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double u = (static_cast<double>(i) + 0.5) * step;
    const double value = even_kernel(u);
    if (value == 0.0) continue;
    const double theta = kPi * u / scale;
    const double c1 = std::cos(theta);
    out.c[0] += value;
    double prev = 1.0, cur = c1;
    for (int k = 1; k <= order; ++k) {
      out.c[static_cast<std::size_t>(k)] += value * cur;
      const double next = 2.0 * c1 * cur - prev;
      prev = cur;
      cur = next;
    }
  }
  for (double& c : out.c) c *= 2.0 * step;
  out.c[0] *= 0.5;
  return out;
}

}  // namespace exmass::fourier
