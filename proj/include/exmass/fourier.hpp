#pragma once

#include <functional>
#include <vector>

namespace exmass::fourier {

//! Cosine coefficients of the excess-mass kernel Phi_nu(u) = max(|u| - nu, 0)
//! on [-scale, scale]. Phi_nu is even, so all sine coefficients vanish and
//! are not stored. Coefficients follow the scale^2 convention
//!   c_0 = (scale - nu)^2 / 2,
//!   c_k = 2 scale^2 / (pi^2 k^2) * (cos(pi k) - cos(pi k nu / scale)),
//! under which coefficients(nu, N, R) == R^2 * coefficients(nu/R, N, 1);
//! partial-sum evaluation normalizes by 1/scale (see approx_phi).
struct FourierCoefficients {
  double nu = 0.0;
  double scale = 1.0;  // R >= max(1, nu) in typical use
  int order = 1;       // truncation N
  std::vector<double> c;  // c[0..order]
};

//! Coefficients c_0..c_N; all zero when nu >= scale (the kernel vanishes on
//! the domain). Throws on non-finite input, order < 1 or scale < 1e-12.
FourierCoefficients coefficients(double nu, int order, double scale = 1.0);

//! max(|u| - nu, 0)
double exact_phi(double u, double nu);

//! Truncated cosine series at u, |u| <= scale (throws otherwise):
//!   (c_0 + sum_k c_k cos(pi k u / scale)) / scale.
//! The 1/scale factor makes the series converge to exact_phi for every
//! scale, with uniform error at most tail_bound(order, scale).
double approx_phi(const FourierCoefficients& coeffs, double u);

//! 4 scale^2 / (pi^2 N): uniform bound on |exact_phi - approx_phi|.
double tail_bound(int order, double scale = 1.0);

//! Extension point for other integrated functionals: cosine coefficients of
//! an arbitrary even kernel on [-scale, scale] by midpoint quadrature
//! (matching the scale^2 convention of `coefficients`). Only the excess-mass
//! kernel has closed forms; anything else inherits quadrature error of order
//! (order / points)^2.
FourierCoefficients coefficients_numeric(const std::function<double(double)>& even_kernel,
                                         int order, double scale = 1.0,
                                         std::size_t points = 65536);

}  // namespace exmass::fourier
