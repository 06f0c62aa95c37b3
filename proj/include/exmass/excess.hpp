#pragma once

#include <span>
#include <string>
#include <vector>

#include "exmass/curve.hpp"
#include "exmass/grid.hpp"
#include "exmass/kde.hpp"
#include "exmass/wavelet.hpp"

namespace exmass::excess {

//! Level-independent part of the functional estimator: per Fourier index k,
//! the quadrature value of
//!   J_k = int_K [exp(pi^2 k^2 var(t) / 2) cos(pi k dens(t) / scale) - 1] dt.
//! Every level then costs one dot product sum_{k>=1} c_k(nu) J_k / scale, and
//! a whole curve shares the same integrals.
//!
//! The -1 anchors the series at zero density: the full series vanishes at
//! u = 0, so subtracting its value there changes the estimate only by the
//! truncation constant A_N(0)|K| (which tends to 0 with the order) while
//! making the integrand exactly zero wherever the density estimate and its
//! variance vanish. Without the anchor, the residual at u = 0 is of size
//! 2/(pi^2 N) and multiplies the measure of the empty region, which in 2-D
//! dwarfs the signal.
struct FunctionalTransform {
  double scale = 1.0;       // R
  int order = 1;            // truncation actually used
  int requested_order = 1;  // differs from `order` when the overflow guard fired
  double linear_mass = 0.0;       // int_K dens(t) dt, the exact level-0 value
  std::vector<double> integrals;  // J_1..J_order at indices 1..order; [0] unused
};

//! Exponent cap for the bias-correction factor; above it the estimator's
//! variance is out of control and the order is reduced.
inline constexpr double kMaxExponent = 50.0;

//! variance may be empty (treated as identically zero). Throws when even
//! order 1 would overflow the exponent cap.
FunctionalTransform functional_transform(std::span<const double> density_values,
                                         std::span<const double> variance_values,
                                         const QuadratureGrid& grid, int order,
                                         double scale);

//! sum_{k>=1} c_k(nu) J_k / scale; exactly 0 when nu >= scale. At nu = 0 the
//! target functional is linear (the kernel restricted to nonnegative
//! arguments is the identity), so the exact quadrature mass is returned
//! instead of the series value.
double evaluate(const FunctionalTransform& transform, double nu);

//! Scale chosen so the density estimate stays strictly inside the Fourier
//! domain: 1.05 * sup values. Levels at or above the scale get estimate 0,
//! which is the correct answer whenever the density never reaches them.
double auto_scale(std::span<const double> density_values);

//! Wavelet-form estimator: Haar density and truncated variance on the grid,
//! then the bias-corrected cosine sum. Grid points outside the estimator's
//! box contribute zero density and variance.
double estimate_wavelet(const wavelet::HaarEstimator& est, double nu, int order,
                        const QuadratureGrid& grid);

//! Bias-corrected kernel estimator: cos terms from a single fit on the full
//! sample, variance from the bootstrap.
double estimate_kernel_corrected(const kde::KernelModel& model,
                                 const kde::BootstrapMoments& moments, double nu,
                                 int order, const QuadratureGrid& grid);

//! Production estimator: cosine sum of the bootstrap mean, no exponential
//! factor.
double estimate_kernel_mean(const kde::BootstrapMoments& moments, double nu,
                            int order, const QuadratureGrid& grid);

//! Plug-in baseline: quadrature of max(fhat - nu, 0).
double estimate_plugin(const kde::KernelModel& model, double nu,
                       const QuadratureGrid& grid);
double plugin_from_values(std::span<const double> density_values,
                          const QuadratureGrid& grid, double nu);

//! Curve evaluation over an ascending level grid; the functional variant
//! reuses the transform so results are bit-identical to per-level calls.
ExcessMassCurve functional_curve(const FunctionalTransform& transform,
                                 std::span<const double> levels, CurveInfo info);
ExcessMassCurve plugin_curve(std::span<const double> density_values,
                             const QuadratureGrid& grid,
                             std::span<const double> levels, CurveInfo info);

//! Oracle curve for a known density (quadrature at oracle resolution).
ExcessMassCurve oracle_curve(const densities::DensitySpec& spec,
                             std::span<const double> levels,
                             std::size_t grid_points_per_dim = 0);

//! Evenly spaced levels lo..hi inclusive.
std::vector<double> level_grid(std::size_t count, double lo, double hi);

//! Serialization: headerless CSV rows "nu,value[,value...]" for one or more
//! curves on a shared grid, and JSON with method metadata.
std::string curves_to_csv(std::span<const ExcessMassCurve> curves);
std::string curves_to_json(std::span<const ExcessMassCurve> curves);

}  // namespace exmass::excess
