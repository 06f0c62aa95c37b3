#pragma once

#include <cstdint>
#include <vector>

#include "exmass/densities.hpp"
#include "exmass/grid.hpp"

namespace exmass::kde {

//! Product-Gaussian kernel density estimate with one bandwidth per dimension.
struct KernelModel {
  densities::Sample sample;
  std::vector<double> bandwidth;

  int dimension() const { return sample.dimension; }
};

KernelModel make_model(densities::Sample sample, std::vector<double> bandwidth);

//! Automatic bandwidth, per dimension:
//!   h = 0.9 * min(stdev, IQR/1.34) * n^(-1/5)   (1-D)
//! with exponent n^(-1/6) in 2-D. stdev is the n-1 sample deviation, IQR
//! uses linearly interpolated quantiles. Falls back to stdev alone when the
//! IQR degenerates; throws if a dimension is constant.
std::vector<double> bandwidth_auto(const densities::Sample& sample);

//! (1/n) sum_i prod_p phi((x_p - X_ip)/h_p)/h_p
double evaluate(const KernelModel& model, std::span<const double> x);

//! KDE at every grid point. Kernels are cut off at 9 bandwidths, which
//! perturbs values below double precision but makes the scan linear in n.
std::vector<double> evaluate_on_grid(const KernelModel& model,
                                     const QuadratureGrid& grid);

//! Smoothness backed out of an automatic bandwidth by inverting
//! h = n^(-1/(d+2s)), clamped to [0.05, 10]. Requires 0 < h < 1.
double smoothness_from_bandwidth(double bandwidth, std::size_t n, int d);

//! Estimation parameters retuned with the extra log factor:
//!   order = floor((C0 n ln n)^(s/(d+2s))), C0 = d,
//!   bandwidth = (n ln n)^(-1/(d+2s)).
struct TunedParameters {
  double smoothness = 2.0;
  double bandwidth = 0.0;
  int order = 1;
  double c0 = 1.0;
};

TunedParameters tuned_parameters(double smoothness, std::size_t n, int d);

//! Pointwise bootstrap mean and variance of the KDE over a quadrature grid.
struct BootstrapMoments {
  QuadratureGrid grid;
  std::vector<double> mean;      // estimate of E_f fhat(x) per grid point
  std::vector<double> variance;  // unbiased variance estimate per grid point
  int replications = 0;
};

//! B nonparametric resamples (with replacement, size n), each fitted with the
//! same bandwidth and evaluated on the grid; per-point sample mean and
//! unbiased variance. Replication b always uses the stream derived from
//! (seed, b), so the result is independent of thread scheduling.
BootstrapMoments bootstrap_moments(const densities::Sample& sample,
                                   const std::vector<double>& bandwidth,
                                   const QuadratureGrid& grid, int replications,
                                   std::uint64_t seed, int threads = 1);

}  // namespace exmass::kde
