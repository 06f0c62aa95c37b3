#include "exmass/kde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exmass/detail/math.hpp"
#include "exmass/detail/parallel.hpp"
#include "exmass/rng.hpp"

namespace exmass::kde {

using detail::kInvSqrt2Pi;

namespace {

constexpr double kKernelCutoff = 9.0;  // bandwidths; phi(9) ~ 1e-18

double sample_stdev(const densities::Sample& sample, int p) {
  const std::size_t n = sample.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += sample.coord(i, p);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sample.coord(i, p) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n - 1));
}

//! linearly interpolated quantile of a sorted vector
double quantile_sorted(const std::vector<double>& xs, double q) {
  const double h = q * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= xs.size()) return xs.back();
  const double frac = h - static_cast<double>(lo);
  return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

}  // namespace

KernelModel make_model(densities::Sample sample, std::vector<double> bandwidth) {
  if (sample.size() == 0) throw std::invalid_argument("kde: empty sample");
  if (bandwidth.size() != static_cast<std::size_t>(sample.dimension))
    throw std::invalid_argument("kde: one bandwidth per dimension required");
  for (double h : bandwidth)
    if (!(h > 0.0)) throw std::invalid_argument("kde: bandwidth must be positive");
  return KernelModel{std::move(sample), std::move(bandwidth)};
}

std::vector<double> bandwidth_auto(const densities::Sample& sample) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("bandwidth_auto: need at least 2 points");
  const int d = sample.dimension;
  const double exponent = d == 1 ? -0.2 : -1.0 / 6.0;
  const double factor = 0.9 * std::pow(static_cast<double>(n), exponent);

  std::vector<double> bandwidth(static_cast<std::size_t>(d));
  std::vector<double> column(n);
  for (int p = 0; p < d; ++p) {
    for (std::size_t i = 0; i < n; ++i) column[i] = sample.coord(i, p);
    std::sort(column.begin(), column.end());
    const double sd = sample_stdev(sample, p);
    if (!(sd > 0.0))
      throw std::invalid_argument("bandwidth_auto: sample is constant in a dimension");
    const double iqr = quantile_sorted(column, 0.75) - quantile_sorted(column, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    bandwidth[static_cast<std::size_t>(p)] = factor * spread;
  }
  return bandwidth;
}

double evaluate(const KernelModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.dimension())
    throw std::invalid_argument("kde evaluate: point dimension mismatch");
  const std::size_t n = model.sample.size();
  const int d = model.dimension();
  double norm = 1.0 / static_cast<double>(n);
  for (int p = 0; p < d; ++p) norm /= model.bandwidth[static_cast<std::size_t>(p)];
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double prod = 1.0;
    for (int p = 0; p < d; ++p) {
      const double z =
          (x[p] - model.sample.coord(i, p)) / model.bandwidth[static_cast<std::size_t>(p)];
      prod *= kInvSqrt2Pi * std::exp(-0.5 * z * z);
    }
    sum += prod;
  }
  return sum * norm;
}

std::vector<double> evaluate_on_grid(const KernelModel& model,
                                     const QuadratureGrid& grid) {
  if (grid.dimension() != model.dimension())
    throw std::invalid_argument("kde evaluate_on_grid: grid dimension mismatch");
  const std::size_t n = model.sample.size();
  std::vector<double> values(grid.size(), 0.0);

  if (model.dimension() == 1) {
    const double h = model.bandwidth[0];
    const double low = grid.box.low[0];
    const double step = grid.step(0);
    const double norm = 1.0 / (static_cast<double>(n) * h);
    const std::size_t g = grid.points[0];
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = model.sample.coord(i, 0);
      // grid indices with |center - xi| <= cutoff * h
      const double reach = kKernelCutoff * h;
      const long first = std::max<long>(
          0, static_cast<long>(std::ceil((xi - reach - low) / step - 0.5)));
      const long last = std::min<long>(
          static_cast<long>(g) - 1,
          static_cast<long>(std::floor((xi + reach - low) / step - 0.5)));
      for (long idx = first; idx <= last; ++idx) {
        const double z = (low + (static_cast<double>(idx) + 0.5) * step - xi) / h;
        values[static_cast<std::size_t>(idx)] += kInvSqrt2Pi * std::exp(-0.5 * z * z);
      }
    }
    for (double& v : values) v *= norm;
    return values;
  }

  const double hx = model.bandwidth[0], hy = model.bandwidth[1];
  const double lowx = grid.box.low[0], lowy = grid.box.low[1];
  const double stepx = grid.step(0), stepy = grid.step(1);
  const std::size_t gx = grid.points[0], gy = grid.points[1];
  const double norm = 1.0 / (static_cast<double>(n) * hx * hy);
  std::vector<double> wx, wy;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = model.sample.coord(i, 0);
    const double yi = model.sample.coord(i, 1);
    const long fx = std::max<long>(
        0, static_cast<long>(std::ceil((xi - kKernelCutoff * hx - lowx) / stepx - 0.5)));
    const long lx = std::min<long>(
        static_cast<long>(gx) - 1,
        static_cast<long>(std::floor((xi + kKernelCutoff * hx - lowx) / stepx - 0.5)));
    const long fy = std::max<long>(
        0, static_cast<long>(std::ceil((yi - kKernelCutoff * hy - lowy) / stepy - 0.5)));
    const long ly = std::min<long>(
        static_cast<long>(gy) - 1,
        static_cast<long>(std::floor((yi + kKernelCutoff * hy - lowy) / stepy - 0.5)));
    if (fx > lx || fy > ly) continue;
    wx.resize(static_cast<std::size_t>(lx - fx + 1));
    wy.resize(static_cast<std::size_t>(ly - fy + 1));
    for (long ix = fx; ix <= lx; ++ix) {
      const double z = (lowx + (static_cast<double>(ix) + 0.5) * stepx - xi) / hx;
      wx[static_cast<std::size_t>(ix - fx)] = kInvSqrt2Pi * std::exp(-0.5 * z * z);
    }
    for (long iy = fy; iy <= ly; ++iy) {
      const double z = (lowy + (static_cast<double>(iy) + 0.5) * stepy - yi) / hy;
      wy[static_cast<std::size_t>(iy - fy)] = kInvSqrt2Pi * std::exp(-0.5 * z * z);
    }
    for (long ix = fx; ix <= lx; ++ix) {
      double* row = values.data() + static_cast<std::size_t>(ix) * gy;
      const double wxi = wx[static_cast<std::size_t>(ix - fx)];
      for (long iy = fy; iy <= ly; ++iy)
        row[iy] += wxi * wy[static_cast<std::size_t>(iy - fy)];
    }
  }
  for (double& v : values) v *= norm;
  return values;
}

double smoothness_from_bandwidth(double bandwidth, std::size_t n, int d) {
  if (n < 3) throw std::invalid_argument("smoothness_from_bandwidth: n too small");
  if (!(bandwidth > 0.0) || bandwidth >= 1.0)
    throw std::domain_error(
        "smoothness_from_bandwidth: bandwidth must lie in (0, 1); rescale the data");
  const double s =
      0.5 * (std::log(static_cast<double>(n)) / (-std::log(bandwidth)) - d);
  return std::clamp(s, 0.05, 10.0);
}

TunedParameters tuned_parameters(double smoothness, std::size_t n, int d) {
  if (!(smoothness > 0.0)) throw std::invalid_argument("tuned_parameters: smoothness must be positive");
  if (n < 3) throw std::invalid_argument("tuned_parameters: n too small");
  const double nlogn = static_cast<double>(n) * std::log(static_cast<double>(n));
  const double denom = static_cast<double>(d) + 2.0 * smoothness;
  TunedParameters params;
  params.smoothness = smoothness;
  params.c0 = static_cast<double>(d);
  params.bandwidth = std::pow(nlogn, -1.0 / denom);
  params.order = std::max(
      1, static_cast<int>(std::floor(std::pow(params.c0 * nlogn, smoothness / denom))));
  return params;
}

BootstrapMoments bootstrap_moments(const densities::Sample& sample,
                                   const std::vector<double>& bandwidth,
                                   const QuadratureGrid& grid, int replications,
                                   std::uint64_t seed, int threads) {
  if (replications < 2)
    throw std::invalid_argument("bootstrap_moments: need at least 2 replications");
  const std::size_t n = sample.size();
  const std::size_t g = grid.size();
  const std::size_t b = static_cast<std::size_t>(replications);
  const int d = sample.dimension;

  std::vector<double> rows(b * g);
  detail::parallel_for(b, threads, [&](std::size_t rep) {
    rng::Xoshiro256pp stream(rng::derive_seed(seed, rep));
    densities::Sample resample;
    resample.dimension = d;
    resample.data.resize(n * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pick = stream.index(n);
      for (int p = 0; p < d; ++p)
        resample.data[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(p)] =
            sample.coord(pick, p);
    }
    const auto values = evaluate_on_grid(make_model(std::move(resample), bandwidth), grid);
    std::copy(values.begin(), values.end(), rows.begin() + rep * g);
  });

  BootstrapMoments moments;
  moments.grid = grid;
  moments.replications = replications;
  moments.mean.assign(g, 0.0);
  moments.variance.assign(g, 0.0);
  for (std::size_t rep = 0; rep < b; ++rep)
    for (std::size_t i = 0; i < g; ++i) moments.mean[i] += rows[rep * g + i];
  for (double& m : moments.mean) m /= static_cast<double>(b);
  for (std::size_t rep = 0; rep < b; ++rep)
    for (std::size_t i = 0; i < g; ++i) {
      const double diff = rows[rep * g + i] - moments.mean[i];
      moments.variance[i] += diff * diff;
    }
  for (double& v : moments.variance) v /= static_cast<double>(b - 1);
  return moments;
}

}  // namespace exmass::kde
