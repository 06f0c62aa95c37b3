#include "exmass/wavelet.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "exmass/detail/math.hpp"

namespace exmass::wavelet {

using detail::kPi;

LevelSchedule level_schedule(std::size_t n, int d) {
  if (n < 3) throw std::invalid_argument("level_schedule: n must be at least 3");
  if (d != 1 && d != 2) throw std::invalid_argument("level_schedule: dimension must be 1 or 2");
  const double logn = std::log(static_cast<double>(n));
  LevelSchedule schedule;
  schedule.coarsest = static_cast<int>(std::floor(std::log2(logn)));
  schedule.finest = static_cast<int>(
      std::floor(std::log2(static_cast<double>(n) / logn) / static_cast<double>(d)));
  return schedule;
}

TheoreticalParameters theoretical_parameters(std::size_t n, int d, double smoothness,
                                             double c0) {
  if (!(smoothness > 0.0))
    throw std::invalid_argument("theoretical_parameters: smoothness must be positive");
  if (n < 3) throw std::invalid_argument("theoretical_parameters: n too small");
  const double gamma = 1.0;  // (2M)^(2d) * sup|phi|^2 with M = 1/2 for Haar
  const double bound = std::min(2.0 * smoothness, static_cast<double>(d)) /
                       (kPi * kPi * gamma * (2.0 * smoothness + d));
  if (c0 == 0.0)
    c0 = 0.5 * bound;
  else if (!(c0 > 0.0) || c0 >= bound)
    throw std::invalid_argument("theoretical_parameters: c0 violates the admissible bound");

  const double nlogn = static_cast<double>(n) * std::log(static_cast<double>(n));
  const double denom = 2.0 * smoothness + static_cast<double>(d);
  TheoreticalParameters params;
  params.gamma = gamma;
  params.smoothness = smoothness;
  params.c0 = c0;
  params.level = static_cast<int>(std::floor(std::log2(std::pow(nlogn, 1.0 / denom))));
  params.order =
      std::max(1, static_cast<int>(std::floor(std::pow(c0 * nlogn, smoothness / denom))));
  return params;
}

std::size_t HaarEstimator::cell_index(std::span<const double> t) const {
  std::size_t flat = 0;
  const double width = std::pow(2.0, -level);
  for (int p = 0; p < dimension(); ++p) {
    if (t[p] < box.low[p] || t[p] > box.high[p]) return npos;
    auto idx = static_cast<long>(std::floor((t[p] - box.low[p]) / width));
    // the box's top edge belongs to the last cell
    if (idx >= static_cast<long>(cells[p])) idx = static_cast<long>(cells[p]) - 1;
    flat = flat * cells[p] + static_cast<std::size_t>(idx);
  }
  return flat;
}

double HaarEstimator::coefficient(std::size_t cell) const {
  const double scale = std::pow(2.0, 0.5 * level * dimension());
  return scale * static_cast<double>(counts[cell]) / static_cast<double>(sample_size);
}

HaarEstimator fit(const densities::Sample& sample, int level,
                  const densities::SupportBox& box) {
  if (sample.size() == 0) throw std::invalid_argument("wavelet fit: empty sample");
  if (level < 0) throw std::invalid_argument("wavelet fit: level must be nonnegative");
  if (sample.dimension != box.dimension)
    throw std::invalid_argument("wavelet fit: box dimension mismatch");
  if (sample.size() >= 3) {
    const auto schedule = level_schedule(sample.size(), sample.dimension);
    if (level < schedule.coarsest || level > schedule.finest)
      std::cerr << "warning: Haar level " << level << " outside the recommended range ["
                << schedule.coarsest << ", " << schedule.finest << "]\n";
  }

  HaarEstimator est;
  est.level = level;
  est.box = box;
  est.sample_size = sample.size();
  const double width = std::pow(2.0, -level);
  std::size_t total = 1;
  for (int p = 0; p < box.dimension; ++p) {
    est.cells[p] = static_cast<std::size_t>(
        std::ceil((box.high[p] - box.low[p]) / width - 1e-12));
    if (est.cells[p] == 0) est.cells[p] = 1;
    total *= est.cells[p];
  }
  est.counts.assign(total, 0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const std::size_t cell = est.cell_index(sample.point(i));
    if (cell == HaarEstimator::npos) continue;
    ++est.counts[cell];
    ++est.inside;
  }
  return est;
}

double evaluate(const HaarEstimator& est, std::span<const double> t) {
  const std::size_t cell = est.cell_index(t);
  if (cell == HaarEstimator::npos)
    throw std::domain_error("wavelet evaluate: point outside the support box");
  const double scale = std::pow(2.0, est.level * est.dimension());
  return scale * static_cast<double>(est.counts[cell]) /
         static_cast<double>(est.sample_size);
}

VarianceEstimate variance_estimate(const HaarEstimator& est, std::span<const double> t) {
  const std::size_t cell = est.cell_index(t);
  if (cell == HaarEstimator::npos)
    throw std::domain_error("wavelet variance: point outside the support box");
  const double n = static_cast<double>(est.sample_size);
  const double p = static_cast<double>(est.counts[cell]) / n;
  const double pow2jd = std::pow(2.0, est.level * est.dimension());
  VarianceEstimate var;
  var.raw = pow2jd * pow2jd * p * (1.0 - p) / n;
  var.truncated = std::min(var.raw, pow2jd / n);  // gamma = 1 for Haar
  return var;
}

}  // namespace exmass::wavelet
