#include "exmass/excess.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "exmass/detail/math.hpp"
#include "exmass/fourier.hpp"
#include "exmass/io.hpp"
#include "json.hpp"

namespace exmass::excess {

using detail::kPi;

namespace {

void check_levels(std::span<const double> levels) {
  if (levels.empty()) throw std::invalid_argument("curve: empty level grid");
  for (std::size_t i = 0; i + 1 < levels.size(); ++i)
    if (levels[i] > levels[i + 1])
      throw std::invalid_argument("curve: levels must be ascending");
  if (levels.front() < 0.0)
    throw std::invalid_argument("curve: levels must be nonnegative");
}

}  // namespace

double auto_scale(std::span<const double> density_values) {
  double sup = 0.0;
  for (double v : density_values) sup = std::max(sup, v);
  // The series only needs sup fhat < R. Tying R to the observed sup instead
  // of flooring it at 1 concentrates the N cosine terms on the range the
  // density actually occupies; with a floor at 1 a low-peaked density (every
  // bivariate case here) wastes most of the resolution and the truncation
  // error near the kink dominates the estimate.
  return std::max(1.05 * sup, 1e-6);
}

FunctionalTransform functional_transform(std::span<const double> density_values,
                                         std::span<const double> variance_values,
                                         const QuadratureGrid& grid, int order,
                                         double scale) {
  if (density_values.size() != grid.size())
    throw std::invalid_argument("functional_transform: density values do not match the grid");
  if (!variance_values.empty() && variance_values.size() != grid.size())
    throw std::invalid_argument("functional_transform: variance values do not match the grid");
  if (order < 1) throw std::invalid_argument("functional_transform: order must be at least 1");
  if (!(scale > 0.0)) throw std::invalid_argument("functional_transform: scale must be positive");

  FunctionalTransform transform;
  transform.scale = scale;
  transform.requested_order = order;
  transform.order = order;

  if (!variance_values.empty()) {
    double sup_var = 0.0;
    for (double v : variance_values) sup_var = std::max(sup_var, v);
    const double exponent = 0.5 * kPi * kPi * static_cast<double>(order) *
                            static_cast<double>(order) * sup_var;
    if (exponent > kMaxExponent) {
      const int reduced = static_cast<int>(
          std::floor(std::sqrt(2.0 * kMaxExponent / (kPi * kPi * sup_var))));
      if (reduced < 1)
        throw std::runtime_error(
            "functional_transform: bias-correction exponent overflows even at order 1");
      std::cerr << "warning: bias-correction exponent would exceed " << kMaxExponent
                << "; reducing Fourier order from " << order << " to " << reduced << "\n";
      transform.order = reduced;
    }
  }

  const std::size_t terms = static_cast<std::size_t>(transform.order) + 1;
  transform.integrals.assign(terms, 0.0);
  const double w = grid.cell_weight();
  const std::size_t g = grid.size();
  for (std::size_t i = 0; i < g; ++i) transform.linear_mass += w * density_values[i];
  for (std::size_t i = 0; i < g; ++i) {
    const double theta = kPi * density_values[i] / scale;
    const double c1 = std::cos(theta);
    // exp(pi^2 k^2 v / 2) tracked via the ratio exp(pi^2 (2k-1) v / 2)
    double ratio = 1.0, ratio_step = 1.0;
    if (!variance_values.empty()) {
      const double a = 0.5 * kPi * kPi * variance_values[i];
      ratio = std::exp(a);
      ratio_step = std::exp(2.0 * a);
    }
    double prev = 1.0, cur = c1, factor = 1.0;
    for (std::size_t k = 1; k < terms; ++k) {
      factor *= ratio;
      transform.integrals[k] += w * (factor * cur - 1.0);
      const double next = 2.0 * c1 * cur - prev;
      prev = cur;
      cur = next;
      ratio *= ratio_step;
    }
  }
  return transform;
}

double evaluate(const FunctionalTransform& transform, double nu) {
  if (nu >= transform.scale) return 0.0;
  if (nu <= 0.0) return transform.linear_mass;
  const auto coeffs = fourier::coefficients(nu, transform.order, transform.scale);
  double sum = 0.0;
  for (std::size_t k = 1; k < transform.integrals.size(); ++k)
    sum += coeffs.c[k] * transform.integrals[k];
  return sum / transform.scale;
}

double estimate_wavelet(const wavelet::HaarEstimator& est, double nu, int order,
                        const QuadratureGrid& grid) {
  const std::size_t g = grid.size();
  std::vector<double> dens(g, 0.0), var(g, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    const auto x = grid.point(i);
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(grid.dimension()));
    if (est.cell_index(xs) == wavelet::HaarEstimator::npos) continue;  // fhat = 0 off the box
    dens[i] = wavelet::evaluate(est, xs);
    var[i] = wavelet::variance_estimate(est, xs).truncated;
  }
  const auto transform = functional_transform(dens, var, grid, order, auto_scale(dens));
  return evaluate(transform, nu);
}

double estimate_kernel_corrected(const kde::KernelModel& model,
                                 const kde::BootstrapMoments& moments, double nu,
                                 int order, const QuadratureGrid& grid) {
  if (moments.variance.size() != grid.size())
    throw std::invalid_argument("estimate_kernel_corrected: moments were not computed on this grid");
  const auto dens = kde::evaluate_on_grid(model, grid);
  const auto transform =
      functional_transform(dens, moments.variance, grid, order, auto_scale(dens));
  return evaluate(transform, nu);
}

double estimate_kernel_mean(const kde::BootstrapMoments& moments, double nu, int order,
                            const QuadratureGrid& grid) {
  if (moments.mean.size() != grid.size())
    throw std::invalid_argument("estimate_kernel_mean: moments were not computed on this grid");
  const auto transform =
      functional_transform(moments.mean, {}, grid, order, auto_scale(moments.mean));
  return evaluate(transform, nu);
}

double plugin_from_values(std::span<const double> density_values,
                          const QuadratureGrid& grid, double nu) {
  if (density_values.size() != grid.size())
    throw std::invalid_argument("plugin: density values do not match the grid");
  const double w = grid.cell_weight();
  double sum = 0.0;
  for (double v : density_values) sum += std::max(v - nu, 0.0);
  return sum * w;
}

double estimate_plugin(const kde::KernelModel& model, double nu,
                       const QuadratureGrid& grid) {
  return plugin_from_values(kde::evaluate_on_grid(model, grid), grid, nu);
}

ExcessMassCurve functional_curve(const FunctionalTransform& transform,
                                 std::span<const double> levels, CurveInfo info) {
  check_levels(levels);
  ExcessMassCurve curve;
  curve.levels.assign(levels.begin(), levels.end());
  curve.values.reserve(levels.size());
  for (double nu : levels) curve.values.push_back(evaluate(transform, nu));
  info.order = transform.order;
  info.scale = transform.scale;
  curve.info = std::move(info);
  return curve;
}

ExcessMassCurve plugin_curve(std::span<const double> density_values,
                             const QuadratureGrid& grid,
                             std::span<const double> levels, CurveInfo info) {
  check_levels(levels);
  ExcessMassCurve curve;
  curve.levels.assign(levels.begin(), levels.end());
  curve.values.reserve(levels.size());
  for (double nu : levels)
    curve.values.push_back(plugin_from_values(density_values, grid, nu));
  curve.info = std::move(info);
  return curve;
}

ExcessMassCurve oracle_curve(const densities::DensitySpec& spec,
                             std::span<const double> levels,
                             std::size_t grid_points_per_dim) {
  check_levels(levels);
  if (grid_points_per_dim == 0)
    grid_points_per_dim = densities::default_oracle_points(spec.dimension);
  // cache the pdf over the oracle grid once; each level is then a pass
  const auto box = densities::support_box(spec);
  QuadratureGrid grid;
  grid.box = box;
  for (int p = 0; p < box.dimension; ++p) grid.points[p] = grid_points_per_dim;
  std::vector<double> dens(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    dens[i] = densities::pdf(spec, std::span<const double>(
                                       x.data(), static_cast<std::size_t>(box.dimension)));
  }
  ExcessMassCurve curve;
  curve.levels.assign(levels.begin(), levels.end());
  curve.values.reserve(levels.size());
  for (double nu : levels) curve.values.push_back(plugin_from_values(dens, grid, nu));
  curve.info.method = "oracle";
  return curve;
}

std::vector<double> level_grid(std::size_t count, double lo, double hi) {
  if (count < 2) throw std::invalid_argument("level_grid: need at least 2 levels");
  if (!(hi > lo)) throw std::invalid_argument("level_grid: hi must exceed lo");
  std::vector<double> levels(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    levels[i] = lo + static_cast<double>(i) * step;
  levels.back() = hi;
  return levels;
}

std::string curves_to_csv(std::span<const ExcessMassCurve> curves) {
  if (curves.empty()) return "";
  const auto& levels = curves.front().levels;
  for (const auto& c : curves)
    if (c.levels != levels)
      throw std::invalid_argument("curves_to_csv: curves must share one level grid");
  std::ostringstream out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out << io::format_double(levels[i]);
    for (const auto& c : curves) out << ',' << io::format_double(c.values[i]);
    out << '\n';
  }
  return out.str();
}

namespace {

nlohmann::json curve_to_json_obj(const ExcessMassCurve& curve) {
  nlohmann::json j;
  j["method"] = curve.info.method;
  if (curve.info.order) j["order"] = *curve.info.order;
  if (curve.info.level) j["level"] = *curve.info.level;
  if (!curve.info.bandwidth.empty()) j["bandwidth"] = curve.info.bandwidth;
  if (curve.info.scale) j["scale"] = *curve.info.scale;
  j["levels"] = curve.levels;
  j["values"] = curve.values;
  return j;
}

}  // namespace

std::string curves_to_json(std::span<const ExcessMassCurve> curves) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : curves) j.push_back(curve_to_json_obj(c));
  return j.dump(2);
}

}  // namespace exmass::excess
