#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "exmass/densities.hpp"
#include "exmass/grid.hpp"
#include "exmass/kde.hpp"

using namespace exmass;

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

densities::Sample sample_from(std::vector<double> xs) {
  densities::Sample s;
  s.dimension = 1;
  s.data = std::move(xs);
  return s;
}

//! nrd0-style rule recomputed independently of the implementation
double reference_bandwidth(std::vector<double> xs) {
  const std::size_t n = xs.size();
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  std::sort(xs.begin(), xs.end());
  auto quant = [&](double q) {
    const double h = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return xs.back();
    return xs[lo] + (h - lo) * (xs[lo + 1] - xs[lo]);
  };
  const double iqr = quant(0.75) - quant(0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

}  // namespace

TEST_CASE("automatic bandwidth follows the documented rule") {
  // alternating +-1: sample stdev just above 1, IQR/1.34 comfortably above it
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = i % 2 == 0 ? 1.0 : -1.0;
  const auto h = kde::bandwidth_auto(sample_from(xs));
  CHECK(h.size() == 1);
  CHECK(h[0] == doctest::Approx(reference_bandwidth(xs)).epsilon(1e-13));
  // with unit stdev the rule gives 0.9 n^(-1/5) ~= 0.2261
  CHECK(h[0] == doctest::Approx(0.9 * std::pow(1000.0, -0.2)).epsilon(2e-3));
}

TEST_CASE("bandwidth scale equivariance") {
  const auto base = densities::draw_sample(densities::builtin("a"), 400, 11);
  auto scaled = base;
  for (double& x : scaled.data) x *= 3.5;
  const auto h1 = kde::bandwidth_auto(base);
  const auto h2 = kde::bandwidth_auto(scaled);
  CHECK(h2[0] == doctest::Approx(3.5 * h1[0]).epsilon(1e-12));
}

TEST_CASE("bandwidth range for standard gaussian samples") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const auto s = densities::draw_sample(densities::builtin("a"), 10000, seed);
    const auto h = kde::bandwidth_auto(s);
    CHECK(h[0] > 0.10);
    CHECK(h[0] < 0.20);
  }
}

TEST_CASE("degenerate samples are rejected") {
  CHECK_THROWS_AS(kde::bandwidth_auto(sample_from({1.0, 1.0, 1.0, 1.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(kde::bandwidth_auto(sample_from({1.0})), std::invalid_argument);
}

TEST_CASE("pointwise evaluation") {
  const auto model = kde::make_model(sample_from({0.0}), {1.0});
  const double x0 = 0.0;
  CHECK(kde::evaluate(model, std::span<const double>(&x0, 1)) ==
        doctest::Approx(kInvSqrt2Pi).epsilon(1e-14));
  const double x1 = 2.0;
  CHECK(kde::evaluate(model, std::span<const double>(&x1, 1)) >= 0.0);

  {
    auto unif = densities::DensitySpec{};
    unif.dimension = 1;
    unif.components = {{1.0, densities::Uniform1D{0.0, 1.0}}};
    const auto s = densities::draw_sample(unif, 100000, 3);
    const auto m = kde::make_model(s, kde::bandwidth_auto(s));
    const double mid = 0.5;
    CHECK(kde::evaluate(m, std::span<const double>(&mid, 1)) ==
          doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("grid evaluation agrees with pointwise evaluation") {
  const auto s = densities::draw_sample(densities::builtin("b"), 2000, 17);
  const auto model = kde::make_model(s, kde::bandwidth_auto(s));
  const auto box = densities::support_box(densities::builtin("b"));
  const auto grid = make_grid(box, 128);
  const auto values = kde::evaluate_on_grid(model, grid);
  for (std::size_t i = 0; i < grid.size(); i += 13) {
    const auto x = grid.point(i);
    const double direct = kde::evaluate(model, std::span<const double>(x.data(), 1));
    CHECK(values[i] == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("grid evaluation agrees with pointwise evaluation in 2-D") {
  const auto s = densities::draw_sample(densities::builtin("A"), 500, 21);
  const auto model = kde::make_model(s, kde::bandwidth_auto(s));
  const auto grid = make_grid(densities::support_box(densities::builtin("A")), 32);
  const auto values = kde::evaluate_on_grid(model, grid);
  for (std::size_t i = 0; i < grid.size(); i += 97) {
    const auto x = grid.point(i);
    const double direct = kde::evaluate(model, std::span<const double>(x.data(), 2));
    CHECK(values[i] == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("the estimate integrates to one over the box") {
  const auto s = densities::draw_sample(densities::builtin("a"), 5000, 23);
  const auto model = kde::make_model(s, kde::bandwidth_auto(s));
  const auto grid = make_grid(densities::support_box(densities::builtin("a")), 512);
  const auto values = kde::evaluate_on_grid(model, grid);
  double mass = 0.0;
  for (double v : values) mass += v;
  mass *= grid.cell_weight();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("smoothness inversion round-trips the tuning exponent") {
  CHECK(kde::smoothness_from_bandwidth(std::pow(1e4, -0.2), 10000, 1) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(kde::smoothness_from_bandwidth(std::pow(1e4, -0.25), 10000, 2) ==
        doctest::Approx(1.0).epsilon(1e-12));
  for (double s = 0.05; s <= 10.0; s += 0.4972) {
    const double h = std::pow(2e4, -1.0 / (1.0 + 2.0 * s));
    CHECK(kde::smoothness_from_bandwidth(h, 20000, 1) == doctest::Approx(s).epsilon(1e-12));
  }
  // clamping at the ends of the admissible range
  CHECK(kde::smoothness_from_bandwidth(0.999, 10000, 1) == 10.0);
  CHECK(kde::smoothness_from_bandwidth(1e-4, 10000, 1) == 0.05);
  CHECK_THROWS_AS(kde::smoothness_from_bandwidth(1.0, 10000, 1), std::domain_error);
  CHECK_THROWS_AS(kde::smoothness_from_bandwidth(-0.5, 10000, 1), std::domain_error);
}

TEST_CASE("tuned parameters match the displayed formulas") {
  const auto p1 = kde::tuned_parameters(2.0, 1000, 1);
  CHECK(p1.bandwidth == doctest::Approx(0.17066).epsilon(1e-4));
  CHECK(p1.order == 34);
  CHECK(p1.c0 == 1.0);

  const auto p2 = kde::tuned_parameters(1.0, 400, 2);
  const double nlogn = 400.0 * std::log(400.0);
  CHECK(p2.bandwidth == doctest::Approx(std::pow(nlogn, -0.25)).epsilon(1e-12));
  CHECK(p2.order == static_cast<int>(std::floor(std::pow(2.0 * nlogn, 0.25))));
  CHECK(p2.c0 == 2.0);

  CHECK(kde::tuned_parameters(0.01, 3, 1).order >= 1);

  // monotone in smoothness: higher s means higher order and wider bandwidth
  const auto lo = kde::tuned_parameters(0.5, 5000, 1);
  const auto hi = kde::tuned_parameters(3.0, 5000, 1);
  CHECK(hi.order > lo.order);
  CHECK(hi.bandwidth > lo.bandwidth);
}

TEST_CASE("bootstrap moments: degenerate sample has zero variance") {
  const auto moments = kde::bootstrap_moments(
      sample_from({0.7}), {0.5}, make_grid({1, {0.0, 0.0}, {1.0, 0.0}}, 64), 2, 9);
  for (double v : moments.variance) CHECK(v == 0.0);
  for (double m : moments.mean) CHECK(m >= 0.0);
}

TEST_CASE("bootstrap moments are deterministic and thread-invariant") {
  const auto s = densities::draw_sample(densities::builtin("a"), 300, 31);
  const auto grid = make_grid(densities::support_box(densities::builtin("a")), 128);
  const auto h = kde::bandwidth_auto(s);
  const auto m1 = kde::bootstrap_moments(s, h, grid, 20, 77, 1);
  const auto m2 = kde::bootstrap_moments(s, h, grid, 20, 77, 1);
  const auto m4 = kde::bootstrap_moments(s, h, grid, 20, 77, 4);
  CHECK(m1.mean == m2.mean);
  CHECK(m1.variance == m2.variance);
  CHECK(m1.mean == m4.mean);
  CHECK(m1.variance == m4.variance);
  const auto m3 = kde::bootstrap_moments(s, h, grid, 20, 78, 1);
  CHECK(m1.mean != m3.mean);
}

TEST_CASE("bootstrap variance tracks the analytic KDE variance") {
  const auto s = densities::draw_sample(densities::builtin("a"), 1000, 41);
  const auto h = kde::bandwidth_auto(s);
  const auto grid = make_grid(densities::support_box(densities::builtin("a")), 512);
  const auto moments = kde::bootstrap_moments(s, h, grid, 100, 55);
  // grid point closest to the origin
  std::size_t at = 0;
  double best = 1e9;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = std::abs(grid.point(i)[0]);
    if (d < best) {
      best = d;
      at = i;
    }
  }
  const double analytic = kInvSqrt2Pi * (0.5 / std::sqrt(3.14159265358979324)) /
                          (1000.0 * h[0]);
  CHECK(moments.variance[at] > 0.5 * analytic);
  CHECK(moments.variance[at] < 2.0 * analytic);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(moments.variance[i] >= 0.0);
    CHECK(moments.mean[i] >= 0.0);
  }
}

TEST_CASE("bootstrap input validation") {
  const auto s = densities::draw_sample(densities::builtin("a"), 50, 1);
  const auto grid = make_grid(densities::support_box(densities::builtin("a")), 64);
  CHECK_THROWS_AS(kde::bootstrap_moments(s, kde::bandwidth_auto(s), grid, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(kde::make_model(s, {0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(kde::make_model(s, {-0.1}), std::invalid_argument);
}
