#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "exmass/densities.hpp"
#include "exmass/excess.hpp"
#include "exmass/fourier.hpp"
#include "exmass/io.hpp"
#include "exmass/rng.hpp"

using namespace exmass;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> pdf_on_grid(const densities::DensitySpec& spec,
                                const QuadratureGrid& grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.point(i);
    values[i] = densities::pdf(
        spec, std::span<const double>(x.data(), static_cast<std::size_t>(grid.dimension())));
  }
  return values;
}

}  // namespace

TEST_CASE("grid weights sum to the box measure") {
  for (const auto& id : {"a", "B"}) {
    const auto box = densities::support_box(densities::builtin(id));
    const auto grid = make_grid(box);
    CHECK(grid.cell_weight() * static_cast<double>(grid.size()) ==
          doctest::Approx(box.measure()).epsilon(1e-12));
  }
}

TEST_CASE("levels at or above the scale give exactly zero") {
  const auto spec = densities::builtin("a");
  const auto grid = make_grid(densities::support_box(spec), 256);
  const auto dens = pdf_on_grid(spec, grid);
  const auto transform = excess::functional_transform(dens, {}, grid, 50, 1.0);
  CHECK(excess::evaluate(transform, 1.0) == 0.0);
  CHECK(excess::evaluate(transform, 2.5) == 0.0);
}

TEST_CASE("oracle pass-through: the cosine route reproduces the quadrature route") {
  // densities (a) and (A): feed the true pdf with zero variance to each
  // estimator core and compare against the oracle at every level
  for (const auto& id : {std::string("a"), std::string("A")}) {
    const auto spec = densities::builtin(id);
    const auto grid = make_grid(densities::support_box(spec));
    const auto dens = pdf_on_grid(spec, grid);
    const int order = spec.dimension == 1 ? 500 : 300;
    const auto levels = excess::level_grid(51, 0.0, 1.0);
    const auto oracle = excess::oracle_curve(spec, levels);
    const double slack =
        fourier::tail_bound(order) * grid.box.measure() + 1e-3;

    // mean form (no variance)
    const auto mean_form = excess::functional_transform(dens, {}, grid, order, 1.0);
    // corrected form with zero variance exercises the exponential factor path
    const std::vector<double> zero_var(grid.size(), 0.0);
    const auto corr_form = excess::functional_transform(dens, zero_var, grid, order, 1.0);

    for (std::size_t i = 0; i < levels.size(); ++i) {
      CHECK(std::abs(excess::evaluate(mean_form, levels[i]) - oracle.values[i]) <= slack);
      CHECK(std::abs(excess::evaluate(corr_form, levels[i]) - oracle.values[i]) <= slack);
      CHECK(std::abs(excess::plugin_from_values(dens, grid, levels[i]) -
                     oracle.values[i]) <= slack);
    }
  }
}

TEST_CASE("gaussian debiasing identity (Monte Carlo)") {
  rng::Xoshiro256pp stream(314159);
  for (int k : {1, 3, 7}) {
    for (double lambda : {2.0 / (kPi * k), 0.8 / (kPi * k)}) {
      for (double mu : {0.0, 0.4}) {
        const std::size_t draws = 200000;
        const double factor = std::exp(0.5 * kPi * kPi * k * k * lambda * lambda);
        double acc = 0.0, acc2 = 0.0;
        for (std::size_t i = 0; i < draws; ++i) {
          const double z = mu + lambda * stream.normal();
          const double v = factor * std::cos(kPi * k * z);
          acc += v;
          acc2 += v * v;
        }
        const double mean = acc / draws;
        const double var = acc2 / draws - mean * mean;
        const double se = std::sqrt(var / draws);
        CHECK(std::abs(mean - std::cos(kPi * k * mu)) <= 4.0 * se);
      }
    }
  }
}

TEST_CASE("single-cell wavelet estimate recovers the partial sum value") {
  densities::Sample s;
  s.dimension = 1;
  s.data.assign(200, 0.5);  // unit box, level 0: fhat = 1 everywhere, variance 0
  densities::SupportBox box;
  box.dimension = 1;
  box.low[0] = 0.0;
  box.high[0] = 1.0;
  const auto est = wavelet::fit(s, 0, box);
  const auto grid = make_grid(box, 256);
  const int order = 300;
  const double value = excess::estimate_wavelet(est, 0.5, order, grid);
  // fhat == 1 makes the scale 1.05; tolerate the rescaled tail bound
  const double slack = 2.0 * fourier::tail_bound(order, 1.05) + 1e-6;
  CHECK(std::abs(value - 0.5) <= slack);
  CHECK(excess::estimate_wavelet(est, 1.06, order, grid) == 0.0);
}

TEST_CASE("wavelet estimator approaches the oracle on gaussian data") {
  const auto spec = densities::builtin("a");
  const auto box = densities::support_box(spec);
  const auto s = densities::draw_sample(spec, 10000, 4242);
  const auto params = wavelet::theoretical_parameters(10000, 1, 2.0);
  const auto est = wavelet::fit(s, params.level, box);
  const auto grid = make_grid(box, 512);
  const double value = excess::estimate_wavelet(est, 0.2, params.order, grid);
  CHECK(std::abs(value - 0.29001) < 0.05);
}

TEST_CASE("corrected estimator with zero variance equals the mean form") {
  const auto spec = densities::builtin("a");
  const auto s = densities::draw_sample(spec, 400, 10);
  const auto grid = make_grid(densities::support_box(spec), 256);
  const auto h = kde::bandwidth_auto(s);
  const auto model = kde::make_model(s, h);
  const auto dens = kde::evaluate_on_grid(model, grid);

  kde::BootstrapMoments moments;
  moments.grid = grid;
  moments.replications = 2;
  moments.mean = dens;                       // mean replaced by fhat
  moments.variance.assign(grid.size(), 0.0); // zero variance degeneracy
  const double corrected = excess::estimate_kernel_corrected(model, moments, 0.15, 40, grid);
  const double mean_form = excess::estimate_kernel_mean(moments, 0.15, 40, grid);
  CHECK(corrected == mean_form);
}

TEST_CASE("plug-in estimator basics") {
  const auto spec = densities::builtin("a");
  const auto s = densities::draw_sample(spec, 2000, 77);
  const auto grid = make_grid(densities::support_box(spec));
  const auto model = kde::make_model(s, kde::bandwidth_auto(s));
  CHECK(excess::estimate_plugin(model, 0.0, grid) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(excess::estimate_plugin(model, 0.8, grid) == 0.0);  // above sup fhat

  // true pdf in place of the estimate reproduces the oracle
  const auto dens = pdf_on_grid(spec, grid);
  CHECK(excess::plugin_from_values(dens, grid, 0.2) ==
        doctest::Approx(0.29001).epsilon(1e-3));
}

TEST_CASE("plug-in curves are nonincreasing and convex in the level") {
  const auto spec = densities::builtin("d");
  const auto s = densities::draw_sample(spec, 1500, 3);
  const auto grid = make_grid(densities::support_box(spec));
  const auto dens = kde::evaluate_on_grid(kde::make_model(s, kde::bandwidth_auto(s)), grid);
  const auto levels = excess::level_grid(100, 0.0, 1.0);
  const auto curve = excess::plugin_curve(dens, grid, levels, make_curve_info("plugin"));
  for (std::size_t i = 0; i + 1 < curve.values.size(); ++i)
    CHECK(curve.values[i] >= curve.values[i + 1]);
  for (std::size_t i = 0; i + 2 < curve.values.size(); ++i)
    CHECK(curve.values[i + 2] - 2.0 * curve.values[i + 1] + curve.values[i] >= -1e-12);
}

TEST_CASE("functional curve: zero at the scale and shared-grid bit identity") {
  const auto spec = densities::builtin("a");
  const auto grid = make_grid(densities::support_box(spec), 256);
  const auto dens = pdf_on_grid(spec, grid);
  const auto transform = excess::functional_transform(dens, {}, grid, 64, 1.0);
  const auto levels = excess::level_grid(100, 0.0, 1.0);
  const auto curve = excess::functional_curve(transform, levels, make_curve_info("functional"));
  CHECK(curve.values.back() == 0.0);  // nu = 1 with scale 1
  // per-level recomputation is bit-identical to the shared-transform curve
  for (std::size_t i = 0; i < levels.size(); ++i)
    CHECK(curve.values[i] == excess::evaluate(transform, levels[i]));
}

TEST_CASE("doubling the scale moves estimates less than the rescaled tail bound") {
  const auto spec = densities::builtin("a");
  const auto grid = make_grid(densities::support_box(spec), 512);
  const auto dens = pdf_on_grid(spec, grid);
  const int order = 200;
  const auto t1 = excess::functional_transform(dens, {}, grid, order, 1.0);
  const auto t2 = excess::functional_transform(dens, {}, grid, order, 2.0);
  for (double nu : {0.05, 0.2, 0.35}) {
    const double bound = 2.0 * fourier::tail_bound(order, 2.0) * grid.box.measure();
    CHECK(std::abs(excess::evaluate(t1, nu) - excess::evaluate(t2, nu)) <= bound);
  }
}

TEST_CASE("overflow guard reduces the order") {
  const auto spec = densities::builtin("a");
  const auto grid = make_grid(densities::support_box(spec), 64);
  const auto dens = pdf_on_grid(spec, grid);
  std::vector<double> huge_var(grid.size(), 0.3);
  const auto transform = excess::functional_transform(dens, huge_var, grid, 500, 1.0);
  CHECK(transform.requested_order == 500);
  CHECK(transform.order < 500);
  // pi^2 order^2 * 0.3 / 2 <= 50  =>  order <= sqrt(100 / (pi^2 * 0.3))
  CHECK(transform.order ==
        static_cast<int>(std::floor(std::sqrt(100.0 / (kPi * kPi * 0.3)))));
  std::vector<double> absurd_var(grid.size(), 100.0);
  CHECK_THROWS(excess::functional_transform(dens, absurd_var, grid, 5, 1.0));
}

TEST_CASE("oracle curve endpoints and degenerate grids") {
  const auto spec = densities::builtin("a");
  const std::vector<double> ends{0.0, 1.0};
  const auto curve = excess::oracle_curve(spec, ends);
  CHECK(curve.values[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(curve.values[1] == 0.0);

  const std::vector<double> degenerate{0.2, 0.2};
  const auto flat = excess::oracle_curve(spec, degenerate);
  CHECK(flat.values[0] == flat.values[1]);

  const std::vector<double> unsorted{0.5, 0.2};
  CHECK_THROWS_AS(excess::oracle_curve(spec, unsorted), std::invalid_argument);
}

TEST_CASE("oracle curve is nonincreasing and convex for density (c)") {
  const auto spec = densities::builtin("c");
  const auto levels = excess::level_grid(100, 0.0, 1.0);
  const auto curve = excess::oracle_curve(spec, levels);
  CHECK(curve.values.front() == doctest::Approx(1.0).epsilon(1e-3));
  for (std::size_t i = 0; i + 1 < curve.values.size(); ++i)
    CHECK(curve.values[i] >= curve.values[i + 1]);
  for (std::size_t i = 0; i + 2 < curve.values.size(); ++i)
    CHECK(curve.values[i + 2] - 2.0 * curve.values[i + 1] + curve.values[i] >= -1e-12);
}

TEST_CASE("level grids and curve serialization") {
  const auto levels = excess::level_grid(5, 0.0, 1.0);
  CHECK(levels == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK_THROWS(excess::level_grid(1, 0.0, 1.0));
  CHECK_THROWS(excess::level_grid(5, 1.0, 0.0));

  ExcessMassCurve c1, c2;
  c1.levels = {0.0, 0.5};
  c1.values = {1.0, 0.25};
  c1.info = make_curve_info("plugin");
  c2 = c1;
  c2.info.method = "functional";
  c2.values = {0.99, 0.26};
  const std::vector<ExcessMassCurve> curves{c1, c2};
  const auto csv = excess::curves_to_csv(curves);
  CHECK(csv == "0,1,0.99\n0.5,0.25,0.26\n");
  const auto rows = io::read_numeric_csv(csv);
  CHECK(rows.size() == 2);
  CHECK(rows[1][2] == 0.26);
  const auto json = excess::curves_to_json(curves);
  CHECK(json.find("\"functional\"") != std::string::npos);
}
