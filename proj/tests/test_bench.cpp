#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "exmass/bench.hpp"
#include "exmass/excess.hpp"

using namespace exmass;
using bench::ExperimentConfig;

namespace {

ExcessMassCurve flat_curve(std::vector<double> levels, double value) {
  ExcessMassCurve c;
  c.levels = std::move(levels);
  c.values.assign(c.levels.size(), value);
  return c;
}

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.density = "a";
  config.n = 120;
  config.replications = 3;
  config.nu_grid = {20, 0.0, 1.0};
  config.seed = 42;
  config.bootstrap = 16;
  config.grid_points = 128;
  config.oracle_grid_points = 512;
  return config;
}

}  // namespace

TEST_CASE("error metrics: identical curves and constant offsets") {
  const auto levels = excess::level_grid(100, 0.0, 1.0);
  const auto base = flat_curve(levels, 0.3);
  const auto same = bench::error_metrics(base, base);
  CHECK(same.e2 == 0.0);
  CHECK(same.einf == 0.0);

  const double delta = 0.07;
  const auto shifted = flat_curve(levels, 0.3 + delta);
  const auto err = bench::error_metrics(shifted, base);
  CHECK(err.e2 == doctest::Approx(delta * delta).epsilon(1e-12));
  CHECK(err.einf == doctest::Approx(delta).epsilon(1e-15));
}

TEST_CASE("error metrics: offset on half the grid") {
  const auto levels = excess::level_grid(100, 0.0, 1.0);
  const auto base = flat_curve(levels, 0.0);
  auto half = base;
  for (std::size_t i = 0; i < 50; ++i) half.values[i] = 0.1;
  const auto err = bench::error_metrics(half, base);
  const double cell = 0.1 * 0.1 / 99.0;
  CHECK(err.e2 >= 0.1 * 0.1 / 2.0 - cell);
  CHECK(err.e2 <= 0.1 * 0.1 / 2.0 + cell);
  CHECK(err.einf == doctest::Approx(0.1));
}

TEST_CASE("error metrics reject mismatched grids") {
  const auto a = flat_curve(excess::level_grid(10, 0.0, 1.0), 0.0);
  const auto b = flat_curve(excess::level_grid(11, 0.0, 1.0), 0.0);
  CHECK_THROWS_AS(bench::error_metrics(a, b), std::invalid_argument);
}

TEST_CASE("config validation enumerates problems") {
  ExperimentConfig config;
  config.density = "";
  config.n = 1;
  config.replications = 0;
  config.methods = {"functional", "nonsense"};
  config.bootstrap = 1;
  try {
    config.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("density") != std::string::npos);
    CHECK(msg.find("n must") != std::string::npos);
    CHECK(msg.find("replications") != std::string::npos);
    CHECK(msg.find("nonsense") != std::string::npos);
    CHECK(msg.find("bootstrap") != std::string::npos);
  }
}

TEST_CASE("aggregation: means, ratios and the strict tie rule") {
  bench::BenchmarkReport report;
  report.config = small_config();
  report.config.replications = 4;
  for (int i = 0; i < 4; ++i) {
    bench::ReplicationRecord rec;
    rec.index = i;
    rec.errors["functional"] = {0.1 * (i + 1), 0.2};
    rec.errors["plugin"] = {0.2 * (i + 1), 0.2};
    report.replications.push_back(rec);
  }
  bench::aggregate(report);
  CHECK(report.mean_errors["functional"].e2 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(report.mean_errors["plugin"].e2 == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(report.e2_ratio.has_value());
  CHECK(*report.e2_ratio ==
        doctest::Approx(report.mean_errors["plugin"].e2 /
                        report.mean_errors["functional"].e2).epsilon(1e-12));
  CHECK(*report.p2 == 1.0);
  // identical sup errors every replication: ties count as losses
  CHECK(*report.pinf == 0.0);

  // means equal the arithmetic mean of the raw records exactly
  double acc = 0.0;
  for (const auto& rec : report.replications) acc += rec.errors.at("functional").e2;
  CHECK(report.mean_errors["functional"].e2 == acc / 4.0);
}

TEST_CASE("replications are deterministic") {
  const auto config = small_config();
  const auto spec = densities::builtin(config.density);
  const auto grid = make_grid(densities::support_box(spec), config.grid_points);
  const auto levels = excess::level_grid(config.nu_grid.count, 0.0, 1.0);
  const auto oracle = excess::oracle_curve(spec, levels, config.oracle_grid_points);
  const auto r1 = bench::run_replication(spec, config, 1, grid, oracle);
  const auto r2 = bench::run_replication(spec, config, 1, grid, oracle);
  CHECK(r1.errors.at("functional").e2 == r2.errors.at("functional").e2);
  CHECK(r1.errors.at("plugin").einf == r2.errors.at("plugin").einf);
  const auto r3 = bench::run_replication(spec, config, 2, grid, oracle);
  CHECK(r1.errors.at("functional").e2 != r3.errors.at("functional").e2);
}

TEST_CASE("experiments are reproducible and thread-invariant") {
  const auto config = small_config();
  const auto a = bench::run_experiment(config, 1);
  const auto b = bench::run_experiment(config, 1);
  const auto c = bench::run_experiment(config, 3);
  CHECK(bench::format_report(a, bench::ReportFormat::Json) ==
        bench::format_report(b, bench::ReportFormat::Json));
  CHECK(bench::format_report(a, bench::ReportFormat::Json) ==
        bench::format_report(c, bench::ReportFormat::Json));
  CHECK(a.replications.size() == 3);
  // every replication carries one record per method
  for (const auto& rec : a.replications) CHECK(rec.errors.size() == 2);
  // p values live on the 1/K lattice
  const double scaled = *a.p2 * 3.0;
  CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
}

TEST_CASE("plug-in-only experiments have no comparison fields") {
  auto config = small_config();
  config.methods = {"plugin"};
  const auto report = bench::run_experiment(config);
  CHECK_FALSE(report.e2_ratio.has_value());
  CHECK_FALSE(report.p2.has_value());
  CHECK(report.mean_errors.count("plugin") == 1);
  CHECK(report.mean_errors.count("functional") == 0);
}

TEST_CASE("single-replication error magnitude is sane for density (a)") {
  auto config = small_config();
  config.n = 100;
  config.replications = 1;
  config.nu_grid = {100, 0.0, 1.0};
  config.methods = {"plugin"};
  const auto report = bench::run_experiment(config);
  const double e2 = report.mean_errors.at("plugin").e2;
  // an order of magnitude around 5e-3
  CHECK(e2 > 5e-4);
  CHECK(e2 < 5e-2);
}

TEST_CASE("report formats") {
  auto config = small_config();
  config.methods = {"functional", "plugin", "corrected"};
  const auto report = bench::run_experiment(config);

  const auto table = bench::format_report(report, bench::ReportFormat::Table);
  // header mirrors the benchmark columns: f n E2_PI E2_* ratio p2 Einf_PI Einf_* ratio pinf
  const auto header_end = table.find('\n');
  std::istringstream head(table.substr(0, header_end));
  int columns = 0;
  std::string word;
  while (head >> word) ++columns;
  CHECK(columns == 10);

  const auto csv = bench::format_report(report, bench::ReportFormat::Csv);
  CHECK(csv.find("density,n,replications") == 0);

  const auto json_text = bench::format_report(report, bench::ReportFormat::Json);
  const auto parsed = bench::report_from_json(json_text);
  CHECK(bench::format_report(parsed, bench::ReportFormat::Json) == json_text);

  // header-only table when no methods ran
  bench::BenchmarkReport empty;
  empty.config = config;
  empty.config.methods.clear();
  const auto empty_table = bench::format_report(empty, bench::ReportFormat::Table);
  CHECK(empty_table == std::string(empty_table.substr(0, empty_table.find('\n') + 1)));
}

TEST_CASE("config JSON round trip") {
  auto config = small_config();
  config.bandwidth = 0.25;
  config.order = 12;
  const auto text = bench::config_to_json(config);
  const auto back = bench::config_from_json(text);
  CHECK(bench::config_to_json(back) == text);
  CHECK(back.n == config.n);
  CHECK(back.bandwidth == config.bandwidth);
  CHECK_THROWS(bench::config_from_json("{"));
}
