#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exmass/curve.hpp"
#include "exmass/densities.hpp"
#include "exmass/grid.hpp"

namespace exmass::bench {

//! Estimator identifiers accepted in ExperimentConfig::methods.
const std::vector<std::string>& known_methods();  // functional, corrected, plugin

struct NuGridSpec {
  std::size_t count = 100;
  double lo = 0.0;
  double hi = 1.0;
};

struct ExperimentConfig {
  std::string density = "a";    // built-in id or path to a density JSON file
  std::size_t n = 1000;
  int replications = 20;        // K
  NuGridSpec nu_grid;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"functional", "plugin"};
  std::size_t grid_points = 0;         // estimator grid, 0 = 512 / 128^2
  std::size_t oracle_grid_points = 0;  // oracle grid, 0 = 4096 / 512^2
  int bootstrap = 100;                 // B
  std::optional<double> bandwidth;     // explicit h (all dimensions); default auto
  std::optional<int> order;            // explicit Fourier order; default auto

  void validate() const;  // throws std::invalid_argument listing bad fields
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

struct ErrorPair {
  double e2 = 0.0;    // integrated squared error over the level grid
  double einf = 0.0;  // sup-norm error
};

//! Trapezoidal integral of the squared difference over the level grid and
//! the max absolute difference. Grids must match exactly.
ErrorPair error_metrics(const ExcessMassCurve& estimate,
                        const ExcessMassCurve& oracle);

struct ReplicationRecord {
  int index = 0;
  std::map<std::string, ErrorPair> errors;  // method -> (E2, Einf)
};

struct BenchmarkReport {
  ExperimentConfig config;
  std::map<std::string, ErrorPair> mean_errors;
  //! plug-in / functional comparisons, present when both methods ran
  std::optional<double> e2_ratio;    // mean E2_plugin / mean E2_functional
  std::optional<double> einf_ratio;
  std::optional<double> p2;          // fraction of replications with E2_f < E2_pi
  std::optional<double> pinf;
  std::vector<ReplicationRecord> replications;
};

//! One Monte Carlo draw: sample -> fit -> curves -> metrics. Deterministic
//! given (config.seed, index); the oracle curve is computed once per
//! experiment and passed in.
ReplicationRecord run_replication(const densities::DensitySpec& spec,
                                  const ExperimentConfig& config, int index,
                                  const QuadratureGrid& grid,
                                  const ExcessMassCurve& oracle);

//! Recomputes means, plug-in/functional ratios and win frequencies from the
//! replication records, folding in index order. Ties count against the
//! functional method (strict inequality).
void aggregate(BenchmarkReport& report);

//! K replications (optionally in parallel; derived per-replication seeds make
//! the report independent of scheduling), aggregated in index order.
BenchmarkReport run_experiment(const ExperimentConfig& config, int threads = 1);

enum class ReportFormat { Table, Csv, Json };

std::string format_report(const BenchmarkReport& report, ReportFormat format);
//! Several experiments as one table/CSV (rows share the header), or a JSON array.
std::string format_reports(const std::vector<BenchmarkReport>& reports,
                           ReportFormat format);

BenchmarkReport report_from_json(const std::string& text);

}  // namespace exmass::bench
