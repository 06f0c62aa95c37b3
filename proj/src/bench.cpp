#include "exmass/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "exmass/detail/math.hpp"
#include "exmass/detail/parallel.hpp"
#include "exmass/excess.hpp"
#include "exmass/io.hpp"
#include "exmass/kde.hpp"
#include "exmass/rng.hpp"
#include "json.hpp"

namespace exmass::bench {

using nlohmann::json;

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods{"functional", "corrected", "plugin"};
  return methods;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  if (density.empty()) problems.push_back("density is empty");
  if (n < 2) problems.push_back("n must be at least 2");
  if (replications < 1) problems.push_back("replications must be at least 1");
  if (nu_grid.count < 2) problems.push_back("nu grid needs at least 2 points");
  if (!(nu_grid.hi > nu_grid.lo)) problems.push_back("nu grid hi must exceed lo");
  if (nu_grid.lo < 0.0) problems.push_back("nu grid lo must be nonnegative");
  if (bootstrap < 2) problems.push_back("bootstrap must be at least 2");
  if (bandwidth && !(*bandwidth > 0.0)) problems.push_back("bandwidth must be positive");
  if (order && *order < 1) problems.push_back("order must be at least 1");
  const auto& known = known_methods();
  for (const auto& m : methods)
    if (std::find(known.begin(), known.end(), m) == known.end())
      problems.push_back("unknown method '" + m + "'");
  if (!problems.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw std::invalid_argument(msg);
  }
}

ErrorPair error_metrics(const ExcessMassCurve& estimate, const ExcessMassCurve& oracle) {
  if (estimate.levels != oracle.levels)
    throw std::invalid_argument("error_metrics: level grids differ");
  const std::size_t count = estimate.levels.size();
  if (count < 2) throw std::invalid_argument("error_metrics: need at least 2 levels");
  const double step =
      (estimate.levels.back() - estimate.levels.front()) / static_cast<double>(count - 1);
  ErrorPair err;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double diff = estimate.values[i] - oracle.values[i];
    const double weight = (i == 0 || i + 1 == count) ? 0.5 : 1.0;  // trapezoid
    sum += weight * diff * diff;
    err.einf = std::max(err.einf, std::abs(diff));
  }
  err.e2 = sum * step;
  return err;
}

namespace {

densities::DensitySpec resolve_density(const std::string& id_or_path) {
  const auto ids = densities::builtin_ids();
  if (std::find(ids.begin(), ids.end(), id_or_path) != ids.end())
    return densities::builtin(id_or_path);
  if (std::filesystem::exists(id_or_path))
    return densities::from_json(io::read_file(id_or_path));
  throw std::invalid_argument("density '" + id_or_path +
                              "' is neither a built-in id nor a readable file");
}

}  // namespace

ReplicationRecord run_replication(const densities::DensitySpec& spec,
                                  const ExperimentConfig& config, int index,
                                  const QuadratureGrid& grid,
                                  const ExcessMassCurve& oracle) {
  const std::uint64_t rep_seed = rng::derive_seed(config.seed, static_cast<std::uint64_t>(index));
  const auto sample =
      densities::draw_sample(spec, config.n, rng::derive_seed(rep_seed, 0));
  const auto levels = excess::level_grid(config.nu_grid.count, config.nu_grid.lo, config.nu_grid.hi);
  const int d = spec.dimension;

  std::vector<double> auto_bw;
  auto base_bandwidth = [&]() -> const std::vector<double>& {
    if (config.bandwidth)
      auto_bw.assign(static_cast<std::size_t>(d), *config.bandwidth);
    else if (auto_bw.empty())
      auto_bw = kde::bandwidth_auto(sample);
    return auto_bw;
  };

  const bool wants_functional =
      std::find(config.methods.begin(), config.methods.end(), "functional") != config.methods.end();
  const bool wants_corrected =
      std::find(config.methods.begin(), config.methods.end(), "corrected") != config.methods.end();
  const bool wants_plugin =
      std::find(config.methods.begin(), config.methods.end(), "plugin") != config.methods.end();

  ReplicationRecord record;
  record.index = index;

  if (wants_plugin) {
    const auto model = kde::make_model(sample, base_bandwidth());
    const auto dens = kde::evaluate_on_grid(model, grid);
    auto curve = excess::plugin_curve(dens, grid, levels,
                                      make_curve_info("plugin", model.bandwidth));
    record.errors["plugin"] = error_metrics(curve, oracle);
  }

  if (wants_functional || wants_corrected) {
    // smoothness backed out of the automatic bandwidth, then the log-tuned
    // bandwidth and order; per-dimension anisotropy of the automatic rule is
    // preserved around the tuned geometric mean
    const auto& base = base_bandwidth();
    const double gmean = detail::geometric_mean(base);
    const double s_hat = kde::smoothness_from_bandwidth(gmean, config.n, d);
    const auto tuned = kde::tuned_parameters(s_hat, config.n, d);
    std::vector<double> tuned_bw(base.size());
    for (std::size_t p = 0; p < base.size(); ++p)
      tuned_bw[p] = tuned.bandwidth * base[p] / gmean;
    const int order = config.order ? *config.order : tuned.order;

    const auto moments = kde::bootstrap_moments(sample, tuned_bw, grid, config.bootstrap,
                                                rng::derive_seed(rep_seed, 1));
    if (wants_functional) {
      const auto transform = excess::functional_transform(
          moments.mean, {}, grid, order, excess::auto_scale(moments.mean));
      auto curve = excess::functional_curve(
          transform, levels, make_curve_info("functional", tuned_bw));
      record.errors["functional"] = error_metrics(curve, oracle);
    }
    if (wants_corrected) {
      const auto model = kde::make_model(sample, tuned_bw);
      const auto dens = kde::evaluate_on_grid(model, grid);
      const auto transform = excess::functional_transform(
          dens, moments.variance, grid, order, excess::auto_scale(dens));
      auto curve = excess::functional_curve(
          transform, levels, make_curve_info("corrected", tuned_bw));
      record.errors["corrected"] = error_metrics(curve, oracle);
    }
  }
  return record;
}

void aggregate(BenchmarkReport& report) {
  report.mean_errors.clear();
  report.e2_ratio.reset();
  report.einf_ratio.reset();
  report.p2.reset();
  report.pinf.reset();
  if (report.replications.empty()) return;

  const double k = static_cast<double>(report.replications.size());
  for (const auto& method : report.config.methods) {
    ErrorPair total;
    for (const auto& rec : report.replications) {
      total.e2 += rec.errors.at(method).e2;
      total.einf += rec.errors.at(method).einf;
    }
    report.mean_errors[method] = ErrorPair{total.e2 / k, total.einf / k};
  }

  if (report.mean_errors.count("functional") != 0 &&
      report.mean_errors.count("plugin") != 0) {
    report.e2_ratio = report.mean_errors["plugin"].e2 / report.mean_errors["functional"].e2;
    report.einf_ratio =
        report.mean_errors["plugin"].einf / report.mean_errors["functional"].einf;
    int wins2 = 0, winsinf = 0;
    for (const auto& rec : report.replications) {
      if (rec.errors.at("functional").e2 < rec.errors.at("plugin").e2) ++wins2;
      if (rec.errors.at("functional").einf < rec.errors.at("plugin").einf) ++winsinf;
    }
    report.p2 = wins2 / k;
    report.pinf = winsinf / k;
  }
}

BenchmarkReport run_experiment(const ExperimentConfig& config, int threads) {
  config.validate();
  const auto spec = resolve_density(config.density);
  const auto box = densities::support_box(spec);
  const auto grid = make_grid(box, config.grid_points);
  const auto levels =
      excess::level_grid(config.nu_grid.count, config.nu_grid.lo, config.nu_grid.hi);
  const auto oracle = excess::oracle_curve(spec, levels, config.oracle_grid_points);

  BenchmarkReport report;
  report.config = config;
  report.replications.resize(static_cast<std::size_t>(config.replications));
  detail::parallel_for(
      static_cast<std::size_t>(config.replications), detail::resolve_threads(threads),
      [&](std::size_t i) {
        report.replications[i] =
            run_replication(spec, config, static_cast<int>(i), grid, oracle);
      });
  aggregate(report);
  return report;
}

namespace {

json config_to_json_obj(const ExperimentConfig& config) {
  json j;
  j["density"] = config.density;
  j["n"] = config.n;
  j["replications"] = config.replications;
  j["nu_grid"] = {{"count", config.nu_grid.count},
                  {"lo", config.nu_grid.lo},
                  {"hi", config.nu_grid.hi}};
  j["seed"] = config.seed;
  j["methods"] = config.methods;
  j["grid_points"] = config.grid_points;
  j["oracle_grid_points"] = config.oracle_grid_points;
  j["bootstrap"] = config.bootstrap;
  if (config.bandwidth) j["bandwidth"] = *config.bandwidth;
  if (config.order) j["order"] = *config.order;
  return j;
}

ExperimentConfig config_from_json_obj(const json& j) {
  ExperimentConfig config;
  try {
    config.density = j.at("density").get<std::string>();
    config.n = j.at("n").get<std::size_t>();
    if (j.contains("replications")) config.replications = j.at("replications").get<int>();
    if (j.contains("nu_grid")) {
      config.nu_grid.count = j.at("nu_grid").at("count").get<std::size_t>();
      config.nu_grid.lo = j.at("nu_grid").at("lo").get<double>();
      config.nu_grid.hi = j.at("nu_grid").at("hi").get<double>();
    }
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("methods"))
      config.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("grid_points")) config.grid_points = j.at("grid_points").get<std::size_t>();
    if (j.contains("oracle_grid_points"))
      config.oracle_grid_points = j.at("oracle_grid_points").get<std::size_t>();
    if (j.contains("bootstrap")) config.bootstrap = j.at("bootstrap").get<int>();
    if (j.contains("bandwidth")) config.bandwidth = j.at("bandwidth").get<double>();
    if (j.contains("order")) config.order = j.at("order").get<int>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config JSON error: ") + e.what());
  }
  return config;
}

json error_pair_to_json(const ErrorPair& err) {
  return json{{"e2", err.e2}, {"einf", err.einf}};
}

ErrorPair error_pair_from_json(const json& j) {
  return ErrorPair{j.at("e2").get<double>(), j.at("einf").get<double>()};
}

json report_to_json_obj(const BenchmarkReport& report) {
  json j;
  j["config"] = config_to_json_obj(report.config);
  j["mean_errors"] = json::object();
  for (const auto& [method, err] : report.mean_errors)
    j["mean_errors"][method] = error_pair_to_json(err);
  if (report.e2_ratio) j["e2_ratio"] = *report.e2_ratio;
  if (report.einf_ratio) j["einf_ratio"] = *report.einf_ratio;
  if (report.p2) j["p2"] = *report.p2;
  if (report.pinf) j["pinf"] = *report.pinf;
  j["replications"] = json::array();
  for (const auto& rec : report.replications) {
    json r;
    r["index"] = rec.index;
    for (const auto& [method, err] : rec.errors) r["errors"][method] = error_pair_to_json(err);
    j["replications"].push_back(r);
  }
  return j;
}

BenchmarkReport report_from_json_obj(const json& j) {
  BenchmarkReport report;
  report.config = config_from_json_obj(j.at("config"));
  for (const auto& [method, err] : j.at("mean_errors").items())
    report.mean_errors[method] = error_pair_from_json(err);
  if (j.contains("e2_ratio")) report.e2_ratio = j.at("e2_ratio").get<double>();
  if (j.contains("einf_ratio")) report.einf_ratio = j.at("einf_ratio").get<double>();
  if (j.contains("p2")) report.p2 = j.at("p2").get<double>();
  if (j.contains("pinf")) report.pinf = j.at("pinf").get<double>();
  for (const auto& r : j.at("replications")) {
    ReplicationRecord rec;
    rec.index = r.at("index").get<int>();
    if (r.contains("errors"))
      for (const auto& [method, err] : r.at("errors").items())
        rec.errors[method] = error_pair_from_json(err);
    report.replications.push_back(std::move(rec));
  }
  return report;
}

std::string table_cell(double value, int width, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%*.*f", width, precision, value);
  return buf;
}

void append_table_row(std::ostringstream& out, const BenchmarkReport& report) {
  const auto mean = [&](const std::string& method) -> const ErrorPair* {
    const auto it = report.mean_errors.find(method);
    return it == report.mean_errors.end() ? nullptr : &it->second;
  };
  const ErrorPair* pi = mean("plugin");
  const ErrorPair* fn = mean("functional");
  out << std::left;
  std::string density = report.config.density;
  if (density.size() > 8) density = density.substr(0, 8);
  char head[64];
  std::snprintf(head, sizeof(head), "%-8s %7zu", density.c_str(), report.config.n);
  out << head;
  auto cell = [&](const double* v, int width, int precision) {
    if (v == nullptr) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%*s", width, "-");
      out << buf;
    } else {
      out << table_cell(*v, width, precision);
    }
  };
  const double pi_e2 = pi ? pi->e2 : 0, fn_e2 = fn ? fn->e2 : 0;
  const double pi_einf = pi ? pi->einf : 0, fn_einf = fn ? fn->einf : 0;
  cell(pi ? &pi_e2 : nullptr, 10, 5);
  cell(fn ? &fn_e2 : nullptr, 10, 5);
  cell(report.e2_ratio ? &*report.e2_ratio : nullptr, 8, 2);
  cell(report.p2 ? &*report.p2 : nullptr, 7, 2);
  cell(pi ? &pi_einf : nullptr, 10, 5);
  cell(fn ? &fn_einf : nullptr, 10, 5);
  cell(report.einf_ratio ? &*report.einf_ratio : nullptr, 8, 2);
  cell(report.pinf ? &*report.pinf : nullptr, 7, 2);
  if (report.mean_errors.count("corrected")) {
    const auto& c = report.mean_errors.at("corrected");
    out << "   [corrected: E2=" << table_cell(c.e2, 0, 5)
        << " Einf=" << table_cell(c.einf, 0, 5) << "]";
  }
  out << '\n';
}

const char* kTableHeader =
    "f              n     E2_PI      E2_*   ratio     p2    Einf_PI    Einf_*   ratio   pinf\n";

std::string reports_to_csv(const std::vector<BenchmarkReport>& reports) {
  std::ostringstream out;
  out << "density,n,replications,e2_plugin,e2_functional,e2_ratio,p2,"
         "einf_plugin,einf_functional,einf_ratio,pinf\n";
  for (const auto& report : reports) {
    const auto field = [&](const std::string& method, bool einf) -> std::string {
      const auto it = report.mean_errors.find(method);
      if (it == report.mean_errors.end()) return "";
      return io::format_double(einf ? it->second.einf : it->second.e2);
    };
    out << report.config.density << ',' << report.config.n << ','
        << report.config.replications << ',' << field("plugin", false) << ','
        << field("functional", false) << ','
        << (report.e2_ratio ? io::format_double(*report.e2_ratio) : "") << ','
        << (report.p2 ? io::format_double(*report.p2) : "") << ','
        << field("plugin", true) << ',' << field("functional", true) << ','
        << (report.einf_ratio ? io::format_double(*report.einf_ratio) : "") << ','
        << (report.pinf ? io::format_double(*report.pinf) : "") << '\n';
  }
  return out.str();
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) {
  return config_to_json_obj(config).dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config JSON parse error: ") + e.what());
  }
  return config_from_json_obj(j);
}

std::string format_report(const BenchmarkReport& report, ReportFormat format) {
  return format_reports({report}, format);
}

std::string format_reports(const std::vector<BenchmarkReport>& reports,
                           ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: {
      if (reports.size() == 1) return report_to_json_obj(reports.front()).dump(2);
      json j = json::array();
      for (const auto& r : reports) j.push_back(report_to_json_obj(r));
      return j.dump(2);
    }
    case ReportFormat::Csv:
      return reports_to_csv(reports);
    case ReportFormat::Table: {
      std::ostringstream out;
      out << kTableHeader;
      for (const auto& r : reports)
        if (!r.config.methods.empty()) append_table_row(out, r);
      return out.str();
    }
  }
  throw std::logic_error("unreachable report format");
}

BenchmarkReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("report JSON parse error: ") + e.what());
  }
  return report_from_json_obj(j);
}

}  // namespace exmass::bench
