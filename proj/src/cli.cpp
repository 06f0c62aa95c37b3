#include "exmass/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "exmass/bench.hpp"
#include "exmass/densities.hpp"
#include "exmass/detail/math.hpp"
#include "exmass/detail/parallel.hpp"
#include "exmass/excess.hpp"
#include "exmass/fourier.hpp"
#include "exmass/io.hpp"
#include "exmass/kde.hpp"
#include "exmass/rng.hpp"

namespace exmass::cli {

namespace {

densities::DensitySpec resolve_density(const std::string& id_or_path) {
  const auto ids = densities::builtin_ids();
  if (std::find(ids.begin(), ids.end(), id_or_path) != ids.end())
    return densities::builtin(id_or_path);
  if (std::filesystem::exists(id_or_path)) {
    try {
      return densities::from_json(io::read_file(id_or_path));
    } catch (const std::exception& e) {
      throw InputError(std::string("bad density file: ") + e.what());
    }
  }
  throw InputError("unknown density id '" + id_or_path +
                   "' (built-ins: a b c d A B C D, or pass a JSON file path)");
}

bench::NuGridSpec parse_nu_grid(const std::string& text) {
  bench::NuGridSpec spec;
  unsigned long count = 0;
  if (std::sscanf(text.c_str(), "%lu:%lf:%lf", &count, &spec.lo, &spec.hi) != 3 ||
      count < 2)
    throw CLI::ValidationError("--nu-grid expects COUNT:LO:HI with COUNT >= 2");
  spec.count = count;
  return spec;
}

densities::SupportBox parse_box(const std::string& text, int dimension) {
  densities::SupportBox box;
  box.dimension = dimension;
  std::istringstream in(text);
  std::string part;
  int p = 0;
  while (std::getline(in, part, ',')) {
    if (p >= dimension) throw CLI::ValidationError("--box has more ranges than dimensions");
    if (std::sscanf(part.c_str(), "%lf:%lf", &box.low[p], &box.high[p]) != 2 ||
        !(box.low[p] < box.high[p]))
      throw CLI::ValidationError("--box expects LO:HI[,LO:HI] with LO < HI");
    ++p;
  }
  if (p != dimension)
    throw CLI::ValidationError("--box must give one LO:HI range per dimension");
  return box;
}

bench::ReportFormat parse_format(const std::string& text) {
  if (text == "table") return bench::ReportFormat::Table;
  if (text == "csv") return bench::ReportFormat::Csv;
  if (text == "json") return bench::ReportFormat::Json;
  throw CLI::ValidationError("--format must be table, csv or json");
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    io::write_file(out_path, content);
}

std::string curves_table(std::span<const ExcessMassCurve> curves) {
  std::ostringstream out;
  out << std::left;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%10s", "nu");
  out << buf;
  for (const auto& c : curves) {
    std::snprintf(buf, sizeof(buf), " %12s", c.info.method.c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t i = 0; i < curves.front().levels.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%10.6f", curves.front().levels[i]);
    out << buf;
    for (const auto& c : curves) {
      std::snprintf(buf, sizeof(buf), " %12.6f", c.values[i]);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

void emit_curves(const std::vector<ExcessMassCurve>& curves, const std::string& out_path,
                 const std::string& format) {
  switch (parse_format(format)) {
    case bench::ReportFormat::Table:
      emit(out_path, curves_table(curves));
      break;
    case bench::ReportFormat::Csv:
      emit(out_path, excess::curves_to_csv(curves));
      break;
    case bench::ReportFormat::Json:
      emit(out_path, excess::curves_to_json(curves));
      break;
  }
}

struct EstimateOptions {
  std::string data_path;
  std::string density;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  double nu = -1.0;
  std::string nu_grid_spec;
  std::string method = "functional";
  std::string order = "auto";
  std::string bandwidth = "auto";
  int bootstrap = 100;
  std::size_t grid_points = 0;
  std::string box_spec;
  std::string save_sample;
  std::string save_moments;
  std::string out_path;
  std::string format = "table";
};

int run_estimate(const EstimateOptions& opt) {
  if (opt.data_path.empty() && opt.density.empty())
    throw CLI::ValidationError("estimate needs --data or --density");
  if (opt.nu < 0.0 && opt.nu_grid_spec.empty())
    throw CLI::ValidationError("estimate needs --nu or --nu-grid");

  densities::Sample sample;
  std::optional<densities::DensitySpec> spec;
  if (!opt.data_path.empty()) {
    try {
      sample = io::read_sample_file(opt.data_path);
    } catch (const std::exception& e) {
      throw InputError(std::string("cannot load sample: ") + e.what());
    }
  } else {
    spec = resolve_density(opt.density);
    sample = densities::draw_sample(*spec, opt.n, opt.seed);
  }
  if (!opt.save_sample.empty()) {
    std::ostringstream csv;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      for (int p = 0; p < sample.dimension; ++p)
        csv << (p ? "," : "") << io::format_double(sample.coord(i, p));
      csv << '\n';
    }
    io::write_file(opt.save_sample, csv.str());
  }

  std::vector<double> base_bw;
  if (opt.bandwidth == "auto") {
    base_bw = kde::bandwidth_auto(sample);
  } else {
    const double h = std::stod(opt.bandwidth);
    if (!(h > 0.0)) throw CLI::ValidationError("--bandwidth must be positive or 'auto'");
    base_bw.assign(static_cast<std::size_t>(sample.dimension), h);
  }

  densities::SupportBox box;
  if (spec) {
    box = densities::support_box(*spec);
  } else if (!opt.box_spec.empty()) {
    box = parse_box(opt.box_spec, sample.dimension);
  } else {
    // data file without a declared support: pad the sample range by 4 bandwidths
    box.dimension = sample.dimension;
    for (int p = 0; p < sample.dimension; ++p) {
      double lo = sample.coord(0, p), hi = lo;
      for (std::size_t i = 1; i < sample.size(); ++i) {
        lo = std::min(lo, sample.coord(i, p));
        hi = std::max(hi, sample.coord(i, p));
      }
      box.low[p] = lo - 4.0 * base_bw[static_cast<std::size_t>(p)];
      box.high[p] = hi + 4.0 * base_bw[static_cast<std::size_t>(p)];
    }
  }
  const auto grid = make_grid(box, opt.grid_points);

  std::vector<double> levels;
  if (!opt.nu_grid_spec.empty()) {
    const auto nu_grid = parse_nu_grid(opt.nu_grid_spec);
    levels = excess::level_grid(nu_grid.count, nu_grid.lo, nu_grid.hi);
  } else {
    levels = {opt.nu};
  }

  std::vector<std::string> methods;
  if (opt.method == "both")
    methods = {"functional", "plugin"};
  else if (opt.method == "functional" || opt.method == "plugin" || opt.method == "corrected")
    methods = {opt.method};
  else
    throw CLI::ValidationError("--method must be functional, plugin, corrected or both");

  std::vector<ExcessMassCurve> curves;
  std::optional<kde::BootstrapMoments> moments;
  std::vector<double> tuned_bw;
  int order = 0;
  for (const auto& method : methods) {
    if (method == "plugin") {
      const auto model = kde::make_model(sample, base_bw);
      const auto dens = kde::evaluate_on_grid(model, grid);
      curves.push_back(excess::plugin_curve(
          dens, grid, levels, make_curve_info("plugin", base_bw)));
      continue;
    }
    if (!moments) {
      const double gmean = detail::geometric_mean(base_bw);
      const double s_hat = kde::smoothness_from_bandwidth(gmean, sample.size(),
                                                          sample.dimension);
      const auto tuned = kde::tuned_parameters(s_hat, sample.size(), sample.dimension);
      tuned_bw.resize(base_bw.size());
      for (std::size_t p = 0; p < base_bw.size(); ++p)
        tuned_bw[p] = tuned.bandwidth * base_bw[p] / gmean;
      order = opt.order == "auto" ? tuned.order : std::stoi(opt.order);
      if (order < 1) throw CLI::ValidationError("--order must be >= 1 or 'auto'");
      moments = kde::bootstrap_moments(sample, tuned_bw, grid, opt.bootstrap, opt.seed,
                                       detail::resolve_threads(0));
      if (!opt.save_moments.empty()) {
        std::ostringstream csv;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const auto x = grid.point(i);
          for (int p = 0; p < grid.dimension(); ++p)
            csv << io::format_double(x[static_cast<std::size_t>(p)]) << ',';
          csv << io::format_double(moments->mean[i]) << ','
              << io::format_double(moments->variance[i]) << '\n';
        }
        io::write_file(opt.save_moments, csv.str());
      }
    }
    if (method == "functional") {
      const auto transform = excess::functional_transform(
          moments->mean, {}, grid, order, excess::auto_scale(moments->mean));
      curves.push_back(excess::functional_curve(
          transform, levels, make_curve_info("functional", tuned_bw)));
    } else {  // corrected
      const auto model = kde::make_model(sample, tuned_bw);
      const auto dens = kde::evaluate_on_grid(model, grid);
      const auto transform = excess::functional_transform(
          dens, moments->variance, grid, order, excess::auto_scale(dens));
      curves.push_back(excess::functional_curve(
          transform, levels, make_curve_info("corrected", tuned_bw)));
    }
  }
  emit_curves(curves, opt.out_path, opt.format);
  return kExitOk;
}

struct BenchmarkOptions {
  std::string config_path;
  std::string density;
  std::string n_list = "1000";
  int replications = 20;
  std::uint64_t seed = 1;
  std::string nu_grid_spec = "100:0:1";
  std::string methods = "functional,plugin";
  std::size_t grid_points = 0;
  std::size_t oracle_grid_points = 0;
  int bootstrap = 100;
  std::string bandwidth = "auto";
  std::string order = "auto";
  std::string out_path;
  std::string format = "table";
};

int run_benchmark(const BenchmarkOptions& opt) {
  std::vector<bench::ExperimentConfig> configs;
  if (!opt.config_path.empty()) {
    std::string text;
    try {
      text = io::read_file(opt.config_path);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
    try {
      configs.push_back(bench::config_from_json(text));
    } catch (const std::exception& e) {
      throw InputError(std::string("bad config file: ") + e.what());
    }
  } else {
    if (opt.density.empty())
      throw CLI::ValidationError("benchmark needs --config or --density");
    bench::ExperimentConfig base;
    base.density = opt.density;
    base.replications = opt.replications;
    base.seed = opt.seed;
    base.nu_grid = parse_nu_grid(opt.nu_grid_spec);
    base.grid_points = opt.grid_points;
    base.oracle_grid_points = opt.oracle_grid_points;
    base.bootstrap = opt.bootstrap;
    if (opt.bandwidth != "auto") base.bandwidth = std::stod(opt.bandwidth);
    if (opt.order != "auto") base.order = std::stoi(opt.order);
    base.methods.clear();
    std::istringstream in(opt.methods);
    std::string method;
    while (std::getline(in, method, ','))
      if (!method.empty()) base.methods.push_back(method);
    std::istringstream ns(opt.n_list);
    std::string n_text;
    while (std::getline(ns, n_text, ',')) {
      bench::ExperimentConfig config = base;
      config.n = static_cast<std::size_t>(std::stoull(n_text));
      configs.push_back(config);
    }
    if (configs.empty()) throw CLI::ValidationError("--n lists no sample sizes");
  }

  std::vector<bench::BenchmarkReport> reports;
  for (const auto& config : configs) {
    config.validate();
    resolve_density(config.density);  // surface input errors as exit code 3
    const auto start = std::chrono::steady_clock::now();
    reports.push_back(bench::run_experiment(config, detail::resolve_threads(0)));
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << "benchmark " << config.density << " n=" << config.n << " K="
              << config.replications << " finished in " << std::fixed
              << std::setprecision(1) << seconds << "s\n";
  }
  emit(opt.out_path, bench::format_reports(reports, parse_format(opt.format)));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"excess mass estimation from samples: functional Fourier estimator "
               "with bias correction, plug-in baseline, Monte Carlo benchmarks"};
  app.require_subcommand(1);

  EstimateOptions est;
  auto* cmd_est = app.add_subcommand("estimate", "estimate an excess mass curve from data");
  cmd_est->add_option("--data", est.data_path, "sample CSV (one point per row)");
  cmd_est->add_option("--density", est.density, "built-in id or density JSON path");
  cmd_est->add_option("--n", est.n, "sample size when drawing from --density");
  cmd_est->add_option("--seed", est.seed, "RNG seed");
  cmd_est->add_option("--nu", est.nu, "single level");
  cmd_est->add_option("--nu-grid", est.nu_grid_spec, "level grid COUNT:LO:HI");
  cmd_est->add_option("--method", est.method, "functional | plugin | corrected | both");
  cmd_est->add_option("--order", est.order, "Fourier order or 'auto'");
  cmd_est->add_option("--bandwidth", est.bandwidth, "kernel bandwidth or 'auto'");
  cmd_est->add_option("--bootstrap", est.bootstrap, "bootstrap replications");
  cmd_est->add_option("--grid", est.grid_points, "quadrature points per dimension");
  cmd_est->add_option("--box", est.box_spec, "integration box LO:HI[,LO:HI]");
  cmd_est->add_option("--save-sample", est.save_sample, "write the sample as CSV");
  cmd_est->add_option("--save-moments", est.save_moments,
                      "write bootstrap moments as CSV (x, mean, variance)");
  cmd_est->add_option("--out", est.out_path, "output path (default stdout)");
  cmd_est->add_option("--format", est.format, "table | csv | json");

  BenchmarkOptions ben;
  auto* cmd_ben = app.add_subcommand("benchmark", "Monte Carlo comparison against the oracle");
  cmd_ben->add_option("--config", ben.config_path, "experiment config JSON");
  cmd_ben->add_option("--density", ben.density, "built-in id or density JSON path");
  cmd_ben->add_option("--n", ben.n_list, "sample sizes, comma separated");
  cmd_ben->add_option("--k", ben.replications, "Monte Carlo replications");
  cmd_ben->add_option("--seed", ben.seed, "master seed");
  cmd_ben->add_option("--nu-grid", ben.nu_grid_spec, "level grid COUNT:LO:HI");
  cmd_ben->add_option("--methods", ben.methods, "comma separated method list");
  cmd_ben->add_option("--grid", ben.grid_points, "estimator grid points per dimension");
  cmd_ben->add_option("--oracle-grid", ben.oracle_grid_points, "oracle grid points per dimension");
  cmd_ben->add_option("--bootstrap", ben.bootstrap, "bootstrap replications");
  cmd_ben->add_option("--bandwidth", ben.bandwidth, "kernel bandwidth or 'auto'");
  cmd_ben->add_option("--order", ben.order, "Fourier order or 'auto'");
  cmd_ben->add_option("--out", ben.out_path, "output path (default stdout)");
  cmd_ben->add_option("--format", ben.format, "table | csv | json");

  struct {
    std::string density;
    std::string nu_grid_spec = "100:0:1";
    std::size_t grid_points = 0;
    std::string out_path;
    std::string format = "csv";
  } ora;
  auto* cmd_ora = app.add_subcommand("oracle", "exact excess mass curve of a known density");
  cmd_ora->add_option("--density", ora.density, "built-in id or density JSON path")->required();
  cmd_ora->add_option("--nu-grid", ora.nu_grid_spec, "level grid COUNT:LO:HI");
  cmd_ora->add_option("--grid", ora.grid_points, "quadrature points per dimension");
  cmd_ora->add_option("--out", ora.out_path, "output path (default stdout)");
  cmd_ora->add_option("--format", ora.format, "table | csv | json");

  struct {
    double nu = 0.0;
    int order = 100;
    double scale = 1.0;
    std::string out_path;
  } cof;
  auto* cmd_cof = app.add_subcommand("coeffs", "Fourier coefficients of the excess mass kernel");
  cmd_cof->add_option("--nu", cof.nu, "level")->required();
  cmd_cof->add_option("--order", cof.order, "truncation order");
  cmd_cof->add_option("--scale", cof.scale, "domain scale R");
  cmd_cof->add_option("--out", cof.out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_est->parsed()) return run_estimate(est);
    if (cmd_ben->parsed()) return run_benchmark(ben);
    if (cmd_ora->parsed()) {
      const auto spec = resolve_density(ora.density);
      const auto nu_grid = parse_nu_grid(ora.nu_grid_spec);
      const auto levels = excess::level_grid(nu_grid.count, nu_grid.lo, nu_grid.hi);
      std::vector<ExcessMassCurve> curves{
          excess::oracle_curve(spec, levels, ora.grid_points)};
      emit_curves(curves, ora.out_path, ora.format);
      return kExitOk;
    }
    if (cmd_cof->parsed()) {
      const auto coeffs = fourier::coefficients(cof.nu, cof.order, cof.scale);
      std::ostringstream out;
      for (int k = 0; k <= coeffs.order; ++k)
        out << k << ',' << io::format_double(coeffs.c[static_cast<std::size_t>(k)]) << '\n';
      emit(cof.out_path, out.str());
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("exmass");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace exmass::cli
