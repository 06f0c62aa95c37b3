#include "exmass/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "exmass/detail/math.hpp"
#include "exmass/rng.hpp"
#include "json.hpp"

namespace exmass::densities {

using detail::kPi;
using nlohmann::json;

namespace {

int component_dimension(const ComponentDist& dist) {
  return std::visit(
      [](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Gaussian2D> || std::is_same_v<T, Uniform2D>)
          return 2;
        else
          return 1;
      },
      dist);
}

double component_pdf(const ComponentDist& dist, std::span<const double> x) {
  struct Visitor {
    std::span<const double> x;
    double operator()(const Gaussian1D& g) const {
      const double z = (x[0] - g.mean) / g.stdev;
      return detail::normal_pdf(z) / g.stdev;
    }
    double operator()(const Uniform1D& u) const {
      return (x[0] >= u.low && x[0] <= u.high) ? 1.0 / (u.high - u.low) : 0.0;
    }
    double operator()(const Laplace1D& l) const {
      return std::exp(-std::abs(x[0] - l.location) / l.scale) / (2.0 * l.scale);
    }
    double operator()(const Gaussian2D& g) const {
      const double z0 = (x[0] - g.mean[0]) / g.stdev[0];
      const double z1 = (x[1] - g.mean[1]) / g.stdev[1];
      const double q = 1.0 - g.rho * g.rho;
      const double quad = (z0 * z0 - 2.0 * g.rho * z0 * z1 + z1 * z1) / q;
      return std::exp(-0.5 * quad) /
             (2.0 * kPi * g.stdev[0] * g.stdev[1] * std::sqrt(q));
    }
    double operator()(const Uniform2D& u) const {
      const bool in = x[0] >= u.low[0] && x[0] <= u.high[0] && x[1] >= u.low[1] &&
                      x[1] <= u.high[1];
      return in ? 1.0 / ((u.high[0] - u.low[0]) * (u.high[1] - u.low[1])) : 0.0;
    }
  };
  return std::visit(Visitor{x}, dist);
}

void component_draw(const ComponentDist& dist, rng::Xoshiro256pp& stream, double* out) {
  struct Visitor {
    rng::Xoshiro256pp& stream;
    double* out;
    void operator()(const Gaussian1D& g) const {
      out[0] = g.mean + g.stdev * stream.normal();
    }
    void operator()(const Uniform1D& u) const {
      out[0] = u.low + (u.high - u.low) * stream.uniform();
    }
    void operator()(const Laplace1D& l) const {
      const double u = stream.uniform_open();
      out[0] = u <= 0.5 ? l.location + l.scale * std::log(2.0 * u)
                        : l.location - l.scale * std::log(2.0 * (1.0 - u));
    }
    void operator()(const Gaussian2D& g) const {
      const double z0 = stream.normal();
      const double z1 = stream.normal();
      out[0] = g.mean[0] + g.stdev[0] * z0;
      out[1] = g.mean[1] +
               g.stdev[1] * (g.rho * z0 + std::sqrt(1.0 - g.rho * g.rho) * z1);
    }
    void operator()(const Uniform2D& u) const {
      out[0] = u.low[0] + (u.high[0] - u.low[0]) * stream.uniform();
      out[1] = u.low[1] + (u.high[1] - u.low[1]) * stream.uniform();
    }
  };
  std::visit(Visitor{stream, out}, dist);
}

//! per-component box holding all but `tail` of that component's mass
void component_box(const ComponentDist& dist, double tail, int dimension,
                   std::array<double, 2>& low, std::array<double, 2>& high) {
  struct Visitor {
    double tail;
    int dimension;
    std::array<double, 2>& low;
    std::array<double, 2>& high;
    void operator()(const Gaussian1D& g) const {
      const double k = std::max(6.0, detail::normal_two_sided_quantile(tail));
      low[0] = g.mean - k * g.stdev;
      high[0] = g.mean + k * g.stdev;
    }
    void operator()(const Uniform1D& u) const {
      low[0] = u.low;
      high[0] = u.high;
    }
    void operator()(const Laplace1D& l) const {
      const double t = std::max(30.0, std::log(1.0 / tail)) * l.scale;
      low[0] = l.location - t;
      high[0] = l.location + t;
    }
    void operator()(const Gaussian2D& g) const {
      // union bound over the two marginals
      const double k = std::max(6.0, detail::normal_two_sided_quantile(tail / 2.0));
      for (int p = 0; p < 2; ++p) {
        low[p] = g.mean[p] - k * g.stdev[p];
        high[p] = g.mean[p] + k * g.stdev[p];
      }
    }
    void operator()(const Uniform2D& u) const {
      for (int p = 0; p < 2; ++p) {
        low[p] = u.low[p];
        high[p] = u.high[p];
      }
    }
  };
  std::visit(Visitor{tail, dimension, low, high}, dist);
}

}  // namespace

void DensitySpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("density dimension must be 1 or 2");
  if (components.empty())
    throw std::invalid_argument("density needs at least one component");
  double total = 0.0;
  for (const auto& comp : components) {
    if (!(comp.weight > 0.0))
      throw std::invalid_argument("component weights must be positive");
    total += comp.weight;
    if (component_dimension(comp.dist) != dimension)
      throw std::invalid_argument("component dimension disagrees with density dimension");
    std::visit(
        [](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Gaussian1D>) {
            if (!(d.stdev > 0.0)) throw std::invalid_argument("stdev must be positive");
          } else if constexpr (std::is_same_v<T, Uniform1D>) {
            if (!(d.low < d.high)) throw std::invalid_argument("degenerate uniform interval");
          } else if constexpr (std::is_same_v<T, Laplace1D>) {
            if (!(d.scale > 0.0)) throw std::invalid_argument("scale must be positive");
          } else if constexpr (std::is_same_v<T, Gaussian2D>) {
            if (!(d.stdev[0] > 0.0) || !(d.stdev[1] > 0.0))
              throw std::invalid_argument("stdev must be positive");
            if (!(d.rho > -1.0 && d.rho < 1.0))
              throw std::invalid_argument("correlation must lie in (-1, 1)");
          } else if constexpr (std::is_same_v<T, Uniform2D>) {
            if (!(d.low[0] < d.high[0]) || !(d.low[1] < d.high[1]))
              throw std::invalid_argument("degenerate uniform rectangle");
          }
        },
        comp.dist);
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("component weights must sum to 1");
}

double pdf(const DensitySpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.dimension)
    throw std::invalid_argument("pdf: point dimension mismatch");
  double value = 0.0;
  for (const auto& comp : spec.components)
    value += comp.weight * component_pdf(comp.dist, x);
  return value;
}

Sample draw_sample(const DensitySpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("draw_sample: n must be at least 1");
  spec.validate();
  rng::Xoshiro256pp stream(seed);
  Sample sample;
  sample.dimension = spec.dimension;
  sample.seed = seed;
  sample.data.resize(n * static_cast<std::size_t>(spec.dimension));
  for (std::size_t i = 0; i < n; ++i) {
    double u = stream.uniform();
    std::size_t chosen = spec.components.size() - 1;
    double acc = 0.0;
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
      acc += spec.components[c].weight;
      if (u < acc) {
        chosen = c;
        break;
      }
    }
    component_draw(spec.components[chosen].dist, stream,
                   sample.data.data() + i * static_cast<std::size_t>(spec.dimension));
  }
  return sample;
}

SupportBox support_box(const DensitySpec& spec, double mass_tolerance) {
  spec.validate();
  if (!(mass_tolerance > 0.0 && mass_tolerance <= 0.01))
    throw std::invalid_argument("mass_tolerance must lie in (0, 0.01]");
  SupportBox box;
  box.dimension = spec.dimension;
  for (int p = 0; p < spec.dimension; ++p) {
    box.low[p] = std::numeric_limits<double>::infinity();
    box.high[p] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& comp : spec.components) {
    std::array<double, 2> lo{}, hi{};
    component_box(comp.dist, mass_tolerance, spec.dimension, lo, hi);
    for (int p = 0; p < spec.dimension; ++p) {
      box.low[p] = std::min(box.low[p], lo[p]);
      box.high[p] = std::max(box.high[p], hi[p]);
    }
  }
  return box;
}

double oracle_excess_mass(const DensitySpec& spec, double nu,
                          std::size_t grid_points_per_dim) {
  if (nu < 0.0) throw std::invalid_argument("oracle: level must be nonnegative");
  if (grid_points_per_dim == 0) grid_points_per_dim = default_oracle_points(spec.dimension);
  if (grid_points_per_dim < 64)
    throw std::invalid_argument("oracle: at least 64 grid points per dimension");
  const SupportBox box = support_box(spec);
  const std::size_t g = grid_points_per_dim;
  double sum = 0.0;
  if (spec.dimension == 1) {
    const double step = (box.high[0] - box.low[0]) / static_cast<double>(g);
    for (std::size_t i = 0; i < g; ++i) {
      const double x = box.low[0] + (static_cast<double>(i) + 0.5) * step;
      sum += std::max(pdf(spec, std::span<const double>(&x, 1)) - nu, 0.0);
    }
    return sum * step;
  }
  const double step0 = (box.high[0] - box.low[0]) / static_cast<double>(g);
  const double step1 = (box.high[1] - box.low[1]) / static_cast<double>(g);
  for (std::size_t i = 0; i < g; ++i) {
    std::array<double, 2> x{box.low[0] + (static_cast<double>(i) + 0.5) * step0, 0.0};
    for (std::size_t j = 0; j < g; ++j) {
      x[1] = box.low[1] + (static_cast<double>(j) + 0.5) * step1;
      sum += std::max(pdf(spec, x) - nu, 0.0);
    }
  }
  return sum * step0 * step1;
}

double gaussian_excess_mass(double nu) {
  const double peak = detail::kInvSqrt2Pi;
  if (nu <= 0.0) return 1.0;
  if (nu >= peak) return 0.0;
  const double x = std::sqrt(-2.0 * std::log(nu / peak));
  return std::erf(x / std::sqrt(2.0)) - 2.0 * nu * x;
}

DensitySpec builtin(const std::string& id) {
  DensitySpec spec;
  if (id == "a") {
    spec.dimension = 1;
    spec.components = {{1.0, Gaussian1D{0.0, 1.0}}};
  } else if (id == "b") {
    spec.dimension = 1;
    spec.components = {{0.8, Gaussian1D{-1.0, 0.7}}, {0.2, Uniform1D{1.0, 2.0}}};
  } else if (id == "c") {
    spec.dimension = 1;
    spec.components = {{0.3, Gaussian1D{-1.0, 0.5}},
                       {0.3, Gaussian1D{1.5, 1.0}},
                       {0.4, Laplace1D{0.0, 1.0 / 6.0}}};
  } else if (id == "d") {
    spec.dimension = 1;
    spec.components = {{0.5, Gaussian1D{-1.5, 0.4}},
                       {0.05, Gaussian1D{-0.8, 0.1}},
                       {0.45, Gaussian1D{1.0, 0.8}}};
  } else if (id == "A") {
    spec.dimension = 2;
    spec.components = {{1.0, Gaussian2D{{0.0, 0.0}, {1.0, 1.0}, 0.0}}};
  } else if (id == "B") {
    spec.dimension = 2;
    spec.components = {{0.6, Gaussian2D{{-1.0, 0.0}, {0.7, 0.7}, 0.0}},
                       {0.4, Uniform2D{{0.5, -0.5}, {1.5, 0.5}}}};
  } else if (id == "C") {
    spec.dimension = 2;
    spec.components = {{0.8, Gaussian2D{{-0.5, 0.5}, {1.0, 1.0}, 0.0}},
                       {0.2, Gaussian2D{{0.4, -0.4}, {1.0, 1.0}, 0.0}}};
  } else if (id == "D") {
    spec.dimension = 2;
    spec.components = {{0.45, Gaussian2D{{0.0, 0.0}, {1.5, 1.0}, 0.95}},
                       {0.45, Gaussian2D{{0.0, 0.0}, {1.5, 1.0}, -0.95}},
                       {0.10, Gaussian2D{{0.0, -1.2}, {0.2, 0.2}, 0.0}}};
  } else {
    throw std::invalid_argument("unknown built-in density id: " + id);
  }
  spec.validate();
  return spec;
}

std::vector<std::string> builtin_ids() {
  return {"a", "b", "c", "d", "A", "B", "C", "D"};
}

namespace {

json component_to_json(const Component& comp) {
  json j;
  j["weight"] = comp.weight;
  std::visit(
      [&j](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Gaussian1D>) {
          j["kind"] = "gaussian1d";
          j["mean"] = d.mean;
          j["stdev"] = d.stdev;
        } else if constexpr (std::is_same_v<T, Uniform1D>) {
          j["kind"] = "uniform1d";
          j["low"] = d.low;
          j["high"] = d.high;
        } else if constexpr (std::is_same_v<T, Laplace1D>) {
          j["kind"] = "laplace1d";
          j["location"] = d.location;
          j["scale"] = d.scale;
        } else if constexpr (std::is_same_v<T, Gaussian2D>) {
          j["kind"] = "gaussian2d";
          j["mean"] = d.mean;
          j["stdev"] = d.stdev;
          j["rho"] = d.rho;
        } else if constexpr (std::is_same_v<T, Uniform2D>) {
          j["kind"] = "uniform2d";
          j["low"] = d.low;
          j["high"] = d.high;
        }
      },
      comp.dist);
  return j;
}

Component component_from_json(const json& j) {
  Component comp;
  comp.weight = j.at("weight").get<double>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian1d") {
    comp.dist = Gaussian1D{j.at("mean").get<double>(), j.at("stdev").get<double>()};
  } else if (kind == "uniform1d") {
    comp.dist = Uniform1D{j.at("low").get<double>(), j.at("high").get<double>()};
  } else if (kind == "laplace1d") {
    comp.dist = Laplace1D{j.at("location").get<double>(), j.at("scale").get<double>()};
  } else if (kind == "gaussian2d") {
    comp.dist = Gaussian2D{j.at("mean").get<std::array<double, 2>>(),
                           j.at("stdev").get<std::array<double, 2>>(),
                           j.at("rho").get<double>()};
  } else if (kind == "uniform2d") {
    comp.dist = Uniform2D{j.at("low").get<std::array<double, 2>>(),
                          j.at("high").get<std::array<double, 2>>()};
  } else {
    throw std::runtime_error("unknown component kind: " + kind);
  }
  return comp;
}

}  // namespace

std::string to_json(const DensitySpec& spec) {
  json j;
  j["dimension"] = spec.dimension;
  j["components"] = json::array();
  for (const auto& comp : spec.components)
    j["components"].push_back(component_to_json(comp));
  return j.dump(2);
}

DensitySpec from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("density JSON parse error: ") + e.what());
  }
  DensitySpec spec;
  try {
    spec.dimension = j.at("dimension").get<int>();
    for (const auto& cj : j.at("components")) spec.components.push_back(component_from_json(cj));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("density JSON field error: ") + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace exmass::densities
