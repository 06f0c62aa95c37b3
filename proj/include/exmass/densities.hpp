#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace exmass::densities {

struct Gaussian1D {
  double mean = 0.0;
  double stdev = 1.0;
};

struct Uniform1D {
  double low = 0.0;
  double high = 1.0;
};

//! Double-exponential with pdf exp(-|x-location|/scale) / (2 scale).
struct Laplace1D {
  double location = 0.0;
  double scale = 1.0;
};

struct Gaussian2D {
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> stdev{1.0, 1.0};
  double rho = 0.0;  // correlation, in (-1, 1)
};

//! Uniform on the axis-aligned rectangle [low0,high0] x [low1,high1].
struct Uniform2D {
  std::array<double, 2> low{0.0, 0.0};
  std::array<double, 2> high{1.0, 1.0};
};

using ComponentDist =
    std::variant<Gaussian1D, Uniform1D, Laplace1D, Gaussian2D, Uniform2D>;

struct Component {
  double weight = 1.0;
  ComponentDist dist;
};

//! Declarative description of a mixture density; ground truth for benchmarks.
struct DensitySpec {
  int dimension = 1;
  std::vector<Component> components;

  //! Throws std::invalid_argument if weights do not sum to 1 within 1e-12,
  //! any scale parameter is non-positive, an interval is degenerate, or a
  //! component's dimension disagrees with `dimension`.
  void validate() const;
};

//! Axis-aligned box [low0,high0] x ... capturing all but a negligible
//! fraction of a density's mass.
struct SupportBox {
  int dimension = 1;
  std::array<double, 2> low{0.0, 0.0};
  std::array<double, 2> high{1.0, 1.0};

  double measure() const {
    double m = 1.0;
    for (int p = 0; p < dimension; ++p) m *= high[p] - low[p];
    return m;
  }
  bool contains(std::span<const double> x) const {
    for (int p = 0; p < dimension; ++p)
      if (x[p] < low[p] || x[p] > high[p]) return false;
    return true;
  }
};

//! n points stored row-major; `seed` records the stream that produced them
//! (0 for data read from a file).
struct Sample {
  int dimension = 1;
  std::uint64_t seed = 0;
  std::vector<double> data;

  std::size_t size() const {
    return dimension > 0 ? data.size() / static_cast<std::size_t>(dimension) : 0;
  }
  std::span<const double> point(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dimension),
            static_cast<std::size_t>(dimension)};
  }
  double coord(std::size_t i, int p) const {
    return data[i * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(p)];
  }
};

//! Mixture pdf at x. Throws on dimension mismatch.
double pdf(const DensitySpec& spec, std::span<const double> x);

//! n i.i.d. draws; the component is chosen by weight, then sampled. All
//! randomness is a deterministic transform of the xoshiro stream for `seed`.
Sample draw_sample(const DensitySpec& spec, std::size_t n, std::uint64_t seed);

//! Smallest box of the form union of [mean - k stdev, mean + k stdev] (exact
//! bounds for uniforms) whose complement holds at most `mass_tolerance` of
//! the mixture mass. Gaussian components always get at least +-6 stdev and
//! Laplace components at least +-30 scale, so the default complement is far
//! below the tolerance.
SupportBox support_box(const DensitySpec& spec, double mass_tolerance = 1e-6);

inline std::size_t default_oracle_points(int dimension) {
  return dimension == 1 ? 4096 : 512;
}

//! Exact excess mass integral of max(f - nu, 0) over the support box by the
//! midpoint rule; `grid_points_per_dim` >= 64 (0 selects the default
//! 4096 / 512^2 resolution).
double oracle_excess_mass(const DensitySpec& spec, double nu,
                          std::size_t grid_points_per_dim = 0);

//! Closed-form excess mass of the standard 1-D Gaussian, used as an
//! independent check of the quadrature oracle. (The curve-valued oracle over
//! a level grid lives in excess.hpp next to the estimator curves.)
double gaussian_excess_mass(double nu);

//! Built-in benchmark densities, resolvable by id "a".."d" (univariate) and
//! "A".."D" (bivariate).
DensitySpec builtin(const std::string& id);
std::vector<std::string> builtin_ids();

//! JSON (de)serialization:
//! {"dimension": d, "components": [{"weight": w, "kind": "...", ...}]}
std::string to_json(const DensitySpec& spec);
DensitySpec from_json(const std::string& text);

}  // namespace exmass::densities
