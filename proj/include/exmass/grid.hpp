#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "exmass/densities.hpp"

namespace exmass {

//! Midpoint-rule quadrature grid over a support box. Points are cell
//! centers, row-major (last dimension fastest); every cell carries the same
//! weight, and the weights sum to the box measure.
struct QuadratureGrid {
  densities::SupportBox box;
  std::array<std::size_t, 2> points{1, 1};  // per dimension

  int dimension() const { return box.dimension; }

  std::size_t size() const {
    std::size_t total = 1;
    for (int p = 0; p < dimension(); ++p) total *= points[p];
    return total;
  }

  double step(int p) const {
    return (box.high[p] - box.low[p]) / static_cast<double>(points[p]);
  }

  double coordinate(int p, std::size_t i) const {
    return box.low[p] + (static_cast<double>(i) + 0.5) * step(p);
  }

  double cell_weight() const { return box.measure() / static_cast<double>(size()); }

  std::array<double, 2> point(std::size_t flat) const {
    std::array<double, 2> x{0.0, 0.0};
    if (dimension() == 1) {
      x[0] = coordinate(0, flat);
    } else {
      x[0] = coordinate(0, flat / points[1]);
      x[1] = coordinate(1, flat % points[1]);
    }
    return x;
  }
};

inline std::size_t default_estimator_points(int dimension) {
  return dimension == 1 ? 512 : 128;
}

//! points_per_dim = 0 selects the 512 / 128^2 default.
inline QuadratureGrid make_grid(const densities::SupportBox& box,
                                std::size_t points_per_dim = 0) {
  if (points_per_dim == 0) points_per_dim = default_estimator_points(box.dimension);
  if (points_per_dim < 2) throw std::invalid_argument("grid needs at least 2 points per dimension");
  QuadratureGrid grid;
  grid.box = box;
  for (int p = 0; p < box.dimension; ++p) grid.points[p] = points_per_dim;
  return grid;
}

}  // namespace exmass
