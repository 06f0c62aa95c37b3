#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "exmass/densities.hpp"

namespace exmass::wavelet {

//! Admissible Haar resolution range: 2^j0 ~ ln n, 2^jinf ~ (n / ln n)^(1/d).
struct LevelSchedule {
  int coarsest = 0;  // j0
  int finest = 0;    // jinf
};

LevelSchedule level_schedule(std::size_t n, int d);

//! Theorem-style parameter choice for smoothness s:
//!   level = floor(log2((n ln n)^(1/(2s+d)))),
//!   order = floor((c0 n ln n)^(s/(2s+d))),
//! with c0 below min(2s, d) / (pi^2 gamma (2s+d)); gamma = 1 for Haar.
struct TheoreticalParameters {
  int level = 0;
  int order = 1;
  double c0 = 0.0;
  double gamma = 1.0;
  double smoothness = 2.0;
};

TheoreticalParameters theoretical_parameters(std::size_t n, int d, double smoothness,
                                             double c0 = 0.0 /* 0 = half the bound */);

//! Haar projection estimator at resolution `level`: the density estimate is
//! 2^(jd) times the sample fraction of the dyadic cell containing t, cells
//! anchored at the box's lower corner. Points on the box's top edge count
//! into the last cell.
struct HaarEstimator {
  int level = 0;
  densities::SupportBox box;
  std::size_t sample_size = 0;
  std::array<std::size_t, 2> cells{1, 1};        // per-dimension cell count
  std::vector<std::uint32_t> counts;             // flattened, row-major
  std::size_t inside = 0;                        // sample points inside box

  int dimension() const { return box.dimension; }

  //! flattened cell index of t, or npos when t is outside the box
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t cell_index(std::span<const double> t) const;

  //! scaling coefficient alpha_{j,l} = 2^(jd/2) count_l / n
  double coefficient(std::size_t cell) const;
};

//! Single pass over the sample; throws on an empty sample, warns on stderr
//! when `level` falls outside the level_schedule range.
HaarEstimator fit(const densities::Sample& sample, int level,
                  const densities::SupportBox& box);

//! fhat_j(t); throws when t is outside the box.
double evaluate(const HaarEstimator& est, std::span<const double> t);

//! Empirical variance of fhat_j(t) and its truncation. For Haar the
//! moment-based double sum collapses to
//!   raw = 2^(2jd) p (1-p) / n,   truncated = min(raw, 2^(jd)/n),
//! with p the sample fraction of t's cell (gamma = 1).
struct VarianceEstimate {
  double raw = 0.0;
  double truncated = 0.0;
};

VarianceEstimate variance_estimate(const HaarEstimator& est, std::span<const double> t);

}  // namespace exmass::wavelet
