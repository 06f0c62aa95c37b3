#pragma once

#include <optional>
#include <string>
#include <vector>

namespace exmass {

//! Parameters an estimator actually used, carried along for reporting.
struct CurveInfo {
  std::string method;               // "oracle", "plugin", "functional", ...
  std::optional<int> order;         // Fourier truncation N
  std::optional<int> level;         // Haar resolution j
  std::vector<double> bandwidth;    // kernel bandwidth per dimension
  std::optional<double> scale;      // Fourier domain scale R
};

inline CurveInfo make_curve_info(std::string method, std::vector<double> bandwidth = {}) {
  CurveInfo info;
  info.method = std::move(method);
  info.bandwidth = std::move(bandwidth);
  return info;
}

//! (level, estimate) pairs produced by an estimator or by the oracle.
struct ExcessMassCurve {
  std::vector<double> levels;
  std::vector<double> values;
  CurveInfo info;
};

}  // namespace exmass
