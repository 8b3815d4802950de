#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dpd/models.hpp"
#include "dpd/numerics.hpp"

namespace dpd {

struct TuningConfig {
  std::vector<double> grid;  // ascending, in [0, 1]; empty means 0, 0.01, ..., 1
  double pilot_beta = 0.5;
  /// Parameter coordinates entering the MSE; empty means all.
  std::vector<int> target;

  void validate(int dimension) const;
  static std::vector<double> default_grid();
};

struct TuningPoint {
  double beta = 0.0;
  Vector theta_hat;
  double bias2 = 0.0;
  double variance = 0.0;  // trace(J^{-1} K J^{-1}) / n at theta_hat
  double mse = 0.0;
  bool ok = false;  // false when the fit or the matrices failed at this beta
};

struct TuningResult {
  double beta_opt = 0.0;
  Vector pilot;
  std::vector<TuningPoint> curve;
  int failures = 0;
};

/// Picks beta minimizing |theta_beta - theta_pilot|^2 + trace(J^{-1} K J^{-1}) / n
/// over the grid; ties go to the smallest beta.
TuningResult select_beta(const ParametricModel& model, std::span<const double> data,
                         const TuningConfig& config = {});

}  // namespace dpd
