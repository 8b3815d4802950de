#include "dpd/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpd/asymptotics.hpp"
#include "dpd/errors.hpp"
#include "dpd/estimation.hpp"

namespace dpd {

std::vector<double> TuningConfig::default_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

void TuningConfig::validate(int dimension) const {
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw Error(ErrorKind::DomainError, "tuning grid must be strictly ascending");
  }
  if (!grid.empty() && (grid.front() < 0.0 || grid.back() > 1.0)) {
    throw Error(ErrorKind::DomainError, "tuning grid must lie in [0, 1]");
  }
  const double lo = grid.empty() ? 0.0 : grid.front();
  const double hi = grid.empty() ? 1.0 : grid.back();
  if (!(pilot_beta >= lo && pilot_beta <= hi)) {
    throw Error(ErrorKind::DomainError, "pilot beta must lie within the grid range");
  }
  for (int i : target) {
    if (i < 0 || i >= dimension) throw Error(ErrorKind::DomainError, "target index out of range");
  }
}

TuningResult select_beta(const ParametricModel& model, std::span<const double> data,
                         const TuningConfig& config) {
  const int p = model.dimension();
  config.validate(p);
  const std::vector<double> grid = config.grid.empty() ? TuningConfig::default_grid() : config.grid;
  std::vector<int> target = config.target;
  if (target.empty()) {
    for (int i = 0; i < p; ++i) target.push_back(i);
  }
  const double n = static_cast<double>(data.size());

  TuningResult result;
  result.pilot = fit_mdpde(model, data, config.pilot_beta).theta_hat;

  const auto count = static_cast<std::ptrdiff_t>(grid.size());
  result.curve.resize(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    TuningPoint& pt = result.curve[static_cast<std::size_t>(k)];
    pt.beta = grid[static_cast<std::size_t>(k)];
    try {
      pt.theta_hat = fit_mdpde(model, data, pt.beta).theta_hat;
      const AsymptoticMatrices m = model_matrices(model, pt.theta_hat, pt.beta, pt.beta);
      const Matrix Jinv = spd_inverse(m.J);
      const Matrix cov = Jinv * m.K * Jinv;
      for (int i : target) {
        const double diff = pt.theta_hat[i] - result.pilot[i];
        pt.bias2 += diff * diff;
        pt.variance += cov(i, i) / n;
      }
      pt.mse = pt.bias2 + pt.variance;
      pt.ok = std::isfinite(pt.mse);
    } catch (const Error&) {
      pt.ok = false;
    }
    if (!pt.ok) pt.mse = std::numeric_limits<double>::quiet_NaN();
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& pt : result.curve) {
    if (!pt.ok) {
      ++result.failures;
      continue;
    }
    if (pt.mse < best) {
      best = pt.mse;
      result.beta_opt = pt.beta;
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorKind::NonConvergent, "every grid point failed");
  return result;
}

}  // namespace dpd
