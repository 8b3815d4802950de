#pragma once

#include <span>
#include <string>
#include <vector>

#include "dpd/models.hpp"

namespace dpd {

/// Tuning parameters below this are treated as their zero limit.
inline constexpr double kLimitThreshold = 1e-8;

struct DivergenceConfig {
  double beta = 0.0;   // estimation
  double gamma = 0.0;  // test statistic

  void validate() const;
};

struct Dataset {
  std::vector<double> values;
  std::string label;
};

/// d_gamma(f_{theta1}, f_{theta2}); Kullback-Leibler at gamma = 0.
/// Uses closed-form hooks where the model has them, quadrature otherwise.
double dpd(const ParametricModel& model, const Vector& theta1, const Vector& theta2, double gamma);

/// Same divergence from a single quadrature of the raw integrand. Slower; used
/// as a fallback and as a cross-check.
double dpd_quadrature(const ParametricModel& model, const Vector& theta1, const Vector& theta2,
                      double gamma);

/// (1/n) sum V_theta(X_i), V_theta(x) = int f^{1+beta} - (1 + 1/beta) f^beta(x);
/// minus the mean log-likelihood at beta = 0.
double empirical_objective(const ParametricModel& model, const Vector& theta,
                           std::span<const double> data, double beta);

/// (1/n) sum u f^beta(X_i) - int u f^{1+beta}. The objective gradient is
/// -(1 + beta) times this.
Vector estimating_function(const ParametricModel& model, const Vector& theta,
                           std::span<const double> data, double beta);

/// Throws DomainError unless every observation lies in the model support.
void require_in_support(const ParametricModel& model, std::span<const double> data);

}  // namespace dpd
