#pragma once

#include <optional>
#include <string>
#include <span>

#include "dpd/models.hpp"
#include "dpd/numerics.hpp"

namespace dpd {

struct EstimationResult {
  Vector theta_hat;
  double objective_value = 0.0;
  bool converged = false;
  int iterations = 0;
  /// Max-norm of the objective gradient; projected onto the constraint
  /// tangent space for restricted fits.
  double gradient_norm = 0.0;
  /// Restricted fits only: lambda with grad objective + G lambda = 0.
  std::optional<Vector> lagrange_multipliers;
  double beta = 0.0;
  /// Start that produced the reported fit ("closed-form", "moment", "beta0", "robust", "user").
  std::string start_label;
};

OptimizerSpec default_fit_optimizer();

struct FitOptions {
  std::optional<Vector> init;
  OptimizerSpec optimizer = default_fit_optimizer();
  /// For beta > 0 also start from the beta = 0 fit and the robust pilot, and
  /// keep the lowest objective.
  bool multistart = true;
};

/// Minimum DPD estimator; the MLE at beta = 0.
EstimationResult fit_mdpde(const ParametricModel& model, std::span<const double> data, double beta,
                           const FitOptions& options = {});

/// Minimum DPD estimator restricted to {theta : g(theta) = 0}.
EstimationResult fit_rmdpde(const ParametricModel& model, std::span<const double> data, double beta,
                            const ConstraintSpec& constraint, const FitOptions& options = {});

/// Objective gradient on the natural scale, -(1 + beta) * estimating function.
Vector objective_gradient(const ParametricModel& model, const Vector& theta,
                          std::span<const double> data, double beta);

}  // namespace dpd
