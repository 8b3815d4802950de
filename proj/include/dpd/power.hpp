#pragma once

#include <cstdint>

#include "dpd/asymptotics.hpp"
#include "dpd/models.hpp"
#include "dpd/numerics.hpp"
#include "dpd/testing.hpp"

namespace dpd {

/// Large-sample power of the DPD test at a fixed alternative theta_star.
struct PowerAnalysis {
  Vector theta_star;
  Vector theta_null_star;  // beta-projection of theta_star onto the null set
  double divergence_gap = 0.0;  // d_gamma(f_{theta_star}, f_{theta_null_star})
  double sigma2 = 0.0;
  Vector t_vec;  // gradient of d_gamma in its first argument
  Vector s_vec;  // gradient of d_gamma in its second argument
  /// 2p x 2p asymptotic covariance of sqrt(n) (theta_hat, theta_tilde).
  Matrix joint_cov;
  double critical_value = 0.0;  // upper-alpha point of the null law at theta_null_star
  Vector null_eigenvalues;
  double alpha = 0.05;
  double beta = 0.0;
  double gamma = 0.0;
  /// sigma2 <= 1e-12: power degenerates to a step in n.
  bool degenerate = false;

  double power(double n) const;
};

struct PowerOptions {
  double alpha = 0.05;
  std::int64_t mc_draws = 1'000'000;
  std::uint64_t seed = 20130101;
};

/// Minimizer of d_beta(f_{theta_star}, f_theta) subject to the constraint.
Vector population_projection(const ParametricModel& model, const Vector& theta_star,
                             const ConstraintSpec& constraint, double beta);

PowerAnalysis analyze_power(const ParametricModel& model, const Vector& theta_star,
                            const ConstraintSpec& constraint, double beta, double gamma,
                            const PowerOptions& options = {});

/// 1 - Phi(sqrt(n) / sigma * (c_alpha / (2n) - d_gamma)). A degenerate
/// variance gives the limiting step value, 1 if d_gamma > c_alpha / (2n) else 0.
double approximate_power(const ParametricModel& model, const Vector& theta_star,
                         const ConstraintSpec& constraint, double beta, double gamma, double n,
                         const PowerOptions& options = {});

/// Smallest integer n = floor(n*) + 1 whose approximate power reaches `target`.
/// Throws DegenerateVariance when sigma2 <= 1e-12.
std::int64_t required_sample_size(const PowerAnalysis& analysis, double target);
std::int64_t required_sample_size(const ParametricModel& model, const Vector& theta_star,
                                  const ConstraintSpec& constraint, double beta, double gamma,
                                  double target, const PowerOptions& options = {});

/// Limit law of the statistic under theta_n = theta0 + d / sqrt(n):
/// sum_i lambda_i (Z_i + w_i)^2 + eta.
struct ContiguousSpec {
  Vector d;
  Vector w;
  double eta = 0.0;
  NullSpectrum spectrum;

  ChiSquareMixture mixture(std::int64_t mc_draws = 1'000'000,
                           std::uint64_t seed = 20130101) const;
};

ContiguousSpec contiguous_distribution(const ParametricModel& model, const Vector& theta0,
                                       const Vector& d, double beta, double gamma,
                                       const ConstraintSpec& constraint);

/// P(limit statistic >= null upper-alpha point).
double contiguous_power(const ContiguousSpec& spec, double alpha, std::int64_t mc_draws = 1'000'000,
                        std::uint64_t seed = 20130101);

}  // namespace dpd
