#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpd/numerics.hpp"
#include "dpd/rng.hpp"

namespace dpd {

class ConstraintSpec;

enum class Support { RealLine, PositiveHalfLine };

/// An identifiable parametric density family {f_theta}. The support must not
/// depend on theta.
///
/// The virtual hooks returning std::optional are closed-form accelerators.
/// A model that leaves them empty still works everywhere: the free functions
/// below (power_integral, score_outer_integral, ...) fall back to quadrature
/// over the support.
class ParametricModel {
 public:
  virtual ~ParametricModel() = default;

  virtual std::string_view name() const = 0;
  virtual int dimension() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  virtual Support support() const = 0;
  virtual bool in_domain(const Vector& theta) const = 0;
  /// Parameters constrained to be positive; these are optimized on log scale.
  virtual std::vector<bool> positive_parameters() const = 0;

  virtual double log_density(const Vector& theta, double x) const = 0;
  virtual double density(const Vector& theta, double x) const;
  /// u_theta(x) = d/dtheta log f_theta(x)
  virtual Vector score(const Vector& theta, double x) const = 0;
  /// I_theta(x) = -d/dtheta u_theta(x)
  virtual Matrix information(const Vector& theta, double x) const = 0;

  virtual double sample(const Vector& theta, RngStream& rng) const = 0;

  /// Quadrature settings whose map is centered on the bulk of f_theta.
  virtual QuadratureSpec quadrature_hint(const Vector& theta) const = 0;

  /// Moment-type starting value.
  virtual Vector initial_estimate(std::span<const double> data) const = 0;
  /// Outlier-resistant starting value (median / MAD type).
  virtual Vector robust_estimate(std::span<const double> data) const = 0;

  bool in_support(double x) const;

  // Closed-form hooks.
  /// int f^c dx
  virtual std::optional<double> power_integral_hook(const Vector&, double) const { return {}; }
  /// int u f^c dx
  virtual std::optional<Vector> score_integral_hook(const Vector&, double) const { return {}; }
  /// int u u^T f^c dx
  virtual std::optional<Matrix> score_outer_integral_hook(const Vector&, double) const { return {}; }
  /// int f_{theta2}^gamma f_{theta1} dx
  virtual std::optional<double> cross_integral_hook(const Vector&, const Vector&, double) const {
    return {};
  }
  /// Kullback-Leibler divergence of f_{theta2} from f_{theta1}.
  virtual std::optional<double> kullback_leibler_hook(const Vector&, const Vector&) const {
    return {};
  }
  virtual std::optional<Vector> mle_hook(std::span<const double>) const { return {}; }
  virtual std::optional<Vector> restricted_mle_hook(std::span<const double>,
                                                    const ConstraintSpec&) const {
    return {};
  }
};

using ModelPtr = std::shared_ptr<const ParametricModel>;

// Quadrature helpers over the model support (hooks first, quadrature otherwise).
double integrate_over_support(const ParametricModel& model, const Vector& theta,
                              const Integrand& f, double rel_tol = 1e-10, double abs_tol = 1e-13);
double power_integral(const ParametricModel& model, const Vector& theta, double c);
Vector score_integral(const ParametricModel& model, const Vector& theta, double c);
Matrix score_outer_integral(const ParametricModel& model, const Vector& theta, double c);
double cross_integral(const ParametricModel& model, const Vector& theta1, const Vector& theta2,
                      double gamma);

/// Normal location-scale family, theta = (mu, sigma).
class NormalModel final : public ParametricModel {
 public:
  std::string_view name() const override { return "normal"; }
  int dimension() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return {"mu", "sigma"}; }
  Support support() const override { return Support::RealLine; }
  bool in_domain(const Vector& theta) const override;
  std::vector<bool> positive_parameters() const override { return {false, true}; }

  double log_density(const Vector& theta, double x) const override;
  Vector score(const Vector& theta, double x) const override;
  Matrix information(const Vector& theta, double x) const override;
  double sample(const Vector& theta, RngStream& rng) const override;
  QuadratureSpec quadrature_hint(const Vector& theta) const override;
  Vector initial_estimate(std::span<const double> data) const override;
  Vector robust_estimate(std::span<const double> data) const override;

  std::optional<double> power_integral_hook(const Vector& theta, double c) const override;
  std::optional<Vector> score_integral_hook(const Vector& theta, double c) const override;
  std::optional<Matrix> score_outer_integral_hook(const Vector& theta, double c) const override;
  std::optional<double> cross_integral_hook(const Vector& theta1, const Vector& theta2,
                                            double gamma) const override;
  std::optional<double> kullback_leibler_hook(const Vector& theta1,
                                              const Vector& theta2) const override;
  std::optional<Vector> mle_hook(std::span<const double> data) const override;
  std::optional<Vector> restricted_mle_hook(std::span<const double> data,
                                            const ConstraintSpec& constraint) const override;
};

/// Two-parameter Weibull family, theta = (sigma scale, p shape), x > 0.
class WeibullModel final : public ParametricModel {
 public:
  std::string_view name() const override { return "weibull"; }
  int dimension() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return {"sigma", "p"}; }
  Support support() const override { return Support::PositiveHalfLine; }
  bool in_domain(const Vector& theta) const override;
  std::vector<bool> positive_parameters() const override { return {true, true}; }

  double log_density(const Vector& theta, double x) const override;
  double density(const Vector& theta, double x) const override;
  Vector score(const Vector& theta, double x) const override;
  Matrix information(const Vector& theta, double x) const override;
  double sample(const Vector& theta, RngStream& rng) const override;
  QuadratureSpec quadrature_hint(const Vector& theta) const override;
  Vector initial_estimate(std::span<const double> data) const override;
  Vector robust_estimate(std::span<const double> data) const override;

  std::optional<double> power_integral_hook(const Vector& theta, double c) const override;
  std::optional<Vector> score_integral_hook(const Vector& theta, double c) const override;
  std::optional<Matrix> score_outer_integral_hook(const Vector& theta, double c) const override;
  std::optional<double> cross_integral_hook(const Vector& theta1, const Vector& theta2,
                                            double gamma) const override;
  std::optional<double> kullback_leibler_hook(const Vector& theta1,
                                              const Vector& theta2) const override;
};

// Weibull helper integrals, theta = (sigma, p).

/// xi_{alpha,b}(theta) = int (x/sigma)^alpha f^b dx, in closed form via the gamma function.
double weibull_xi(double alpha, double b, const Vector& theta);

/// eta_{alpha,b,c}(theta) = int (x/sigma)^alpha log(x/sigma)^b f^c dx.
/// b = 0 routes to weibull_xi; otherwise evaluated by quadrature.
double weibull_eta(double alpha, int b, double c, const Vector& theta);

/// R_c(theta) = int u u^T f^c dx assembled from xi / eta terms.
Matrix weibull_R(double c, const Vector& theta);

/// int f_{theta2}^gamma f_{theta1} dx by quadrature.
double weibull_psi(double gamma, const Vector& theta1, const Vector& theta2);

/// Equality restrictions g(theta) = 0 (r of them) with p x r Jacobian G = d g^T / d theta.
class ConstraintSpec {
 public:
  using GFunction = std::function<Vector(const Vector&)>;
  using JacobianFunction = std::function<Matrix(const Vector&)>;

  ConstraintSpec(int dimension, int restrictions, GFunction g, JacobianFunction jacobian,
                 std::string label);

  /// theta[index] = value.
  static ConstraintSpec pin(int dimension, int index, double value, std::string label);

  int dimension() const noexcept { return dimension_; }
  int restrictions() const noexcept { return restrictions_; }
  const std::string& label() const noexcept { return label_; }

  Vector g(const Vector& theta) const { return g_(theta); }
  Matrix G(const Vector& theta) const { return jacobian_(theta); }

  /// Coordinates fixed by the constraint, empty for general constraints.
  const std::vector<std::pair<int, double>>& pinned() const noexcept { return pinned_; }
  bool is_pinning() const noexcept { return !pinned_.empty(); }

  /// Throws InvalidConstraint when rank(G(theta)) != r.
  void check_rank(const Vector& theta) const;

  /// Pinning constraints: free coordinates <-> full parameter.
  std::vector<int> free_indices() const;
  Vector embed(const Vector& free) const;

 private:
  int dimension_;
  int restrictions_;
  GFunction g_;
  JacobianFunction jacobian_;
  std::string label_;
  std::vector<std::pair<int, double>> pinned_;
};

/// H0: mu = mu0 under the normal model.
ConstraintSpec normal_mean_constraint(double mu0);
/// H0: sigma = sigma0 under the Weibull model.
ConstraintSpec weibull_scale_constraint(double sigma0);

}  // namespace dpd
