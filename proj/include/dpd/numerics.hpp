#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace dpd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Quadrature

enum class Domain { RealLine, PositiveHalfLine, Interval };

/// Adaptive Gauss-Kronrod (10/21) quadrature. Infinite ranges are mapped onto
/// a finite interval: x = center + scale * t / (1 - t^2) on the real line and
/// x = scale * t / (1 - t) on the positive half-line. `center` and `scale`
/// should roughly locate the bulk of the integrand.
struct QuadratureSpec {
  Domain domain = Domain::RealLine;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 1000;
  double center = 0.0;
  double scale = 1.0;
  double lower = 0.0;  // Interval only
  double upper = 1.0;  // Interval only

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

using Integrand = std::function<double(double)>;

QuadratureResult integrate_detailed(const Integrand& f, const QuadratureSpec& spec);
double integrate(const Integrand& f, const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// Minimization

enum class OptimizerMethod { NelderMead, GradientLineSearch };

struct OptimizerSpec {
  OptimizerMethod method = OptimizerMethod::NelderMead;
  double x_tol = 1e-10;
  double f_tol = 1e-14;
  double g_tol = 1e-9;  // gradient mode only
  int max_iters = 20000;
  int restarts = 2;  // simplex restarts from the incumbent
  double initial_step = 0.1;
  double unbounded_threshold = -1e100;

  void validate() const;
};

struct MinimizeResult {
  Vector x;
  double f = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

using Objective = std::function<double(const Vector&)>;
using Gradient = std::function<Vector(const Vector&)>;

/// Derivative-free simplex search. Points below `lower_bounds` are rejected.
/// Running out of iterations returns the best point with converged = false.
MinimizeResult minimize(const Objective& f, const Vector& x0, const OptimizerSpec& spec = {},
                        const std::optional<Vector>& lower_bounds = std::nullopt);

/// Quasi-Newton descent with backtracking line search. Falls back to
/// finite differences when `grad` is empty.
MinimizeResult minimize(const Objective& f, const Gradient& grad, const Vector& x0,
                        const OptimizerSpec& spec,
                        const std::optional<Vector>& lower_bounds = std::nullopt);

Vector central_gradient(const Objective& f, const Vector& x, double rel_step = 1e-6);

// ---------------------------------------------------------------------------
// Linear algebra

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // columns, orthonormal
};

SymmetricEigen symmetric_eigen(const Matrix& m);

/// Inverse of a symmetric positive definite matrix; NotPositiveDefinite otherwise.
Matrix spd_inverse(const Matrix& m);

// ---------------------------------------------------------------------------
// Distributions used for p-values and quantiles

double normal_cdf(double x);
double normal_sf(double x);
double normal_quantile(double p);
double student_t_cdf(double x, double df);
double student_t_sf(double x, double df);
double student_t_quantile(double p, double df);
double chi_square_sf(double x, double df);
double chi_square_quantile(double p, double df);

}  // namespace dpd
