#include "dpd/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpd/errors.hpp"

namespace dpd {
namespace {

constexpr double kDensityFloor = 1e-300;

void require_domain(const ParametricModel& model, const Vector& theta) {
  if (theta.size() != model.dimension() || !model.in_domain(theta)) {
    std::ostringstream msg;
    msg << "parameter outside the " << model.name() << " parameter space";
    throw Error(ErrorKind::DomainError, msg.str());
  }
}

void require_tuning(double value, const char* what) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::DomainError, std::string(what) + " must be finite and >= 0");
  }
}

}  // namespace

void DivergenceConfig::validate() const {
  require_tuning(beta, "beta");
  require_tuning(gamma, "gamma");
}

void require_in_support(const ParametricModel& model, std::span<const double> data) {
  if (data.empty()) throw Error(ErrorKind::DegenerateData, "empty sample");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!model.in_support(data[i])) {
      std::ostringstream msg;
      msg << "observation " << i + 1 << " (" << data[i] << ") outside the " << model.name()
          << " support";
      throw Error(ErrorKind::DomainError, msg.str());
    }
  }
}

double dpd(const ParametricModel& model, const Vector& theta1, const Vector& theta2, double gamma) {
  require_domain(model, theta1);
  require_domain(model, theta2);
  require_tuning(gamma, "gamma");
  if (theta1 == theta2) return 0.0;

  if (gamma < kLimitThreshold) {
    if (auto kl = model.kullback_leibler_hook(theta1, theta2)) return *kl;
    return dpd_quadrature(model, theta1, theta2, 0.0);
  }
  if (!model.cross_integral_hook(theta1, theta2, gamma)) {
    return dpd_quadrature(model, theta1, theta2, gamma);
  }
  return power_integral(model, theta2, 1.0 + gamma) -
         (1.0 + 1.0 / gamma) * cross_integral(model, theta1, theta2, gamma) +
         power_integral(model, theta1, 1.0 + gamma) / gamma;
}

double dpd_quadrature(const ParametricModel& model, const Vector& theta1, const Vector& theta2,
                      double gamma) {
  require_domain(model, theta1);
  require_domain(model, theta2);
  require_tuning(gamma, "gamma");
  const bool kl = gamma < kLimitThreshold;
  const auto integrand = [&](double x) {
    const double f1 = std::max(model.density(theta1, x), kDensityFloor);
    const double f2 = std::max(model.density(theta2, x), kDensityFloor);
    if (kl) return f1 * (std::log(f1) - std::log(f2));
    const double f2g = std::pow(f2, gamma);
    return f2g * f2 - (1.0 + 1.0 / gamma) * f2g * f1 + std::pow(f1, 1.0 + gamma) / gamma;
  };
  // Split the work between the two bulks when they sit far apart.
  QuadratureSpec spec = model.quadrature_hint(theta1);
  const QuadratureSpec other = model.quadrature_hint(theta2);
  if (spec.domain == Domain::RealLine) {
    spec.center = 0.5 * (spec.center + other.center);
    spec.scale = std::max(spec.scale, other.scale) + 0.5 * std::abs(spec.center - other.center);
  } else {
    spec.scale = std::sqrt(spec.scale * other.scale);
  }
  spec.rel_tol = 1e-11;
  spec.abs_tol = 1e-14;
  spec.max_subdivisions = std::max(spec.max_subdivisions, 4000);
  return integrate(integrand, spec);
}

double empirical_objective(const ParametricModel& model, const Vector& theta,
                           std::span<const double> data, double beta) {
  require_domain(model, theta);
  require_tuning(beta, "beta");
  require_in_support(model, data);
  const double n = static_cast<double>(data.size());
  if (beta < kLimitThreshold) {
    double s = 0.0;
    for (double x : data) s += model.log_density(theta, x);
    return -s / n;
  }
  double s = 0.0;
  for (double x : data) s += std::exp(beta * model.log_density(theta, x));
  return power_integral(model, theta, 1.0 + beta) - (1.0 + 1.0 / beta) * s / n;
}

Vector estimating_function(const ParametricModel& model, const Vector& theta,
                           std::span<const double> data, double beta) {
  require_domain(model, theta);
  require_tuning(beta, "beta");
  require_in_support(model, data);
  const double n = static_cast<double>(data.size());
  Vector s = Vector::Zero(model.dimension());
  if (beta < kLimitThreshold) {
    for (double x : data) s += model.score(theta, x);
    return s / n;
  }
  for (double x : data) s += model.score(theta, x) * std::exp(beta * model.log_density(theta, x));
  return s / n - score_integral(model, theta, 1.0 + beta);
}

}  // namespace dpd
