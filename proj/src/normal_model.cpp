#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dpd/errors.hpp"
#include "dpd/models.hpp"
#include "dpd/stats_util.hpp"

namespace dpd {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

bool NormalModel::in_domain(const Vector& theta) const {
  return theta.size() == 2 && std::isfinite(theta[0]) && std::isfinite(theta[1]) && theta[1] > 0.0;
}

double NormalModel::log_density(const Vector& theta, double x) const {
  const double z = (x - theta[0]) / theta[1];
  return -0.5 * std::log(kTwoPi) - std::log(theta[1]) - 0.5 * z * z;
}

Vector NormalModel::score(const Vector& theta, double x) const {
  const double s = theta[1];
  const double z = (x - theta[0]) / s;
  Vector u(2);
  u << z / s, (z * z - 1.0) / s;
  return u;
}

Matrix NormalModel::information(const Vector& theta, double x) const {
  const double s = theta[1];
  const double d = x - theta[0];
  Matrix info(2, 2);
  info << 1.0 / (s * s), 2.0 * d / (s * s * s),
      2.0 * d / (s * s * s), 3.0 * d * d / (s * s * s * s) - 1.0 / (s * s);
  return info;
}

double NormalModel::sample(const Vector& theta, RngStream& rng) const {
  return theta[0] + theta[1] * rng.next_gaussian();
}

QuadratureSpec NormalModel::quadrature_hint(const Vector& theta) const {
  QuadratureSpec spec;
  spec.domain = Domain::RealLine;
  spec.center = theta[0];
  spec.scale = theta[1];
  return spec;
}

Vector NormalModel::initial_estimate(std::span<const double> data) const {
  Vector theta(2);
  theta << mean(data), std::sqrt(central_second_moment(data));
  return theta;
}

Vector NormalModel::robust_estimate(std::span<const double> data) const {
  const double med = median(data);
  double scale = 1.4826 * median_absolute_deviation(data);
  if (!(scale > 0.0)) scale = std::sqrt(central_second_moment(data));
  Vector theta(2);
  theta << med, scale;
  return theta;
}

// int f^c = (2 pi)^{(1-c)/2} sigma^{1-c} c^{-1/2}
std::optional<double> NormalModel::power_integral_hook(const Vector& theta, double c) const {
  if (!(c > 0.0)) return {};
  return std::pow(kTwoPi, 0.5 * (1.0 - c)) * std::pow(theta[1], 1.0 - c) / std::sqrt(c);
}

// f^c is proportional to a normal density with variance sigma^2 / c.
std::optional<Vector> NormalModel::score_integral_hook(const Vector& theta, double c) const {
  const auto mass = power_integral_hook(theta, c);
  if (!mass) return {};
  Vector v(2);
  v << 0.0, *mass * (1.0 / c - 1.0) / theta[1];
  return v;
}

std::optional<Matrix> NormalModel::score_outer_integral_hook(const Vector& theta, double c) const {
  const auto mass = power_integral_hook(theta, c);
  if (!mass) return {};
  const double s2 = theta[1] * theta[1];
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = *mass / (c * s2);
  m(1, 1) = *mass * (3.0 / (c * c) - 2.0 / c + 1.0) / s2;
  return m;
}

std::optional<double> NormalModel::cross_integral_hook(const Vector& theta1, const Vector& theta2,
                                                       double gamma) const {
  if (gamma == 0.0) return 1.0;
  if (!(gamma > 0.0)) return {};
  const double s2sq = theta2[1] * theta2[1];
  const double s1sq = theta1[1] * theta1[1];
  const double v = s2sq / gamma;
  const double total_var = v + s1sq;
  const double d = theta1[0] - theta2[0];
  const double gauss = std::exp(-0.5 * d * d / total_var) / std::sqrt(kTwoPi * total_var);
  return std::pow(kTwoPi * s2sq, -0.5 * gamma) * std::sqrt(kTwoPi * v) * gauss;
}

std::optional<double> NormalModel::kullback_leibler_hook(const Vector& theta1,
                                                         const Vector& theta2) const {
  const double s1 = theta1[1];
  const double s2 = theta2[1];
  const double d = theta1[0] - theta2[0];
  return std::log(s2 / s1) - 0.5 + 0.5 * (s1 * s1) / (s2 * s2) + d * d / (2.0 * s2 * s2);
}

std::optional<Vector> NormalModel::mle_hook(std::span<const double> data) const {
  return initial_estimate(data);
}

std::optional<Vector> NormalModel::restricted_mle_hook(std::span<const double> data,
                                                       const ConstraintSpec& constraint) const {
  if (!constraint.is_pinning() || constraint.pinned().size() != 1) return {};
  const auto [index, value] = constraint.pinned().front();
  Vector theta(2);
  if (index == 0) {
    double ss = 0.0;
    for (double x : data) ss += (x - value) * (x - value);
    theta << value, std::sqrt(ss / static_cast<double>(data.size()));
  } else {
    theta << mean(data), value;
  }
  return theta;
}

}  // namespace dpd
