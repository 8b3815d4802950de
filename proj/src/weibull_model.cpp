#include <cmath>
#include <numbers>
#include <vector>

#include "dpd/errors.hpp"
#include "dpd/models.hpp"
#include "dpd/stats_util.hpp"

namespace dpd {
namespace {

// Interquartile range of log(E), E ~ Exp(1): log(-log 0.25) - log(-log 0.75).
const double kLogExpIqr = std::log(std::log(4.0)) - std::log(-std::log(0.75));

std::vector<double> logs_of(std::span<const double> data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (double x : data) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(ErrorKind::DomainError, "Weibull data must be positive and finite");
    }
    out.push_back(std::log(x));
  }
  return out;
}

}  // namespace

double weibull_xi(double alpha, double b, const Vector& theta) {
  const double sigma = theta[0];
  const double p = theta[1];
  const double s = (b * p - b + alpha + 1.0) / p;
  if (!(s > 0.0) || !(b > 0.0)) {
    throw Error(ErrorKind::DomainError, "xi integral diverges for these arguments");
  }
  return std::exp((b - 1.0) * std::log(p / sigma) - s * std::log(b) + std::lgamma(s));
}

double weibull_eta(double alpha, int b, double c, const Vector& theta) {
  if (b == 0) return weibull_xi(alpha, c, theta);
  const double sigma = theta[0];
  const double p = theta[1];
  const double a = alpha + c * p - c;
  const double s = (a + 1.0) / p;
  if (!(s > 0.0) || !(c > 0.0)) {
    throw Error(ErrorKind::DomainError, "eta integral diverges for these arguments");
  }
  // y = w^{1/p}: int y^a (log y)^b e^{-c y^p} dy = p^{-b-1} int w^{s-1} (log w)^b e^{-c w} dw
  QuadratureSpec spec;
  spec.domain = Domain::PositiveHalfLine;
  spec.scale = std::max(s, 1.0) / c;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-15;
  spec.max_subdivisions = 4000;
  const double core = integrate(
      [&](double w) {
        if (w <= 0.0) return 0.0;
        const double lw = std::log(w);
        return std::exp((s - 1.0) * lw - c * w) * std::pow(lw, b);
      },
      spec);
  return sigma * std::pow(p / sigma, c) * std::pow(p, -b - 1.0) * core;
}

Matrix weibull_R(double c, const Vector& theta) {
  const double sigma = theta[0];
  const double p = theta[1];
  const double xi0 = weibull_xi(0.0, c, theta);
  const double xip = weibull_xi(p, c, theta);
  const double xi2p = weibull_xi(2.0 * p, c, theta);
  const double e01 = weibull_eta(0.0, 1, c, theta);
  const double ep1 = weibull_eta(p, 1, c, theta);
  const double e2p1 = weibull_eta(2.0 * p, 1, c, theta);
  const double e02 = weibull_eta(0.0, 2, c, theta);
  const double ep2 = weibull_eta(p, 2, c, theta);
  const double e2p2 = weibull_eta(2.0 * p, 2, c, theta);

  Matrix r(2, 2);
  r(0, 0) = (p / sigma) * (p / sigma) * (xi0 - 2.0 * xip + xi2p);
  r(0, 1) = (p / sigma) * (-xi0 / p - e01 + 2.0 * ep1 + xip / p - e2p1);
  r(1, 0) = r(0, 1);
  r(1, 1) = xi0 / (p * p) + e02 + e2p2 + 2.0 / p * e01 - 2.0 * ep2 - 2.0 / p * ep1;
  return r;
}

double weibull_psi(double gamma, const Vector& theta1, const Vector& theta2) {
  if (gamma == 0.0) return 1.0;
  const WeibullModel model;
  const double sigma1 = theta1[0];
  const double p1 = theta1[1];
  // x = sigma1 w^{1/p1} turns f_{theta1}(x) dx into e^{-w} dw.
  QuadratureSpec spec;
  spec.domain = Domain::PositiveHalfLine;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-15;
  spec.max_subdivisions = 4000;
  return integrate(
      [&](double w) {
        if (w <= 0.0) return 0.0;
        const double x = sigma1 * std::pow(w, 1.0 / p1);
        if (!(x > 0.0)) return 0.0;
        return std::exp(gamma * model.log_density(theta2, x) - w);
      },
      spec);
}

bool WeibullModel::in_domain(const Vector& theta) const {
  return theta.size() == 2 && std::isfinite(theta[0]) && std::isfinite(theta[1]) &&
         theta[0] > 0.0 && theta[1] > 0.0;
}

double WeibullModel::log_density(const Vector& theta, double x) const {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double sigma = theta[0];
  const double p = theta[1];
  const double lz = std::log(x / sigma);
  return std::log(p / sigma) + (p - 1.0) * lz - std::exp(p * lz);
}

double WeibullModel::density(const Vector& theta, double x) const {
  if (!(x > 0.0)) return 0.0;
  return std::exp(log_density(theta, x));
}

Vector WeibullModel::score(const Vector& theta, double x) const {
  const double sigma = theta[0];
  const double p = theta[1];
  const double lz = std::log(x / sigma);
  const double zp = std::exp(p * lz);
  Vector u(2);
  u << (p / sigma) * (zp - 1.0), 1.0 / p + lz - zp * lz;
  return u;
}

Matrix WeibullModel::information(const Vector& theta, double x) const {
  const double sigma = theta[0];
  const double p = theta[1];
  const double lz = std::log(x / sigma);
  const double zp = std::exp(p * lz);
  Matrix info(2, 2);
  info(0, 0) = (-p + p * (1.0 + p) * zp) / (sigma * sigma);
  info(0, 1) = (1.0 - zp - p * zp * lz) / sigma;
  info(1, 0) = info(0, 1);
  info(1, 1) = 1.0 / (p * p) + zp * lz * lz;
  return info;
}

double WeibullModel::sample(const Vector& theta, RngStream& rng) const {
  return theta[0] * std::pow(-std::log(rng.next_uniform()), 1.0 / theta[1]);
}

QuadratureSpec WeibullModel::quadrature_hint(const Vector& theta) const {
  QuadratureSpec spec;
  spec.domain = Domain::PositiveHalfLine;
  spec.scale = theta[0];
  spec.max_subdivisions = 4000;
  return spec;
}

// log X = log sigma + G / p with G standard minimum-Gumbel:
// E G = -euler_gamma, sd G = pi / sqrt(6).
Vector WeibullModel::initial_estimate(std::span<const double> data) const {
  const auto lx = logs_of(data);
  const double sd = std::sqrt(central_second_moment(lx));
  if (!(sd > 0.0)) throw Error(ErrorKind::DegenerateData, "log data have zero spread");
  const double p = std::numbers::pi / (std::sqrt(6.0) * sd);
  Vector theta(2);
  theta << std::exp(mean(lx) + std::numbers::egamma / p), p;
  return theta;
}

Vector WeibullModel::robust_estimate(std::span<const double> data) const {
  const auto lx = logs_of(data);
  const double iqr = quantile(lx, 0.75) - quantile(lx, 0.25);
  if (!(iqr > 0.0)) return initial_estimate(data);
  const double p = kLogExpIqr / iqr;
  Vector theta(2);
  theta << std::exp(median(lx) - std::log(std::log(2.0)) / p), p;
  return theta;
}

std::optional<double> WeibullModel::power_integral_hook(const Vector& theta, double c) const {
  return weibull_xi(0.0, c, theta);
}

std::optional<Vector> WeibullModel::score_integral_hook(const Vector& theta, double c) const {
  const double sigma = theta[0];
  const double p = theta[1];
  const double xi0 = weibull_xi(0.0, c, theta);
  Vector v(2);
  v << (p / sigma) * (weibull_xi(p, c, theta) - xi0),
      xi0 / p + weibull_eta(0.0, 1, c, theta) - weibull_eta(p, 1, c, theta);
  return v;
}

std::optional<Matrix> WeibullModel::score_outer_integral_hook(const Vector& theta,
                                                              double c) const {
  return weibull_R(c, theta);
}

std::optional<double> WeibullModel::cross_integral_hook(const Vector& theta1, const Vector& theta2,
                                                        double gamma) const {
  return weibull_psi(gamma, theta1, theta2);
}

std::optional<double> WeibullModel::kullback_leibler_hook(const Vector& theta1,
                                                          const Vector& theta2) const {
  const double s1 = theta1[0];
  const double p1 = theta1[1];
  const double s2 = theta2[0];
  const double p2 = theta2[1];
  const double elog = weibull_eta(0.0, 1, 1.0, theta1);
  const double own = std::log(p1) - std::log(s1) + (p1 - 1.0) * elog - weibull_xi(p1, 1.0, theta1);
  const double other = std::log(p2) - std::log(s2) + (p2 - 1.0) * (std::log(s1 / s2) + elog) -
                       std::pow(s1 / s2, p2) * weibull_xi(p2, 1.0, theta1);
  return own - other;
}

}  // namespace dpd
