#include <cmath>
#include <sstream>

#include "dpd/asymptotics.hpp"
#include "dpd/divergence.hpp"
#include "dpd/errors.hpp"
#include "dpd/estimation.hpp"
#include "dpd/stats_util.hpp"
#include "dpd/testing.hpp"

namespace dpd {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::DomainError, "alpha must lie in (0, 1)");
}

struct Fitted {
  EstimationResult hat;
  EstimationResult tilde;
  double statistic = 0.0;
  NullSpectrum spectrum;
};

Fitted fit_and_score(const ParametricModel& model, std::span<const double> data, double beta,
                     double gamma, const ConstraintSpec& constraint, const TestOptions& options) {
  check_alpha(options.alpha);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::DomainError, "gamma must be finite and >= 0");
  }
  Fitted f;
  f.hat = fit_mdpde(model, data, beta);
  f.tilde = fit_rmdpde(model, data, beta, constraint);
  const double n = static_cast<double>(data.size());
  f.statistic = std::max(0.0, 2.0 * n * dpd(model, f.hat.theta_hat, f.tilde.theta_hat, gamma));
  const Vector& at =
      options.eigen_point == EigenPoint::Restricted ? f.tilde.theta_hat : f.hat.theta_hat;
  f.spectrum = null_spectrum(model, at, beta, gamma, constraint);
  return f;
}

}  // namespace

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
  }
  return "two-sided";
}

Alternative parse_alternative(const std::string& s) {
  if (s == "two-sided") return Alternative::TwoSided;
  if (s == "greater") return Alternative::Greater;
  if (s == "less") return Alternative::Less;
  throw Error(ErrorKind::DomainError, "unknown alternative '" + s + "'");
}

TestResult dpd_test(const ParametricModel& model, std::span<const double> data, double beta,
                    double gamma, const ConstraintSpec& constraint, const TestOptions& options) {
  const Fitted f = fit_and_score(model, data, beta, gamma, constraint, options);

  ChiSquareMixture mix;
  mix.weights = f.spectrum.eigenvalues;
  mix.mc_draws = options.mc_draws;
  mix.seed = options.seed;
  mix.force_monte_carlo = options.force_monte_carlo;
  if (!mix.exact_route() && options.alpha < 10.0 / static_cast<double>(options.mc_draws)) {
    std::ostringstream msg;
    msg << "alpha = " << options.alpha << " is below 10 / mc_draws";
    throw Error(ErrorKind::MCUnderResolved, msg.str());
  }
  const MixtureDistribution dist(mix);

  TestResult r;
  r.statistic = f.statistic;
  r.eigenvalues = f.spectrum.eigenvalues;
  r.p_value = dist.pvalue(f.statistic);
  r.critical_value = dist.quantile(options.alpha);
  r.alpha = options.alpha;
  r.alternative = Alternative::TwoSided;
  r.theta_hat = f.hat.theta_hat;
  r.theta_tilde = f.tilde.theta_hat;
  r.beta = beta;
  r.gamma = gamma;
  r.method = mix.exact_route() ? "T / lambda_1 against chi-square(1)"
                               : "chi-square mixture, Monte Carlo";
  r.n = data.size();
  return r;
}

TestResult signed_one_sided_test(const ParametricModel& model, std::span<const double> data,
                                 double beta, double gamma, const ConstraintSpec& constraint,
                                 Alternative direction, const TestOptions& options) {
  if (!constraint.is_pinning() || constraint.restrictions() != 1) {
    throw Error(ErrorKind::InvalidConstraint,
                "the signed test needs a single pinned coordinate, e.g. mu = mu0");
  }
  const auto [index, value] = constraint.pinned().front();
  const Fitted f = fit_and_score(model, data, beta, gamma, constraint, options);
  const double lambda = f.spectrum.eigenvalues[0];
  const double diff = f.hat.theta_hat[index] - value;
  const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  const double z = sign * std::sqrt(f.statistic / lambda);
  const double df = static_cast<double>(data.size()) - 1.0;

  TestResult r;
  r.statistic = z;
  r.eigenvalues = f.spectrum.eigenvalues;
  r.alpha = options.alpha;
  r.alternative = direction;
  r.theta_hat = f.hat.theta_hat;
  r.theta_tilde = f.tilde.theta_hat;
  r.beta = beta;
  r.gamma = gamma;
  r.method = "signed root of T / lambda_1, normal reference";
  r.n = data.size();
  switch (direction) {
    case Alternative::Greater:
      r.p_value = normal_sf(z);
      r.t_p_value = student_t_sf(z, df);
      r.chi_bar_p_value = z > 0.0 ? normal_sf(z) : 1.0;
      r.critical_value = normal_quantile(1.0 - options.alpha);
      break;
    case Alternative::Less:
      r.p_value = normal_cdf(z);
      r.t_p_value = student_t_cdf(z, df);
      r.chi_bar_p_value = z < 0.0 ? normal_cdf(z) : 1.0;
      r.critical_value = normal_quantile(options.alpha);
      break;
    case Alternative::TwoSided:
      r.p_value = 2.0 * normal_sf(std::abs(z));
      r.t_p_value = 2.0 * student_t_sf(std::abs(z), df);
      r.critical_value = normal_quantile(1.0 - 0.5 * options.alpha);
      break;
  }
  r.df = df;
  return r;
}

TestResult t_test(std::span<const double> data, double mu0, Alternative alternative,
                  double alpha) {
  check_alpha(alpha);
  if (data.size() < 2) throw Error(ErrorKind::DegenerateData, "need at least two observations");
  const double var = sample_variance(data);
  if (!(var > 0.0)) throw Error(ErrorKind::DegenerateData, "sample variance is zero");
  const double n = static_cast<double>(data.size());
  const double df = n - 1.0;
  const double t = (mean(data) - mu0) / std::sqrt(var / n);

  TestResult r;
  r.statistic = t;
  r.alpha = alpha;
  r.alternative = alternative;
  r.method = "one-sample Student t";
  r.n = data.size();
  r.df = df;
  switch (alternative) {
    case Alternative::TwoSided:
      r.p_value = 2.0 * student_t_sf(std::abs(t), df);
      r.critical_value = student_t_quantile(1.0 - 0.5 * alpha, df);
      break;
    case Alternative::Greater:
      r.p_value = student_t_sf(t, df);
      r.critical_value = student_t_quantile(1.0 - alpha, df);
      break;
    case Alternative::Less:
      r.p_value = student_t_cdf(t, df);
      r.critical_value = student_t_quantile(alpha, df);
      break;
  }
  return r;
}

}  // namespace dpd
