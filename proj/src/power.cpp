#include "dpd/power.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dpd/divergence.hpp"
#include "dpd/errors.hpp"

namespace dpd {
namespace {

constexpr double kDegenerateVariance = 1e-12;

// Positive coordinates on log scale.
struct LogMap {
  std::vector<bool> positive;
  Vector to_theta(const Vector& phi) const {
    Vector t = phi;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (positive[static_cast<std::size_t>(i)]) t[i] = std::exp(phi[i]);
    }
    return t;
  }
  Vector to_phi(const Vector& theta) const {
    Vector p = theta;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (positive[static_cast<std::size_t>(i)]) p[i] = std::log(theta[i]);
    }
    return p;
  }
};

OptimizerSpec projection_optimizer() {
  OptimizerSpec spec;
  spec.x_tol = 1e-11;
  spec.f_tol = 1e-16;
  spec.restarts = 3;
  return spec;
}

double safe_divergence(const ParametricModel& model, const Vector& a, const Vector& b,
                       double gamma) {
  if (!model.in_domain(b)) return std::numeric_limits<double>::infinity();
  try {
    return dpd(model, a, b, gamma);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::abs(x[i]));
    Vector up = x, down = x;
    up[i] += h;
    down[i] -= h;
    g[i] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

}  // namespace

Vector population_projection(const ParametricModel& model, const Vector& theta_star,
                             const ConstraintSpec& constraint, double beta) {
  const int p = model.dimension();
  if (theta_star.size() != p || !model.in_domain(theta_star)) {
    throw Error(ErrorKind::DomainError, "theta_star is outside the parameter space");
  }
  const auto positive = model.positive_parameters();
  const OptimizerSpec opt = projection_optimizer();

  if (constraint.is_pinning()) {
    const auto free = constraint.free_indices();
    Vector base = theta_star;
    for (const auto& [i, v] : constraint.pinned()) base[i] = v;
    if (!model.in_domain(base)) {
      throw Error(ErrorKind::ConstraintInfeasible, "pinned values leave the parameter space");
    }
    LogMap map;
    for (int i : free) map.positive.push_back(positive[static_cast<std::size_t>(i)]);
    const auto embed = [&](const Vector& phi) {
      Vector th = base;
      const Vector f = map.to_theta(phi);
      for (std::size_t k = 0; k < free.size(); ++k) th[free[k]] = f[static_cast<Eigen::Index>(k)];
      return th;
    };
    Vector start(static_cast<Eigen::Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) start[static_cast<Eigen::Index>(k)] = base[free[k]];
    const auto m = minimize(
        [&](const Vector& phi) { return safe_divergence(model, theta_star, embed(phi), beta); },
        map.to_phi(start), opt);
    return embed(m.x);
  }

  // Augmented Lagrangian from the Euclidean projection of theta_star.
  LogMap map{positive};
  Vector theta = theta_star;
  for (int k = 0; k < 50; ++k) {
    const Vector g = constraint.g(theta);
    if (g.lpNorm<Eigen::Infinity>() <= 1e-13) break;
    const Matrix G = constraint.G(theta);
    theta -= G * (G.transpose() * G).ldlt().solve(g);
  }
  if (!model.in_domain(theta)) theta = theta_star;
  Vector lambda = Vector::Zero(constraint.restrictions());
  double rho = 10.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < 60; ++outer) {
    const auto m = minimize(
        [&](const Vector& phi) {
          const Vector th = map.to_theta(phi);
          const double f = safe_divergence(model, theta_star, th, beta);
          if (!std::isfinite(f)) return f;
          const Vector g = constraint.g(th);
          return f + lambda.dot(g) + 0.5 * rho * g.squaredNorm();
        },
        map.to_phi(theta), opt);
    theta = map.to_theta(m.x);
    const Vector g = constraint.g(theta);
    const double violation = g.lpNorm<Eigen::Infinity>();
    lambda += rho * g;
    if (violation < 1e-11) break;
    if (violation > 0.25 * previous) rho *= 10.0;
    previous = violation;
  }
  for (int k = 0; k < 50; ++k) {
    const Vector g = constraint.g(theta);
    if (g.lpNorm<Eigen::Infinity>() <= 1e-13) break;
    const Matrix G = constraint.G(theta);
    theta -= G * (G.transpose() * G).ldlt().solve(g);
  }
  if (!model.in_domain(theta) || constraint.g(theta).lpNorm<Eigen::Infinity>() > 1e-8) {
    throw Error(ErrorKind::ConstraintInfeasible, "no feasible projection of theta_star");
  }
  return theta;
}

double PowerAnalysis::power(double n) const {
  if (!(n >= 2.0)) throw Error(ErrorKind::DomainError, "n must be at least 2");
  const double threshold = critical_value / (2.0 * n);
  if (degenerate) return divergence_gap > threshold ? 1.0 : 0.0;
  return normal_sf(std::sqrt(n / sigma2) * (threshold - divergence_gap));
}

PowerAnalysis analyze_power(const ParametricModel& model, const Vector& theta_star,
                            const ConstraintSpec& constraint, double beta, double gamma,
                            const PowerOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorKind::DomainError, "alpha must lie in (0, 1)");
  }
  const int p = model.dimension();
  PowerAnalysis a;
  a.theta_star = theta_star;
  a.alpha = options.alpha;
  a.beta = beta;
  a.gamma = gamma;
  a.theta_null_star = population_projection(model, theta_star, constraint, beta);
  const Vector& t0 = a.theta_null_star;
  a.divergence_gap = std::max(0.0, dpd(model, theta_star, t0, gamma));
  if (a.divergence_gap <= 0.0 || (theta_star - t0).norm() <= 1e-10 * (1.0 + theta_star.norm())) {
    throw Error(ErrorKind::DomainError, "theta_star lies in the null set");
  }

  a.t_vec = central_difference([&](const Vector& th) { return dpd(model, th, t0, gamma); },
                               theta_star);
  a.s_vec = central_difference([&](const Vector& th) { return dpd(model, theta_star, th, gamma); },
                               t0);

  // theta_hat: on-model sandwich at theta_star.
  const AsymptoticMatrices on = model_matrices(model, theta_star, beta, gamma);
  const Matrix J1inv = spd_inverse(on.J);
  const Matrix sigma11 = J1inv * on.K * J1inv;

  // theta_tilde: restricted M-estimator at theta_null_star with data from f_{theta_star}.
  const OffModelMatrices off = population_matrices(model, t0, beta, theta_star);
  AsymptoticMatrices restricted;
  restricted.J = off.J;
  restricted.K = off.K;
  attach_projection(restricted, constraint.G(t0));
  const Matrix& P = restricted.P;
  const Matrix sigma22 = P * off.K * P;

  // Cross-covariance of the two estimating functions under f_{theta_star}.
  const auto psi = [&](const Vector& th, double x) {
    return Vector(model.score(th, x) * std::pow(model.density(th, x), beta));
  };
  const Vector moments = model_expectation(
      model, theta_star,
      [&](double x) {
        const Vector a1 = psi(theta_star, x);
        const Vector a2 = psi(t0, x);
        Vector out(p * p);
        for (int i = 0; i < p; ++i) {
          for (int j = 0; j < p; ++j) out[i * p + j] = a1[i] * a2[j];
        }
        return out;
      },
      p * p);
  Matrix C(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) C(i, j) = moments[i * p + j];
  }
  C -= on.xi * off.xi_h.transpose();  // E psi1 = xi at theta_star, E psi2 = xi_h
  const Matrix A12 = J1inv * C * P;

  a.joint_cov.resize(2 * p, 2 * p);
  a.joint_cov << sigma11, A12, A12.transpose(), sigma22;
  a.joint_cov = 0.5 * (a.joint_cov + a.joint_cov.transpose()).eval();

  const double s2 = a.t_vec.dot(sigma11 * a.t_vec) + 2.0 * a.t_vec.dot(A12 * a.s_vec) +
                    a.s_vec.dot(sigma22 * a.s_vec);
  a.sigma2 = std::max(0.0, s2);
  a.degenerate = a.sigma2 <= kDegenerateVariance;

  const NullSpectrum null = null_spectrum(model, t0, beta, gamma, constraint);
  a.null_eigenvalues = null.eigenvalues;
  ChiSquareMixture mix;
  mix.weights = null.eigenvalues;
  mix.mc_draws = options.mc_draws;
  mix.seed = options.seed;
  a.critical_value = mixture_quantile(mix, options.alpha);
  return a;
}

double approximate_power(const ParametricModel& model, const Vector& theta_star,
                         const ConstraintSpec& constraint, double beta, double gamma, double n,
                         const PowerOptions& options) {
  return analyze_power(model, theta_star, constraint, beta, gamma, options).power(n);
}

std::int64_t required_sample_size(const PowerAnalysis& a, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw Error(ErrorKind::DomainError, "target power must lie in (0, 1)");
  }
  if (a.degenerate) {
    std::ostringstream msg;
    msg << "sigma^2 = " << a.sigma2 << " is too small for the normal approximation";
    throw Error(ErrorKind::DegenerateVariance, msg.str());
  }
  const double d = a.divergence_gap;
  if (!(d > 0.0)) throw Error(ErrorKind::DomainError, "divergence gap must be positive");
  // Positive root in sqrt(n) of d n + sigma z sqrt(n) - c / 2 = 0 with z = Phi^{-1}(1 - target);
  // for target >= 1/2 this is (A + B + sqrt(A (A + 2B))) / (2 d^2).
  const double sz = std::sqrt(a.sigma2) * normal_quantile(1.0 - target);
  const double root = (-sz + std::sqrt(sz * sz + 2.0 * d * a.critical_value)) / (2.0 * d);
  const double n_star = root * root;
  return static_cast<std::int64_t>(std::floor(n_star)) + 1;
}

std::int64_t required_sample_size(const ParametricModel& model, const Vector& theta_star,
                                  const ConstraintSpec& constraint, double beta, double gamma,
                                  double target, const PowerOptions& options) {
  return required_sample_size(analyze_power(model, theta_star, constraint, beta, gamma, options),
                              target);
}

ChiSquareMixture ContiguousSpec::mixture(std::int64_t mc_draws, std::uint64_t seed) const {
  ChiSquareMixture m;
  m.weights = spectrum.eigenvalues;
  m.shifts = w;
  m.offset = eta;
  m.mc_draws = mc_draws;
  m.seed = seed;
  return m;
}

ContiguousSpec contiguous_distribution(const ParametricModel& model, const Vector& theta0,
                                       const Vector& d, double beta, double gamma,
                                       const ConstraintSpec& constraint) {
  if (d.size() != model.dimension() || !d.allFinite()) {
    throw Error(ErrorKind::DomainError, "drift d must be a finite p-vector");
  }
  if (constraint.g(theta0).lpNorm<Eigen::Infinity>() > 1e-8) {
    throw Error(ErrorKind::ConstraintInfeasible, "theta0 is not in the null set");
  }
  const AsymptoticMatrices m = constrained_matrices(model, theta0, beta, gamma, constraint);
  ContiguousSpec spec;
  spec.d = d;
  spec.spectrum = null_spectrum(m, constraint.restrictions());
  const Vector mean_shift = m.B * m.J * d;
  const Vector projected = spec.spectrum.V.transpose() * spec.spectrum.S.transpose() * m.A * mean_shift;
  spec.w = projected.cwiseQuotient(spec.spectrum.eigenvalues);
  spec.eta = mean_shift.dot(m.A * mean_shift) -
             spec.w.dot(spec.spectrum.eigenvalues.cwiseProduct(spec.w));
  return spec;
}

double contiguous_power(const ContiguousSpec& spec, double alpha, std::int64_t mc_draws,
                        std::uint64_t seed) {
  ChiSquareMixture null;
  null.weights = spec.spectrum.eigenvalues;
  null.mc_draws = mc_draws;
  null.seed = seed;
  const double c = mixture_quantile(null, alpha);
  // Independent stream family for the alternative draws.
  return mixture_pvalue(spec.mixture(mc_draws, seed ^ 0x9E3779B97F4A7C15ull), c);
}

}  // namespace dpd
