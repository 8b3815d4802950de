#include "dpd/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dpd/divergence.hpp"
#include "dpd/errors.hpp"

namespace dpd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kScaleFloor = 1e-10;
constexpr double kFeasibilityTol = 1e-8;

// Free coordinates of theta, positive ones on log scale.
class Reparam {
 public:
  Reparam(const ParametricModel& model, std::vector<int> free, Vector base)
      : free_(std::move(free)), base_(std::move(base)) {
    const auto positive = model.positive_parameters();
    for (int i : free_) log_.push_back(positive[static_cast<std::size_t>(i)]);
  }

  Vector to_theta(const Vector& phi) const {
    Vector theta = base_;
    for (std::size_t k = 0; k < free_.size(); ++k) {
      const double v = phi[static_cast<Eigen::Index>(k)];
      theta[free_[k]] = log_[k] ? std::exp(v) : v;
    }
    return theta;
  }

  std::optional<Vector> to_phi(const Vector& theta) const {
    Vector phi(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) {
      const double v = theta[free_[k]];
      if (log_[k] && !(v > 0.0)) return std::nullopt;
      phi[static_cast<Eigen::Index>(k)] = log_[k] ? std::log(v) : v;
    }
    return phi;
  }

 private:
  std::vector<int> free_;
  std::vector<bool> log_;
  Vector base_;
};

std::vector<int> all_indices(int p) {
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

// Objective without per-call validation; NaN outside the parameter space.
double raw_objective(const ParametricModel& model, const Vector& theta,
                     std::span<const double> data, double beta) {
  if (!model.in_domain(theta)) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(data.size());
  double s = 0.0;
  if (beta < kLimitThreshold) {
    for (double x : data) s += model.log_density(theta, x);
    return -s / n;
  }
  for (double x : data) s += std::exp(beta * model.log_density(theta, x));
  return power_integral(model, theta, 1.0 + beta) - (1.0 + 1.0 / beta) * s / n;
}

void validate_inputs(const ParametricModel& model, std::span<const double> data, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::DomainError, "beta must be finite and >= 0");
  }
  require_in_support(model, data);
  if (data.size() < 2) throw Error(ErrorKind::DegenerateData, "need at least two observations");
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  if (*lo == *hi) throw Error(ErrorKind::DegenerateData, "all observations are identical");
}

void check_scale(const ParametricModel& model, const Vector& theta) {
  const auto positive = model.positive_parameters();
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (positive[static_cast<std::size_t>(i)] && theta[i] < kScaleFloor) {
      throw Error(ErrorKind::DegenerateData, "a scale estimate collapsed below 1e-10");
    }
  }
}

struct Start {
  Vector theta;
  std::string label;
};

struct Candidate {
  Vector theta;
  double f = kInf;
  bool converged = false;
  int iterations = 0;
  std::string label;
};

// Newton steps on the analytic gradient over the free coordinates. The simplex
// stops where objective differences drop below rounding, which on flat
// likelihoods leaves relative parameter error near 1e-7.
Vector polish(const ParametricModel& model, std::span<const double> data, double beta,
              Vector theta, const std::vector<int>& free) {
  const auto k = static_cast<Eigen::Index>(free.size());
  const auto free_gradient = [&](const Vector& th) {
    const Vector g = -estimating_function(model, th, data, beta);
    Vector out(k);
    for (Eigen::Index i = 0; i < k; ++i) out[i] = g[free[static_cast<std::size_t>(i)]];
    return out;
  };
  double f = raw_objective(model, theta, data, beta);
  Vector g = free_gradient(theta);
  for (int iter = 0; iter < 8 && g.lpNorm<Eigen::Infinity>() > 0.0; ++iter) {
    Matrix H(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const int idx = free[static_cast<std::size_t>(j)];
      const double h = 1e-6 * (1.0 + std::abs(theta[idx]));
      Vector up = theta, down = theta;
      up[idx] += h;
      down[idx] -= h;
      if (!model.in_domain(up) || !model.in_domain(down)) return theta;
      H.col(j) = (free_gradient(up) - free_gradient(down)) / (2.0 * h);
    }
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success) return theta;
    const Vector step = llt.solve(g);
    Vector next = theta;
    for (Eigen::Index j = 0; j < k; ++j) next[free[static_cast<std::size_t>(j)]] -= step[j];
    if (!model.in_domain(next)) return theta;
    const double fn = raw_objective(model, next, data, beta);
    const Vector gn = free_gradient(next);
    if (!(fn <= f + 1e-13 * (1.0 + std::abs(f))) ||
        !(gn.lpNorm<Eigen::Infinity>() < g.lpNorm<Eigen::Infinity>())) {
      return theta;
    }
    theta = next;
    f = fn;
    g = gn;
  }
  return theta;
}

Candidate run_start(const Objective& phi_objective, const Reparam& map, const Start& start,
                    const OptimizerSpec& spec) {
  const auto phi0 = map.to_phi(start.theta);
  if (!phi0) return {};
  if (!std::isfinite(phi_objective(*phi0))) return {};
  const MinimizeResult r = minimize(phi_objective, *phi0, spec);
  return {map.to_theta(r.x), r.f, r.converged, r.iterations, start.label};
}

Candidate best_of(const std::vector<Candidate>& candidates) {
  Candidate best;
  for (const auto& c : candidates) {
    if (c.theta.size() > 0 && c.f < best.f) best = c;
  }
  if (best.theta.size() == 0) {
    throw Error(ErrorKind::NonConvergent, "no starting value gave a finite objective");
  }
  return best;
}

Matrix tangent_projector(const Matrix& G) {
  const Matrix gtg = G.transpose() * G;
  return Matrix::Identity(G.rows(), G.rows()) - G * gtg.ldlt().solve(G.transpose());
}

Vector multipliers(const Matrix& G, const Vector& grad) {
  const Matrix gtg = G.transpose() * G;
  return -gtg.ldlt().solve(G.transpose() * grad);
}

EstimationResult finish_restricted(const ParametricModel& model, std::span<const double> data,
                                   double beta, const ConstraintSpec& constraint,
                                   const Vector& theta, double f, bool converged, int iterations,
                                   std::string label) {
  check_scale(model, theta);
  const Vector g = constraint.g(theta);
  if (g.lpNorm<Eigen::Infinity>() > kFeasibilityTol) {
    throw Error(ErrorKind::ConstraintInfeasible, "restricted fit violates g(theta) = 0");
  }
  const Matrix G = constraint.G(theta);
  const Vector grad = objective_gradient(model, theta, data, beta);
  EstimationResult out;
  out.theta_hat = theta;
  out.objective_value = f;
  out.converged = converged;
  out.iterations = iterations;
  out.gradient_norm = (tangent_projector(G) * grad).lpNorm<Eigen::Infinity>();
  out.lagrange_multipliers = multipliers(G, grad);
  out.beta = beta;
  out.start_label = std::move(label);
  return out;
}

}  // namespace

OptimizerSpec default_fit_optimizer() {
  OptimizerSpec spec;
  spec.x_tol = 1e-10;
  spec.f_tol = 1e-15;
  spec.initial_step = 0.1;
  spec.restarts = 3;
  return spec;
}

Vector objective_gradient(const ParametricModel& model, const Vector& theta,
                          std::span<const double> data, double beta) {
  const double scale = beta < kLimitThreshold ? 1.0 : 1.0 + beta;
  return -scale * estimating_function(model, theta, data, beta);
}

EstimationResult fit_mdpde(const ParametricModel& model, std::span<const double> data, double beta,
                           const FitOptions& options) {
  validate_inputs(model, data, beta);
  const int p = model.dimension();

  if (beta < kLimitThreshold && !options.init) {
    if (auto mle = model.mle_hook(data)) {
      check_scale(model, *mle);
      EstimationResult out;
      out.theta_hat = *mle;
      out.objective_value = raw_objective(model, *mle, data, beta);
      out.converged = true;
      out.gradient_norm = objective_gradient(model, *mle, data, beta).lpNorm<Eigen::Infinity>();
      out.beta = beta;
      out.start_label = "closed-form";
      return out;
    }
  }

  std::vector<Start> starts;
  if (options.init) {
    starts.push_back({*options.init, "user"});
  } else if (beta < kLimitThreshold) {
    starts.push_back({model.initial_estimate(data), "moment"});
  } else {
    try {
      FitOptions mle_options;
      mle_options.optimizer = options.optimizer;
      starts.push_back({fit_mdpde(model, data, 0.0, mle_options).theta_hat, "beta0"});
    } catch (const Error&) {
      starts.push_back({model.initial_estimate(data), "moment"});
    }
  }
  if (beta >= kLimitThreshold && options.multistart) {
    starts.push_back({model.robust_estimate(data), "robust"});
  }

  const Reparam map(model, all_indices(p), Vector::Zero(p));
  const Objective objective = [&](const Vector& phi) {
    return raw_objective(model, map.to_theta(phi), data, beta);
  };
  std::vector<Candidate> candidates;
  for (const auto& s : starts) candidates.push_back(run_start(objective, map, s, options.optimizer));
  Candidate best = best_of(candidates);
  best.theta = polish(model, data, beta, best.theta, all_indices(p));
  best.f = raw_objective(model, best.theta, data, beta);

  check_scale(model, best.theta);
  EstimationResult out;
  out.theta_hat = best.theta;
  out.objective_value = best.f;
  out.converged = best.converged;
  out.iterations = best.iterations;
  out.gradient_norm =
      objective_gradient(model, best.theta, data, beta).lpNorm<Eigen::Infinity>();
  out.beta = beta;
  out.start_label = best.label;
  return out;
}

EstimationResult fit_rmdpde(const ParametricModel& model, std::span<const double> data, double beta,
                            const ConstraintSpec& constraint, const FitOptions& options) {
  validate_inputs(model, data, beta);
  const int p = model.dimension();
  if (constraint.dimension() != p) {
    throw Error(ErrorKind::InvalidConstraint, "constraint dimension differs from the model's");
  }

  if (beta < kLimitThreshold && !options.init) {
    if (auto mle = model.restricted_mle_hook(data, constraint)) {
      constraint.check_rank(*mle);
      return finish_restricted(model, data, beta, constraint, *mle,
                               raw_objective(model, *mle, data, beta), true, 0, "closed-form");
    }
  }

  std::vector<Start> starts;
  if (options.init) {
    starts.push_back({*options.init, "user"});
  } else {
    starts.push_back({model.initial_estimate(data), "moment"});
    if (beta >= kLimitThreshold) {
      try {
        FitOptions mle_options;
        mle_options.optimizer = options.optimizer;
        starts.push_back(
            {fit_rmdpde(model, data, 0.0, constraint, mle_options).theta_hat, "beta0"});
      } catch (const Error&) {
      }
    }
  }
  if (beta >= kLimitThreshold && options.multistart) {
    starts.push_back({model.robust_estimate(data), "robust"});
  }

  if (constraint.is_pinning()) {
    Vector base = Vector::Zero(p);
    for (const auto& [i, v] : constraint.pinned()) base[i] = v;
    const Reparam map(model, constraint.free_indices(), base);
    const Objective objective = [&](const Vector& phi) {
      return raw_objective(model, map.to_theta(phi), data, beta);
    };
    std::vector<Candidate> candidates;
    for (auto s : starts) {
      for (const auto& [i, v] : constraint.pinned()) s.theta[i] = v;
      if (!model.in_domain(s.theta)) continue;
      constraint.check_rank(s.theta);
      candidates.push_back(run_start(objective, map, s, options.optimizer));
    }
    if (std::none_of(candidates.begin(), candidates.end(),
                     [](const Candidate& c) { return c.theta.size() > 0; })) {
      throw Error(ErrorKind::ConstraintInfeasible, "no feasible start in the parameter space");
    }
    Candidate best = best_of(candidates);
    best.theta = polish(model, data, beta, best.theta, constraint.free_indices());
    best.f = raw_objective(model, best.theta, data, beta);
    return finish_restricted(model, data, beta, constraint, best.theta, best.f, best.converged,
                             best.iterations, best.label);
  }

  // General constraints: augmented Lagrangian, then a Newton projection onto g = 0.
  const Reparam map(model, all_indices(p), Vector::Zero(p));
  const int r = constraint.restrictions();
  std::vector<Candidate> candidates;
  for (const auto& s : starts) {
    if (!model.in_domain(s.theta)) continue;
    constraint.check_rank(s.theta);
    Vector theta = s.theta;
    Vector lambda = Vector::Zero(r);
    double rho = 10.0;
    double previous = kInf;
    bool converged = false;
    int iterations = 0;
    for (int outer = 0; outer < 60; ++outer) {
      const Objective augmented = [&](const Vector& phi) {
        const Vector th = map.to_theta(phi);
        const double f = raw_objective(model, th, data, beta);
        if (!std::isfinite(f)) return f;
        const Vector g = constraint.g(th);
        return f + lambda.dot(g) + 0.5 * rho * g.squaredNorm();
      };
      const auto phi0 = map.to_phi(theta);
      if (!phi0) break;
      const MinimizeResult m = minimize(augmented, *phi0, options.optimizer);
      theta = map.to_theta(m.x);
      iterations += m.iterations;
      converged = m.converged;
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
    if (!model.in_domain(theta) ||
        constraint.g(theta).lpNorm<Eigen::Infinity>() > kFeasibilityTol) {
      continue;
    }
    candidates.push_back(
        {theta, raw_objective(model, theta, data, beta), converged, iterations, s.label});
  }
  if (candidates.empty()) {
    throw Error(ErrorKind::ConstraintInfeasible, "augmented Lagrangian found no feasible point");
  }
  const Candidate best = best_of(candidates);
  return finish_restricted(model, data, beta, constraint, best.theta, best.f, best.converged,
                           best.iterations, best.label);
}

}  // namespace dpd
