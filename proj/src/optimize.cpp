#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dpd/errors.hpp"
#include "dpd/numerics.hpp"

namespace dpd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class CountedObjective {
 public:
  CountedObjective(const Objective& f, const OptimizerSpec& spec,
                   const std::optional<Vector>& lower)
      : f_(f), spec_(spec), lower_(lower) {}

  double operator()(const Vector& x) {
    ++evaluations;
    if (lower_ && (x.array() < lower_->array()).any()) return kInf;
    const double v = f_(x);
    if (std::isnan(v)) return kInf;
    if (v < spec_.unbounded_threshold) {
      throw Error(ErrorKind::UnboundedBelow, "objective decreased past the unboundedness guard");
    }
    return v;
  }

  int evaluations = 0;

 private:
  const Objective& f_;
  const OptimizerSpec& spec_;
  const std::optional<Vector>& lower_;
};

struct SimplexOutcome {
  Vector x;
  double f;
  bool converged;
  int iterations;
};

// One Nelder-Mead run with standard coefficients (1, 2, 0.5, 0.5).
SimplexOutcome nelder_mead(CountedObjective& f, const Vector& start, double start_f,
                           const OptimizerSpec& spec, int max_iters) {
  const Eigen::Index n = start.size();
  std::vector<Vector> pts(n + 1, start);
  std::vector<double> vals(n + 1, start_f);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double step = spec.initial_step * std::max(1.0, std::abs(start[i]));
    pts[i + 1][i] += step;
    vals[i + 1] = f(pts[i + 1]);
    if (!std::isfinite(vals[i + 1])) {
      pts[i + 1][i] = start[i] - step;
      vals[i + 1] = f(pts[i + 1]);
    }
  }

  std::vector<std::size_t> order(n + 1);
  int iter = 0;
  bool converged = false;
  for (; iter < max_iters; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    {
      std::vector<Vector> p2(n + 1);
      std::vector<double> v2(n + 1);
      for (std::size_t k = 0; k <= static_cast<std::size_t>(n); ++k) {
        p2[k] = pts[order[k]];
        v2[k] = vals[order[k]];
      }
      pts.swap(p2);
      vals.swap(v2);
    }

    double diameter = 0.0;
    for (Eigen::Index k = 1; k <= n; ++k) {
      diameter = std::max(diameter, (pts[k] - pts[0]).cwiseAbs().maxCoeff());
    }
    const double spread = vals[n] - vals[0];
    const double xscale = 1.0 + pts[0].cwiseAbs().maxCoeff();
    if (diameter <= spec.x_tol * xscale && spread <= spec.f_tol * (1.0 + std::abs(vals[0]))) {
      converged = true;
      break;
    }

    Vector centroid = Vector::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) centroid += pts[k];
    centroid /= static_cast<double>(n);

    const Vector reflected = centroid + (centroid - pts[n]);
    const double fr = f(reflected);
    if (fr < vals[0]) {
      const Vector expanded = centroid + 2.0 * (reflected - centroid);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[n] = expanded;
        vals[n] = fe;
      } else {
        pts[n] = reflected;
        vals[n] = fr;
      }
      continue;
    }
    if (fr < vals[n - 1]) {
      pts[n] = reflected;
      vals[n] = fr;
      continue;
    }
    const bool outside = fr < vals[n];
    const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                      : Vector(centroid + 0.5 * (pts[n] - centroid));
    const double fc = f(contracted);
    if (fc < (outside ? fr : vals[n])) {
      pts[n] = contracted;
      vals[n] = fc;
      continue;
    }
    for (Eigen::Index k = 1; k <= n; ++k) {
      pts[k] = pts[0] + 0.5 * (pts[k] - pts[0]);
      vals[k] = f(pts[k]);
    }
  }
  const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  return {pts[best], vals[best], converged, iter};
}

}  // namespace

void OptimizerSpec::validate() const {
  if (!(x_tol > 0.0) || !(f_tol > 0.0) || !(g_tol > 0.0)) {
    throw Error(ErrorKind::DomainError, "optimizer tolerances must be positive");
  }
  if (max_iters < 1) throw Error(ErrorKind::DomainError, "max_iters must be at least 1");
  if (restarts < 0) throw Error(ErrorKind::DomainError, "restarts must be nonnegative");
}

MinimizeResult minimize(const Objective& f, const Vector& x0, const OptimizerSpec& spec,
                        const std::optional<Vector>& lower_bounds) {
  if (spec.method == OptimizerMethod::GradientLineSearch) {
    return minimize(f, Gradient{}, x0, spec, lower_bounds);
  }
  spec.validate();
  CountedObjective obj(f, spec, lower_bounds);
  const double f0 = obj(x0);
  if (!std::isfinite(f0)) {
    throw Error(ErrorKind::DomainError, "objective is not finite at the starting point");
  }

  MinimizeResult result{x0, f0, false, 0, 0};
  int budget = spec.max_iters;
  for (int attempt = 0; attempt <= spec.restarts && budget > 0; ++attempt) {
    const SimplexOutcome run = nelder_mead(obj, result.x, result.f, spec, budget);
    budget -= run.iterations;
    result.iterations += run.iterations;
    const bool improved =
        run.f < result.f - spec.f_tol * (1.0 + std::abs(result.f)) ||
        (run.x - result.x).cwiseAbs().maxCoeff() > spec.x_tol * (1.0 + result.x.cwiseAbs().maxCoeff());
    if (run.f <= result.f) {
      result.x = run.x;
      result.f = run.f;
    }
    result.converged = run.converged;
    // A restart that lands on the same point confirms convergence.
    if (attempt > 0 && run.converged && !improved) break;
  }
  result.evaluations = obj.evaluations;
  return result;
}

Vector central_gradient(const Objective& f, const Vector& x, double rel_step) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

MinimizeResult minimize(const Objective& f, const Gradient& grad, const Vector& x0,
                        const OptimizerSpec& spec, const std::optional<Vector>& lower_bounds) {
  spec.validate();
  CountedObjective obj(f, spec, lower_bounds);
  auto gradient = [&](const Vector& x) {
    return grad ? grad(x) : central_gradient(f, x);
  };
  auto project = [&](Vector x) {
    if (lower_bounds) x = x.cwiseMax(*lower_bounds);
    return x;
  };

  Vector x = project(x0);
  double fx = obj(x);
  if (!std::isfinite(fx)) {
    throw Error(ErrorKind::DomainError, "objective is not finite at the starting point");
  }
  Vector g = gradient(x);
  const Eigen::Index n = x.size();
  Matrix h_inv = Matrix::Identity(n, n);

  MinimizeResult result{x, fx, false, 0, 0};
  for (int iter = 0; iter < spec.max_iters; ++iter) {
    result.iterations = iter;
    if (g.cwiseAbs().maxCoeff() <= spec.g_tol) {
      result.converged = true;
      break;
    }
    Vector dir = -h_inv * g;
    if (dir.dot(g) >= 0.0) {
      h_inv.setIdentity();
      dir = -g;
    }
    // Armijo backtracking.
    double step = 1.0;
    Vector x_new;
    double f_new = kInf;
    const double slope = dir.dot(g);
    for (int k = 0; k < 60; ++k) {
      x_new = project(x + step * dir);
      f_new = obj(x_new);
      if (f_new <= fx + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    if (!(f_new < fx)) {
      // No descent along the search direction: treat as stationary if the step collapsed.
      result.converged = (x_new - x).cwiseAbs().maxCoeff() <= spec.x_tol * (1.0 + x.cwiseAbs().maxCoeff());
      break;
    }
    const Vector g_new = gradient(x_new);
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Matrix ident = Matrix::Identity(n, n);
      h_inv = (ident - rho * s * y.transpose()) * h_inv * (ident - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }
    const double df = fx - f_new;
    x = x_new;
    fx = f_new;
    g = g_new;
    if (s.cwiseAbs().maxCoeff() <= spec.x_tol * (1.0 + x.cwiseAbs().maxCoeff()) &&
        df <= spec.f_tol * (1.0 + std::abs(fx))) {
      result.converged = true;
      result.iterations = iter + 1;
      break;
    }
  }
  result.x = x;
  result.f = fx;
  result.evaluations = obj.evaluations;
  return result;
}

}  // namespace dpd
