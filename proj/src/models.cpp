#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpd/errors.hpp"
#include "dpd/models.hpp"

namespace dpd {

double ParametricModel::density(const Vector& theta, double x) const {
  return std::exp(log_density(theta, x));
}

bool ParametricModel::in_support(double x) const {
  if (!std::isfinite(x)) return false;
  return support() == Support::RealLine || x > 0.0;
}

double integrate_over_support(const ParametricModel& model, const Vector& theta,
                              const Integrand& f, double rel_tol, double abs_tol) {
  QuadratureSpec spec = model.quadrature_hint(theta);
  spec.rel_tol = rel_tol;
  spec.abs_tol = abs_tol;
  return integrate(f, spec);
}

double power_integral(const ParametricModel& model, const Vector& theta, double c) {
  if (auto v = model.power_integral_hook(theta, c)) return *v;
  return integrate_over_support(model, theta, [&](double x) {
    return std::exp(c * model.log_density(theta, x));
  });
}

Vector score_integral(const ParametricModel& model, const Vector& theta, double c) {
  if (auto v = model.score_integral_hook(theta, c)) return *v;
  const int p = model.dimension();
  Vector out(p);
  for (int i = 0; i < p; ++i) {
    out[i] = integrate_over_support(model, theta, [&](double x) {
      const double w = std::exp(c * model.log_density(theta, x));
      return w == 0.0 ? 0.0 : model.score(theta, x)[i] * w;
    });
  }
  return out;
}

Matrix score_outer_integral(const ParametricModel& model, const Vector& theta, double c) {
  if (auto v = model.score_outer_integral_hook(theta, c)) return *v;
  const int p = model.dimension();
  Matrix out(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      out(i, j) = integrate_over_support(model, theta, [&](double x) {
        const double w = std::exp(c * model.log_density(theta, x));
        if (w == 0.0) return 0.0;
        const Vector u = model.score(theta, x);
        return u[i] * u[j] * w;
      });
      out(j, i) = out(i, j);
    }
  }
  return out;
}

double cross_integral(const ParametricModel& model, const Vector& theta1, const Vector& theta2,
                      double gamma) {
  if (auto v = model.cross_integral_hook(theta1, theta2, gamma)) return *v;
  return integrate_over_support(model, theta1, [&](double x) {
    return std::exp(gamma * model.log_density(theta2, x) + model.log_density(theta1, x));
  }, 1e-12, 1e-15);
}

// ---------------------------------------------------------------------------

ConstraintSpec::ConstraintSpec(int dimension, int restrictions, GFunction g,
                               JacobianFunction jacobian, std::string label)
    : dimension_(dimension),
      restrictions_(restrictions),
      g_(std::move(g)),
      jacobian_(std::move(jacobian)),
      label_(std::move(label)) {
  if (restrictions_ < 1 || restrictions_ >= dimension_) {
    std::ostringstream msg;
    msg << "need 1 <= r < p, got r = " << restrictions_ << ", p = " << dimension_;
    throw Error(ErrorKind::InvalidConstraint, msg.str());
  }
}

ConstraintSpec ConstraintSpec::pin(int dimension, int index, double value, std::string label) {
  if (index < 0 || index >= dimension) {
    throw Error(ErrorKind::InvalidConstraint, "pinned index out of range");
  }
  ConstraintSpec spec(
      dimension, 1,
      [index, value](const Vector& theta) {
        Vector g(1);
        g[0] = theta[index] - value;
        return g;
      },
      [dimension, index](const Vector&) {
        Matrix G = Matrix::Zero(dimension, 1);
        G(index, 0) = 1.0;
        return G;
      },
      std::move(label));
  spec.pinned_.emplace_back(index, value);
  return spec;
}

void ConstraintSpec::check_rank(const Vector& theta) const {
  const Matrix G = jacobian_(theta);
  if (G.rows() != dimension_ || G.cols() != restrictions_) {
    throw Error(ErrorKind::InvalidConstraint, "Jacobian G must be p x r");
  }
  Eigen::JacobiSVD<Matrix> svd(G);
  const Vector s = svd.singularValues();
  const double smax = s.size() ? s.maxCoeff() : 0.0;
  const auto rank = (s.array() > 1e-10 * std::max(smax, 1e-300)).count();
  if (smax == 0.0 || rank != restrictions_) {
    throw Error(ErrorKind::InvalidConstraint, "rank(G(theta)) differs from the number of restrictions");
  }
}

std::vector<int> ConstraintSpec::free_indices() const {
  std::vector<int> out;
  for (int i = 0; i < dimension_; ++i) {
    const bool fixed = std::any_of(pinned_.begin(), pinned_.end(),
                                   [i](const auto& pv) { return pv.first == i; });
    if (!fixed) out.push_back(i);
  }
  return out;
}

Vector ConstraintSpec::embed(const Vector& free) const {
  Vector theta(dimension_);
  const auto idx = free_indices();
  for (std::size_t k = 0; k < idx.size(); ++k) theta[idx[k]] = free[static_cast<Eigen::Index>(k)];
  for (const auto& [i, v] : pinned_) theta[i] = v;
  return theta;
}

ConstraintSpec normal_mean_constraint(double mu0) {
  std::ostringstream label;
  label << "mu = " << mu0;
  return ConstraintSpec::pin(2, 0, mu0, label.str());
}

ConstraintSpec weibull_scale_constraint(double sigma0) {
  if (!(sigma0 > 0.0)) throw Error(ErrorKind::InvalidConstraint, "sigma0 must be positive");
  std::ostringstream label;
  label << "sigma = " << sigma0;
  return ConstraintSpec::pin(2, 0, sigma0, label.str());
}

}  // namespace dpd
