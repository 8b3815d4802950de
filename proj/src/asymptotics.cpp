#include "dpd/asymptotics.hpp"

#include <cmath>

#include "dpd/errors.hpp"

namespace dpd {
namespace {

constexpr double kRetention = 1e-8;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

int count_above(const Vector& values, double cutoff) {
  int k = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) k += values[i] > cutoff ? 1 : 0;
  return k;
}

// Stack the upper triangle of a symmetric matrix-valued integrand with a vector part.
Vector stack(const Vector& v, const Matrix& m) {
  const Eigen::Index p = m.rows();
  Vector out(v.size() + p * (p + 1) / 2);
  out.head(v.size()) = v;
  Eigen::Index k = v.size();
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i; j < p; ++j) out[k++] = m(i, j);
  return out;
}

Matrix unstack(const Vector& s, Eigen::Index offset, Eigen::Index p) {
  Matrix m(p, p);
  Eigen::Index k = offset;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i; j < p; ++j) m(i, j) = m(j, i) = s[k++];
  return m;
}

}  // namespace

AsymptoticMatrices model_matrices(const ParametricModel& model, const Vector& theta, double beta,
                                  double gamma) {
  if (!model.in_domain(theta)) throw Error(ErrorKind::DomainError, "theta outside parameter space");
  if (!(beta >= 0.0) || !(gamma >= 0.0)) {
    throw Error(ErrorKind::DomainError, "beta and gamma must be >= 0");
  }
  AsymptoticMatrices m;
  m.beta = beta;
  m.gamma = gamma;
  m.J = symmetrized(score_outer_integral(model, theta, 1.0 + beta));
  m.xi = score_integral(model, theta, 1.0 + beta);
  m.K = symmetrized(score_outer_integral(model, theta, 1.0 + 2.0 * beta) - m.xi * m.xi.transpose());
  m.A = (1.0 + gamma) * symmetrized(score_outer_integral(model, theta, 1.0 + gamma));
  Eigen::LLT<Matrix> llt(m.J);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, "J is not positive definite");
  }
  return m;
}

void attach_projection(AsymptoticMatrices& m, const Matrix& G) {
  const Matrix Jinv = spd_inverse(m.J);
  const Matrix M = symmetrized(G.transpose() * Jinv * G);
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector s = svd.singularValues();
  if (s.size() == 0 || !(s.minCoeff() > 1e-12 * s.maxCoeff())) {
    throw Error(ErrorKind::SingularProjection, "G^T J^{-1} G is numerically singular");
  }
  m.G = G;
  m.Q = Jinv * G * M.inverse();
  m.P = symmetrized(Jinv - m.Q * G.transpose() * Jinv);
  m.B = symmetrized(m.Q * G.transpose() * Jinv);
  m.Sigma = symmetrized(m.P * m.K * m.P);
  m.constrained = true;
}

AsymptoticMatrices constrained_matrices(const ParametricModel& model, const Vector& theta,
                                        double beta, double gamma,
                                        const ConstraintSpec& constraint) {
  constraint.check_rank(theta);
  AsymptoticMatrices m = model_matrices(model, theta, beta, gamma);
  attach_projection(m, constraint.G(theta));
  return m;
}

NullSpectrum null_spectrum(const AsymptoticMatrices& m, int restrictions) {
  if (!m.constrained) throw Error(ErrorKind::InvalidConstraint, "matrices lack the projection B");
  const Matrix bkb = symmetrized(m.B * m.K * m.B);
  const SymmetricEigen outer = symmetric_eigen(bkb);
  const double top = std::abs(outer.values[0]);
  const int rank = count_above(outer.values, kRetention * top);
  if (!(top > 0.0) || rank != restrictions) {
    throw Error(ErrorKind::RankMismatch, "rank of B K B differs from the number of restrictions");
  }
  NullSpectrum out;
  out.S = outer.vectors.leftCols(rank) *
          outer.values.head(rank).cwiseSqrt().asDiagonal();
  const SymmetricEigen inner = symmetric_eigen(symmetrized(out.S.transpose() * m.A * out.S));
  const int k = count_above(inner.values, kRetention * std::abs(inner.values[0]));
  if (k != restrictions) {
    throw Error(ErrorKind::RankMismatch, "null spectrum has a different number of nonzero weights");
  }
  out.eigenvalues = inner.values.head(k);
  out.V = inner.vectors;
  out.k = k;
  return out;
}

NullSpectrum null_spectrum(const ParametricModel& model, const Vector& theta, double beta,
                           double gamma, const ConstraintSpec& constraint) {
  return null_spectrum(constrained_matrices(model, theta, beta, gamma, constraint),
                       constraint.restrictions());
}

Vector model_expectation(const ParametricModel& model, const Vector& theta,
                         const std::function<Vector(double)>& f, int size) {
  Vector out(size);
  for (int i = 0; i < size; ++i) {
    out[i] = integrate_over_support(model, theta, [&](double x) {
      const double w = model.density(theta, x);
      return w == 0.0 ? 0.0 : f(x)[i] * w;
    });
  }
  return out;
}

OffModelMatrices off_model_matrices(const ParametricModel& model, const Vector& theta, double beta,
                                    const Expectation& expect) {
  const Eigen::Index p = model.dimension();
  // J_h = int u u^T f^{1+beta} + E_h[(I - beta u u^T) f^beta] - int (I - beta u u^T) f^{1+beta}
  // K_h = E_h[u u^T f^{2 beta}] - xi_h xi_h^T,  xi_h = E_h[u f^beta]
  const auto curvature = [&](double x) {
    const Vector u = model.score(theta, x);
    const double fb = std::exp(beta * model.log_density(theta, x));
    const Matrix c = (model.information(theta, x) - beta * u * u.transpose()) * fb;
    return stack(u * fb, c);
  };
  const auto outer = [&](double x) {
    const Vector u = model.score(theta, x);
    const double f2b = std::exp(2.0 * beta * model.log_density(theta, x));
    return stack(Vector(), u * u.transpose() * f2b);
  };
  const auto tri = static_cast<int>(p * (p + 1) / 2);
  const Vector first = expect(curvature, static_cast<int>(p) + tri);
  const Vector second = expect(outer, tri);

  const Vector model_part = model_expectation(model, theta, [&](double x) {
    const Vector u = model.score(theta, x);
    const double fb = std::exp(beta * model.log_density(theta, x));
    return stack(Vector(), (model.information(theta, x) - beta * u * u.transpose()) * fb);
  }, tri);

  OffModelMatrices out;
  out.xi_h = first.head(p);
  out.J = symmetrized(score_outer_integral(model, theta, 1.0 + beta) + unstack(first, p, p) -
                      unstack(model_part, 0, p));
  out.K = symmetrized(unstack(second, 0, p) - out.xi_h * out.xi_h.transpose());
  return out;
}

OffModelMatrices empirical_matrices(const ParametricModel& model, const Vector& theta,
                                    std::span<const double> data, double beta) {
  if (data.empty()) throw Error(ErrorKind::DegenerateData, "empty sample");
  const Expectation mean = [&](const std::function<Vector(double)>& f, int) {
    Vector s = f(data[0]);
    for (std::size_t i = 1; i < data.size(); ++i) s += f(data[i]);
    return Vector(s / static_cast<double>(data.size()));
  };
  return off_model_matrices(model, theta, beta, mean);
}

OffModelMatrices population_matrices(const ParametricModel& model, const Vector& theta,
                                     double beta, const Vector& theta_true) {
  const Expectation under_truth = [&](const std::function<Vector(double)>& f, int size) {
    return model_expectation(model, theta_true, f, size);
  };
  return off_model_matrices(model, theta, beta, under_truth);
}

}  // namespace dpd
