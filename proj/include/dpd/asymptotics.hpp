#pragma once

#include <span>

#include "dpd/models.hpp"
#include "dpd/numerics.hpp"

namespace dpd {

/// Asymptotic matrices of the MDPDE / RMDPDE and of the DPD statistic.
/// P, Q, B, Sigma and G are filled only by constrained_matrices.
struct AsymptoticMatrices {
  Matrix J;      // sensitivity, int u u^T f^{1+beta} under the model
  Matrix K;      // variability, int u u^T f^{1+2beta} - xi xi^T
  Vector xi;     // int u f^{1+beta}
  Matrix A;      // (1 + gamma) int u u^T f^{1+gamma}, Hessian of d_gamma in its second argument
  Matrix G;      // p x r
  Matrix Q;      // J^{-1} G (G^T J^{-1} G)^{-1}
  Matrix P;      // J^{-1} - Q G^T J^{-1}
  Matrix B;      // Q G^T J^{-1}
  Matrix Sigma;  // P K P
  double beta = 0.0;
  double gamma = 0.0;
  bool constrained = false;
};

AsymptoticMatrices model_matrices(const ParametricModel& model, const Vector& theta, double beta,
                                  double gamma);

AsymptoticMatrices constrained_matrices(const ParametricModel& model, const Vector& theta,
                                        double beta, double gamma,
                                        const ConstraintSpec& constraint);

/// Adds Q, P, B, Sigma to matrices that already hold J and K.
void attach_projection(AsymptoticMatrices& m, const Matrix& G);

/// Nonzero eigenvalues of A B K B, the weights of the chi-square mixture that
/// the DPD statistic follows under the null.
struct NullSpectrum {
  Vector eigenvalues;  // descending, all positive
  int k = 0;
  Matrix S;  // p x r root of B K B restricted to its range, B K B = S S^T
  Matrix V;  // r x r orthonormal eigenvectors of S^T A S
};

NullSpectrum null_spectrum(const AsymptoticMatrices& m, int restrictions);
NullSpectrum null_spectrum(const ParametricModel& model, const Vector& theta, double beta,
                           double gamma, const ConstraintSpec& constraint);

/// J and K with the data distribution h in place of f_theta. `expect`
/// returns E_h of a vector-valued function with the given output size.
using Expectation = std::function<Vector(const std::function<Vector(double)>&, int)>;

struct OffModelMatrices {
  Matrix J;
  Matrix K;
  Vector xi_h;  // E_h[u f^beta]
};

OffModelMatrices off_model_matrices(const ParametricModel& model, const Vector& theta, double beta,
                                    const Expectation& expect);
/// h = empirical distribution of the data.
OffModelMatrices empirical_matrices(const ParametricModel& model, const Vector& theta,
                                    std::span<const double> data, double beta);
/// h = f_{theta_true}.
OffModelMatrices population_matrices(const ParametricModel& model, const Vector& theta,
                                     double beta, const Vector& theta_true);

/// E over f_{theta} of a vector-valued function, by quadrature per component.
Vector model_expectation(const ParametricModel& model, const Vector& theta,
                         const std::function<Vector(double)>& f, int size);

}  // namespace dpd
