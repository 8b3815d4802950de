#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpd/models.hpp"
#include "dpd/numerics.hpp"

namespace dpd {

/// Law of sum_i lambda_i (Z_i + w_i)^2 + eta with Z_i iid N(0, 1).
struct ChiSquareMixture {
  Vector weights;
  Vector shifts;  // empty means zero
  double offset = 0.0;
  std::int64_t mc_draws = 1'000'000;
  std::uint64_t seed = 20130101;
  /// A single weight is evaluated exactly (central or noncentral chi-square(1));
  /// this flag forces Monte Carlo anyway.
  bool force_monte_carlo = false;

  void validate() const;
  bool exact_route() const;
};

/// Monte Carlo draws are split into fixed chunks; chunk c uses RNG stream c,
/// so the draws do not depend on the number of threads.
inline constexpr std::int64_t kMixtureChunk = 1 << 16;

/// Fills `out` (size mc_draws) with mixture draws, OpenMP-parallel over chunks.
void sample_mixture(const ChiSquareMixture& mix, std::span<double> out);
/// Single-threaded reference for sample_mixture; bit-identical output.
void sample_mixture_serial(const ChiSquareMixture& mix, std::span<double> out);

/// A mixture with its sorted Monte Carlo draws cached for repeated queries.
class MixtureDistribution {
 public:
  explicit MixtureDistribution(ChiSquareMixture mix);

  const ChiSquareMixture& mixture() const noexcept { return mix_; }
  /// Upper-alpha quantile.
  double quantile(double alpha) const;
  /// P(T >= t), floored at 1 / (mc_draws + 1) on the Monte Carlo route.
  double pvalue(double t) const;

 private:
  ChiSquareMixture mix_;
  std::vector<double> sorted_;
};

double mixture_quantile(const ChiSquareMixture& mix, double alpha);
double mixture_pvalue(const ChiSquareMixture& mix, double t);

enum class Alternative { TwoSided, Greater, Less };
std::string to_string(Alternative a);
Alternative parse_alternative(const std::string& s);

enum class EigenPoint { Restricted, Unrestricted };

struct TestOptions {
  double alpha = 0.05;
  std::int64_t mc_draws = 1'000'000;
  std::uint64_t seed = 20130101;
  /// Where the null eigenvalues are estimated; the restricted fit by default.
  EigenPoint eigen_point = EigenPoint::Restricted;
  bool force_monte_carlo = false;
};

struct TestResult {
  double statistic = 0.0;
  Vector eigenvalues;
  double p_value = 1.0;
  double critical_value = 0.0;
  double alpha = 0.05;
  Alternative alternative = Alternative::TwoSided;
  Vector theta_hat;
  Vector theta_tilde;
  double beta = 0.0;
  double gamma = 0.0;
  std::string method;
  std::size_t n = 0;
  /// Signed test: Student-t companion p-value (n - 1 degrees of freedom).
  std::optional<double> t_p_value;
  /// Signed test: p-value from the 1/2 chi2_0 + 1/2 chi2_1 form.
  std::optional<double> chi_bar_p_value;
  /// t-test: degrees of freedom.
  std::optional<double> df;
  bool reject() const { return p_value <= alpha; }
};

/// T = 2n d_gamma(f_{theta_hat}, f_{theta_tilde}) with its chi-square mixture calibration.
TestResult dpd_test(const ParametricModel& model, std::span<const double> data, double beta,
                    double gamma, const ConstraintSpec& constraint, const TestOptions& options = {});

/// Signed one-sided test of theta[index] = value for a pinning constraint with
/// r = 1: Z = sign(theta_hat - value) sqrt(T / lambda_1).
TestResult signed_one_sided_test(const ParametricModel& model, std::span<const double> data,
                                 double beta, double gamma, const ConstraintSpec& constraint,
                                 Alternative direction, const TestOptions& options = {});

/// Classical one-sample Student t-test.
TestResult t_test(std::span<const double> data, double mu0, Alternative alternative,
                  double alpha = 0.05);

}  // namespace dpd
