#include <cmath>
#include <vector>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "doctest.h"
#include "dpd/errors.hpp"
#include "dpd/power.hpp"
#include "dpd/rng.hpp"

using namespace dpd;

namespace {

const NormalModel normal;
const WeibullModel weibull;

Vector vec(double a, double b) { return (Vector(2) << a, b).finished(); }

double ncx2_exceedance(double c, double nc) {
  const boost::math::non_central_chi_squared_distribution<double> d(1.0, nc);
  return boost::math::cdf(boost::math::complement(d, c));
}

}  // namespace

TEST_CASE("likelihood ratio power matches the delta method") {
  const double chi95 = 3.841458820694124;
  for (double mu : {0.25, 0.5, 1.0}) {
    const auto a = analyze_power(normal, vec(mu, 1.0), normal_mean_constraint(0.0), 0.0, 0.0);
    CHECK(a.theta_null_star[0] == 0.0);
    CHECK(a.theta_null_star[1] == doctest::Approx(std::sqrt(1 + mu * mu)).epsilon(1e-8));
    CHECK(a.divergence_gap == doctest::Approx(0.5 * std::log1p(mu * mu)).epsilon(1e-10));
    const double oracle = mu * mu * (mu * mu + 2) / (2 * std::pow(1 + mu * mu, 2));
    CHECK(a.sigma2 == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(a.critical_value == doctest::Approx(chi95).epsilon(1e-12));
    CHECK(a.t_vec[0] == doctest::Approx(mu / (1 + mu * mu)).epsilon(1e-7));
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(a.joint_cov);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("power function shape") {
  const auto a = analyze_power(normal, vec(0.3, 1.0), normal_mean_constraint(0.0), 0.25, 0.25);
  CHECK(a.power(a.critical_value / (2 * a.divergence_gap)) == doctest::Approx(0.5).epsilon(1e-12));
  double prev = 0.0;
  for (double n = 2; n < 5000; n *= 1.3) {
    const double p = a.power(n);
    CHECK(p >= prev);
    CHECK(p <= 1.0);
    prev = p;
  }
  CHECK(prev > 0.999);
  CHECK_THROWS_AS(analyze_power(normal, vec(0.0, 1.0), normal_mean_constraint(0.0), 0.25, 0.25), Error);
}

TEST_CASE("sample size inversion") {
  const auto a = analyze_power(normal, vec(0.3, 1.5), normal_mean_constraint(0.0), 0.2, 0.2);
  CHECK(required_sample_size(a, 0.5) ==
        static_cast<std::int64_t>(std::floor(a.critical_value / (2 * a.divergence_gap))) + 1);
  std::int64_t prev = 0;
  for (double target : {0.3, 0.5, 0.8, 0.9, 0.99}) {
    const auto n = required_sample_size(a, target);
    CHECK(n >= prev);
    CHECK(a.power(static_cast<double>(n)) >= target - 1e-12);
    CHECK(a.power(static_cast<double>(n - 1)) < target);
    prev = n;
  }
  // Closed form for target >= 1/2.
  const double z = normal_quantile(0.1);
  const double A = a.sigma2 * z * z;
  const double B = a.critical_value * a.divergence_gap;
  const double n_star = (A + B + std::sqrt(A * (A + 2 * B))) / (2 * a.divergence_gap * a.divergence_gap);
  CHECK(required_sample_size(a, 0.9) == static_cast<std::int64_t>(std::floor(n_star)) + 1);
  PowerAnalysis flat = a;
  flat.sigma2 = 0.0;
  flat.degenerate = true;
  CHECK(flat.power(1e6) == 1.0);
  CHECK(flat.power(2) == 0.0);
  try {
    required_sample_size(flat, 0.8);
    FAIL("expected DegenerateVariance");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateVariance);
  }
}

TEST_CASE("approximate power agrees with simulated likelihood ratio tests") {
  for (double mu : {0.25, 1.0}) {
    const double approx =
        approximate_power(normal, vec(mu, 1.0), normal_mean_constraint(0.0), 0.0, 0.0, 100);
    const int reps = 5000;
    int rejections = 0;
    for (int r = 0; r < reps; ++r) {
      RngStream rng(7, static_cast<std::uint64_t>(r));
      double s = 0, ss = 0;
      for (int i = 0; i < 100; ++i) {
        const double x = mu + rng.next_gaussian();
        s += x;
        ss += x * x;
      }
      const double mean = s / 100, var = ss / 100 - mean * mean;
      if (100 * std::log((var + mean * mean) / var) >= 3.841458820694124) ++rejections;
    }
    CHECK(std::abs(approx - rejections / double(reps)) < 0.1);
  }
}

TEST_CASE("general constraints project like pins") {
  const ConstraintSpec general(
      2, 1, [](const Vector& t) { return (Vector(1) << 2 * t[0]).finished(); },
      [](const Vector&) { return (Matrix(2, 1) << 2, 0).finished(); }, "2 mu = 0");
  for (double beta : {0.0, 0.3}) {
    const Vector a = population_projection(normal, vec(0.7, 1.2), normal_mean_constraint(0.0), beta);
    const Vector b = population_projection(normal, vec(0.7, 1.2), general, beta);
    CHECK((a - b).norm() < 1e-7);
  }
  const auto w = analyze_power(weibull, vec(1.1, 1.5), weibull_scale_constraint(1.5), 0.25, 0.25);
  CHECK(w.theta_null_star[0] == 1.5);
  CHECK(w.sigma2 > 0.0);
  CHECK(w.power(100) > 0.5);
}

TEST_CASE("contiguous alternatives") {
  const auto zero = contiguous_distribution(normal, vec(0, 1), Vector::Zero(2), 0.3, 0.3,
                                            normal_mean_constraint(0.0));
  CHECK(zero.w.isZero(1e-14));
  CHECK(zero.eta == doctest::Approx(0.0));
  CHECK(contiguous_power(zero, 0.05) == doctest::Approx(0.05).epsilon(1e-9));
  auto forced = zero.mixture(400000);
  forced.force_monte_carlo = true;
  ChiSquareMixture null = forced;
  null.shifts.resize(0);
  null.seed = 5;
  CHECK(std::abs(mixture_pvalue(forced, mixture_quantile(null, 0.05)) - 0.05) <= 2 / std::sqrt(400000.0));

  for (double sigma : {1.0, 2.0}) {
    for (double delta : {1.0, 2.5}) {
      const auto spec = contiguous_distribution(normal, vec(0, sigma), vec(delta, 0.0), 0.0, 0.0,
                                                normal_mean_constraint(0.0));
      CHECK(spec.w.cwiseAbs()[0] == doctest::Approx(delta / sigma).epsilon(1e-10));
      for (double alpha : {0.01, 0.05, 0.1}) {
        const double oracle =
            ncx2_exceedance(chi_square_quantile(1 - alpha, 1), delta * delta / (sigma * sigma));
        CHECK(std::abs(contiguous_power(spec, alpha) - oracle) < 1e-8);
      }
    }
  }

  const auto spec = contiguous_distribution(normal, vec(0, 1.3), vec(0.8, -0.4), 0.25, 0.4,
                                            normal_mean_constraint(0.0));
  const AsymptoticMatrices m =
      constrained_matrices(normal, vec(0, 1.3), 0.25, 0.4, normal_mean_constraint(0.0));
  const Vector shift = m.B * m.J * vec(0.8, -0.4);
  const Vector& lam = spec.spectrum.eigenvalues;
  const double lhs = (lam.array() * (1 + spec.w.array().square())).sum() + spec.eta;
  CHECK(lhs == doctest::Approx(shift.dot(m.A * shift) + lam.sum()).epsilon(1e-12));
  CHECK(std::abs(spec.eta) < 1e-10);
}
