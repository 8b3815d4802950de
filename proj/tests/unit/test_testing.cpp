#include <cmath>
#include <vector>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <omp.h>

#include "doctest.h"
#include "dpd/datasets.hpp"
#include "dpd/errors.hpp"
#include "dpd/estimation.hpp"
#include "dpd/testing.hpp"

using namespace dpd;

namespace {

const NormalModel normal;

ChiSquareMixture mixture(std::initializer_list<double> w, std::int64_t draws = 1'000'000) {
  ChiSquareMixture m;
  m.weights = Eigen::Map<const Vector>(w.begin(), static_cast<Eigen::Index>(w.size()));
  m.mc_draws = draws;
  m.seed = 99;
  m.force_monte_carlo = true;
  return m;
}

}  // namespace

TEST_CASE("mixture quantiles against chi-square oracles") {
  CHECK(std::abs(mixture_quantile(mixture({1.0}), 0.05) - 3.841458820694124) <= 0.02);
  CHECK(std::abs(mixture_quantile(mixture({1.0, 1.0}), 0.05) - 5.991464547107979) <= 0.03);
  auto exact = mixture({2.5});
  exact.force_monte_carlo = false;
  CHECK(exact.exact_route());
  CHECK(mixture_quantile(exact, 0.05) == doctest::Approx(2.5 * 3.841458820694124).epsilon(1e-12));
  CHECK(mixture_pvalue(exact, 2.5 * 3.841458820694124) == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("mixture scaling, p-value/quantile consistency and floor") {
  const auto base = mixture({0.7, 0.3}, 200000);
  auto scaled = base;
  scaled.weights *= 2.0;
  const double q = mixture_quantile(base, 0.05);
  CHECK(mixture_quantile(scaled, 0.05) == 2.0 * q);

  const MixtureDistribution dist(base);
  for (double a : {0.01, 0.05, 0.1, 0.5}) {
    CHECK(std::abs(dist.pvalue(dist.quantile(a)) - a) <= 2.0 / std::sqrt(200000.0));
  }
  CHECK(dist.pvalue(1e9) == 1.0 / 200001.0);
  CHECK(dist.pvalue(-1.0) == 1.0);
  double prev = 1.0;
  for (double t = 0.0; t < 12.0; t += 0.25) {
    const double p = dist.pvalue(t);
    CHECK(p <= prev);
    prev = p;
  }
  try {
    dist.quantile(1e-5);
    FAIL("expected MCUnderResolved");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MCUnderResolved);
  }
}

TEST_CASE("parallel and serial mixture kernels agree bit for bit") {
  auto m = mixture({1.3, 0.4, 0.1}, 300001);
  m.shifts = Vector::Constant(3, 0.5);
  m.offset = 0.2;
  std::vector<double> serial(300001), parallel(300001), threaded(300001);
  sample_mixture_serial(m, serial);
  sample_mixture(m, parallel);
  const int before = omp_get_max_threads();
  omp_set_num_threads(3);
  sample_mixture(m, threaded);
  omp_set_num_threads(before);
  CHECK(serial == parallel);
  CHECK(serial == threaded);
}

TEST_CASE("shifted mixture matches the noncentral chi-square") {
  auto m = mixture({1.0}, 1'000'000);
  m.shifts = Vector::Constant(1, 1.5);
  m.offset = 0.0;
  const boost::math::non_central_chi_squared_distribution<double> nc(1.0, 2.25);
  for (double t : {1.0, 3.84, 8.0}) {
    const double oracle = boost::math::cdf(boost::math::complement(nc, t));
    CHECK(std::abs(mixture_pvalue(m, t) - oracle) < 0.003);
  }
}

TEST_CASE("t-test reproduces classical p-values") {
  const auto darwin = load_builtin("darwin").values;
  const auto darwin_clean = load_builtin("darwin_cleaned").values;
  CHECK(t_test(darwin, 0, Alternative::TwoSided).p_value == doctest::Approx(0.0497029440218).epsilon(1e-9));
  CHECK(t_test(darwin_clean, 0, Alternative::TwoSided).p_value ==
        doctest::Approx(1.3118635807705e-4).epsilon(1e-8));
  // The telephone data as printed give 0.6480 and 0.00771.
  const auto tel = load_builtin("telephone").values;
  CHECK(t_test(tel, 0, Alternative::TwoSided).p_value == doctest::Approx(0.647966925212).epsilon(1e-9));
  CHECK(t_test(load_builtin("telephone_cleaned").values, 0, Alternative::TwoSided).p_value ==
        doctest::Approx(0.0077067901394).epsilon(1e-9));
  const auto g = t_test(darwin, 0, Alternative::Greater);
  CHECK(g.p_value == doctest::Approx(0.5 * 0.0497029440218).epsilon(1e-9));
  CHECK(t_test(darwin, 0, Alternative::Less).p_value == doctest::Approx(1 - g.p_value));
  const std::vector<double> flat = {3, 3, 3};
  CHECK_THROWS_AS(t_test(flat, 0, Alternative::TwoSided), Error);
}

TEST_CASE("DPD test at beta = gamma = 0 is the likelihood ratio test") {
  for (const char* name : {"telephone", "darwin", "telephone_cleaned", "darwin_cleaned"}) {
    const auto x = load_builtin(name).values;
    const auto r = dpd_test(normal, x, 0.0, 0.0, normal_mean_constraint(0.0));
    const double n = static_cast<double>(x.size());
    const double s2 = r.theta_hat[1] * r.theta_hat[1];
    const double st2 = r.theta_tilde[1] * r.theta_tilde[1];
    CHECK(std::abs(r.statistic - n * std::log(st2 / s2)) <= 1e-8 * std::max(1.0, r.statistic));
    CHECK(std::abs(s2 / st2 + std::pow(r.theta_hat[0], 2) / st2 - 1.0) <= 1e-12);
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("DPD test basics") {
  const std::vector<double> sym = {-1, 0, 1, -2, 2};
  const auto zero = dpd_test(normal, sym, 0.0, 0.0, normal_mean_constraint(0.0));
  CHECK(zero.statistic == 0.0);
  CHECK(zero.p_value == 1.0);

  const auto tel = load_builtin("telephone").values;
  const auto r = dpd_test(normal, tel, 0.15, 0.15, normal_mean_constraint(0.0));
  CHECK(r.p_value < 0.05);
  CHECK(r.reject());
  CHECK(r.statistic >= r.critical_value);
  const auto again = dpd_test(normal, tel, 0.15, 0.15, normal_mean_constraint(0.0));
  CHECK(again.statistic == r.statistic);
  CHECK(again.p_value == r.p_value);

  TestOptions mc;
  mc.force_monte_carlo = true;
  mc.mc_draws = 200000;
  const auto m = dpd_test(normal, tel, 0.15, 0.15, normal_mean_constraint(0.0), mc);
  CHECK(std::abs(m.p_value - r.p_value) < 0.003);
  mc.alpha = 1e-5;
  try {
    dpd_test(normal, tel, 0.15, 0.15, normal_mean_constraint(0.0), mc);
    FAIL("expected MCUnderResolved");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MCUnderResolved);
  }
  TestOptions at_hat;
  at_hat.eigen_point = EigenPoint::Unrestricted;
  CHECK(dpd_test(normal, tel, 0.15, 0.15, normal_mean_constraint(0.0), at_hat).eigenvalues[0] !=
        r.eigenvalues[0]);
}

TEST_CASE("signed one-sided test") {
  const auto tel = load_builtin("telephone").values;
  const auto r = signed_one_sided_test(normal, tel, 0.15, 0.15, normal_mean_constraint(0.0),
                                       Alternative::Greater);
  CHECK(r.statistic > 0);
  CHECK(std::abs(r.p_value - 0.0006) <= 0.0015);
  CHECK(std::abs(*r.t_p_value - 0.0032) <= 0.0015);
  CHECK(*r.chi_bar_p_value == doctest::Approx(r.p_value));
  const auto two = dpd_test(normal, tel, 0.15, 0.15, normal_mean_constraint(0.0));
  CHECK(r.statistic * r.statistic * r.eigenvalues[0] == doctest::Approx(two.statistic).epsilon(1e-12));
  const auto less = signed_one_sided_test(normal, tel, 0.15, 0.15, normal_mean_constraint(0.0),
                                          Alternative::Less);
  CHECK(less.p_value == doctest::Approx(1 - r.p_value));
  CHECK(*less.chi_bar_p_value == 1.0);
  const ConstraintSpec general(
      2, 1, [](const Vector& t) { return (Vector(1) << t[0] - t[1]).finished(); },
      [](const Vector&) { return (Matrix(2, 1) << 1, -1).finished(); }, "mu = sigma");
  CHECK_THROWS_AS(signed_one_sided_test(normal, tel, 0.15, 0.15, general, Alternative::Greater),
                  Error);
}
