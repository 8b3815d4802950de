#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dpd/divergence.hpp"
#include "dpd/errors.hpp"
#include "oracles.hpp"

using namespace dpd;

namespace {

Vector theta2(double a, double b) {
  Vector t(2);
  t << a, b;
  return t;
}

const NormalModel normal;
const WeibullModel weibull;

}  // namespace

TEST_CASE("dpd examples") {
  CHECK(dpd::dpd(normal, theta2(1, 2), theta2(1, 2), 0.3) == 0.0);
  CHECK(dpd::dpd(normal, theta2(0, 1), theta2(1, 1), 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(oracle::dpd(normal, theta2(0, 1), theta2(1, 1), 0.0) == doctest::Approx(0.5).epsilon(1e-9));

  const Vector a = theta2(1.5, 1.5), b = theta2(1.2, 1.5);
  CHECK(std::abs(dpd::dpd(weibull, a, b, 0.5) - oracle::dpd(weibull, a, b, 0.5)) < 1e-7);
}

TEST_CASE("dpd agrees with raw quadrature and is nonnegative") {
  const std::vector<std::pair<Vector, Vector>> normal_pairs = {
      {theta2(0, 1), theta2(0.3, 1.4)}, {theta2(-2, 0.5), theta2(1, 2)}, {theta2(5, 3), theta2(5, 1)}};
  const std::vector<std::pair<Vector, Vector>> weibull_pairs = {
      {theta2(1.5, 1.5), theta2(1.1, 1.5)}, {theta2(1, 0.8), theta2(2, 2)}, {theta2(3, 2), theta2(2.5, 3)}};
  for (double g : {0.0, 0.1, 0.5, 1.0}) {
    for (const auto& [a, b] : normal_pairs) {
      const double v = dpd::dpd(normal, a, b, g);
      CHECK(v > 0);
      CHECK(v == doctest::Approx(oracle::dpd(normal, a, b, g)).epsilon(1e-8));
      CHECK(v == doctest::Approx(dpd_quadrature(normal, a, b, g)).epsilon(1e-8));
    }
    for (const auto& [a, b] : weibull_pairs) {
      const double v = dpd::dpd(weibull, a, b, g);
      CHECK(v > 0);
      CHECK(std::abs(v - oracle::dpd(weibull, a, b, g)) < 1e-7);
      CHECK(std::abs(v - dpd_quadrature(weibull, a, b, g)) < 1e-7);
    }
  }
}

TEST_CASE("dpd gamma continuity at zero") {
  for (const auto& [a, b] : {std::pair{theta2(0, 1), theta2(0.5, 1.5)},
                             std::pair{theta2(-1, 2), theta2(1, 0.7)}}) {
    CHECK(std::abs(dpd::dpd(normal, a, b, 1e-6) - dpd::dpd(normal, a, b, 0.0)) <= 1e-4);
    CHECK(dpd::dpd(normal, a, b, 1e-9) == dpd::dpd(normal, a, b, 0.0));
  }
  const Vector a = theta2(1.5, 1.5), b = theta2(1.2, 1.8);
  CHECK(std::abs(dpd::dpd(weibull, a, b, 1e-6) - dpd::dpd(weibull, a, b, 0.0)) <= 1e-4);
}

TEST_CASE("dpd input validation") {
  try {
    dpd::dpd(normal, theta2(0, -1), theta2(0, 1), 0.5);
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainError);
  }
  CHECK_THROWS_AS(dpd::dpd(normal, theta2(0, 1), theta2(0, 2), -0.1), Error);
  CHECK_THROWS_AS((DivergenceConfig{0.1, -1}.validate()), Error);
}

TEST_CASE("empirical objective examples") {
  const std::vector<double> zero = {0.0};
  CHECK(empirical_objective(normal, theta2(0, 1), zero, 0.0) ==
        doctest::Approx(0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-14));
  const double v = 1 / (2 * std::sqrt(std::numbers::pi)) - 2 / std::sqrt(2 * std::numbers::pi);
  CHECK(empirical_objective(normal, theta2(0, 1), zero, 1.0) == doctest::Approx(v).epsilon(1e-14));
  CHECK(v == doctest::Approx(-0.5158).epsilon(1e-4));

  const std::vector<double> neg = {1.0, -1.0};
  try {
    empirical_objective(weibull, theta2(1, 1), neg, 0.5);
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainError);
  }
}

TEST_CASE("estimating function is the scaled objective gradient") {
  RngStream rng(2024, 0);
  std::vector<double> xn(60), xw(60);
  for (auto& x : xn) x = normal.sample(theta2(0.5, 1.2), rng);
  for (auto& x : xw) x = weibull.sample(theta2(1.5, 1.5), rng);
  double worst = 0.0;
  for (int probe = 0; probe < 20; ++probe) {
    const double beta = 0.05 * probe;
    const Vector tn = theta2(0.5 + 0.3 * (rng.next_uniform() - 0.5), 1.0 + 0.5 * rng.next_uniform());
    const Vector tw = theta2(1.2 + 0.6 * rng.next_uniform(), 1.2 + 0.6 * rng.next_uniform());
    for (const auto& [m, t, x] : {std::tuple<const ParametricModel*, Vector, const std::vector<double>*>{&normal, tn, &xn},
                                  std::tuple<const ParametricModel*, Vector, const std::vector<double>*>{&weibull, tw, &xw}}) {
      const ParametricModel* model = m;
      const auto& data = *x;
      const Vector fd = oracle::gradient(
          [&](const Vector& th) { return empirical_objective(*model, th, data, beta); }, t, 1e-5);
      const Vector est = estimating_function(*model, t, data, beta);
      const double scale = beta < kLimitThreshold ? 1.0 : 1.0 + beta;
      const Vector g = -scale * est;
      worst = std::max(worst, (g - fd).lpNorm<Eigen::Infinity>() /
                                  std::max(1e-3, fd.lpNorm<Eigen::Infinity>()));
    }
  }
  CHECK(worst <= 1e-5);

  const std::vector<double> sym = {-1.0, 1.0};
  CHECK(estimating_function(normal, theta2(0, 1), sym, 0.0)[0] == 0.0);
}
