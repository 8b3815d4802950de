#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dpd/datasets.hpp"
#include "dpd/errors.hpp"
#include "dpd/rng.hpp"
#include "dpd/tuning.hpp"

using namespace dpd;

namespace {
const NormalModel normal;
}

TEST_CASE("tuning on the telephone and Darwin data") {
  const auto tel = select_beta(normal, load_builtin("telephone").values);
  CHECK(std::abs(tel.beta_opt - 0.1919) <= 0.03);
  const auto darwin = select_beta(normal, load_builtin("darwin").values);
  CHECK(std::abs(darwin.beta_opt - 0.5657) <= 0.06);
  CHECK(tel.curve.size() == 101);
  CHECK(tel.failures == 0);

  TuningConfig heavy;
  heavy.pilot_beta = 1.0;
  CHECK(std::abs(select_beta(normal, load_builtin("telephone").values, heavy).beta_opt - tel.beta_opt) <= 0.15);
  CHECK(std::abs(select_beta(normal, load_builtin("darwin").values, heavy).beta_opt - darwin.beta_opt) <= 0.15);
}

TEST_CASE("curve properties") {
  const auto x = load_builtin("darwin").values;
  const auto r = select_beta(normal, x);
  const auto best = std::min_element(r.curve.begin(), r.curve.end(),
                                     [](const auto& a, const auto& b) { return a.mse < b.mse; });
  CHECK(best->beta == r.beta_opt);
  for (const auto& pt : r.curve) {
    CHECK(pt.ok);
    CHECK(std::isfinite(pt.mse));
    CHECK(pt.mse == doctest::Approx(pt.bias2 + pt.variance));
  }
  // The pilot point has zero bias.
  CHECK(r.curve[50].bias2 == doctest::Approx(0.0).epsilon(1e-12));
  const auto again = select_beta(normal, x);
  CHECK(again.beta_opt == r.beta_opt);
  for (std::size_t i = 0; i < r.curve.size(); ++i) CHECK(again.curve[i].mse == r.curve[i].mse);

  TuningConfig location;
  location.target = {0};
  const auto loc = select_beta(normal, x, location);
  CHECK(loc.curve[10].mse <= r.curve[10].mse);
}

TEST_CASE("clean normal data need little downweighting") {
  // Holds for a typical sample, not every one; about one in seven exceeds 0.3.
  std::vector<double> picks;
  for (std::uint64_t s = 0; s < 15; ++s) {
    RngStream rng(2024, s);
    std::vector<double> x(1000);
    for (auto& v : x) v = rng.next_gaussian();
    picks.push_back(select_beta(normal, x).beta_opt);
  }
  std::nth_element(picks.begin(), picks.begin() + 7, picks.end());
  CHECK(picks[7] <= 0.3);
}

TEST_CASE("configuration checks") {
  const auto x = load_builtin("darwin").values;
  TuningConfig bad;
  bad.grid = {0.2, 0.1};
  CHECK_THROWS_AS(select_beta(normal, x, bad), Error);
  bad.grid = {0.0, 0.5, 1.5};
  CHECK_THROWS_AS(select_beta(normal, x, bad), Error);
  bad.grid = {0.0, 0.2};
  CHECK_THROWS_AS(select_beta(normal, x, bad), Error);  // pilot 0.5 outside the grid range
  bad.pilot_beta = 0.1;
  bad.target = {3};
  CHECK_THROWS_AS(select_beta(normal, x, bad), Error);
  TuningConfig tie;
  tie.grid = {0.3, 0.5};
  tie.pilot_beta = 0.5;
  CHECK(select_beta(normal, x, tie).curve.size() == 2);
}
