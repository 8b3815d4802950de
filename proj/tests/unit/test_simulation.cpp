#include <cmath>
#include <memory>
#include <sstream>

#include <omp.h>

#include "doctest.h"
#include "dpd/errors.hpp"
#include "dpd/simulation.hpp"

using namespace dpd;

namespace {

const auto normal = std::make_shared<NormalModel>();
const auto weibull = std::make_shared<WeibullModel>();

Vector vec(double a, double b) { return (Vector(2) << a, b).finished(); }

void check_same(const RejectionTable& a, const RejectionTable& b) {
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].rate == b.rows[i].rate);
    CHECK(a.rows[i].failures == b.rows[i].failures);
    CHECK(a.rows[i].test == b.rows[i].test);
  }
}

}  // namespace

TEST_CASE("scenario sampling") {
  RngStream s1(3, 0);
  const auto x = sample_scenario(MixtureScenario::single(normal, vec(0, 1)), 100000, s1);
  double mean = 0;
  for (double v : x) mean += v / x.size();
  CHECK(std::abs(mean) < 0.02);

  auto pinned = MixtureScenario::contaminated(normal, vec(0, 1), vec(100, 1), 0.0);
  RngStream s2(3, 1);
  for (double v : sample_scenario(pinned, 5000, s2)) CHECK(v < 50);

  RngStream s3(3, 2);
  const auto mixed = sample_scenario(
      MixtureScenario::contaminated(normal, vec(0, 1), vec(-10, 1), 0.1), 100000, s3);
  const double low = std::count_if(mixed.begin(), mixed.end(), [](double v) { return v < -5; });
  CHECK(std::abs(low / mixed.size() - 0.10) <= 0.006);

  MixtureScenario bad = MixtureScenario::single(normal, vec(0, 1));
  bad.weights = {0.9};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.weights = {1.0};
  bad.components[0].theta = vec(0, -1);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("experiments are reproducible across thread counts") {
  ExperimentPlan plan(MixtureScenario::contaminated(normal, vec(0, 1), vec(-10, 1), 0.1), normal,
                      normal_mean_constraint(0.0));
  plan.betas = {0.0, 0.25};
  plan.sample_sizes = {20, 50};
  plan.replications = 150;
  plan.t_test_baseline = true;
  const auto serial = run_experiment_serial(plan);
  check_same(serial, run_experiment(plan));
  const int before = omp_get_max_threads();
  omp_set_num_threads(4);
  check_same(serial, run_experiment(plan));
  omp_set_num_threads(before);
  CHECK(serial.rows.size() == 6);
  const auto& row = serial.find(50, 0.25);
  CHECK(row.std_error == doctest::Approx(std::sqrt(row.rate * (1 - row.rate) / 150)));

  std::ostringstream csv;
  serial.write_csv(csv);
  CHECK(csv.str().rfind("n,beta,gamma,test,rate,stderr,failures\n", 0) == 0);
  plan.master_seed += 1;
  const auto other = run_experiment_serial(plan);
  bool differs = false;
  for (std::size_t i = 0; i < other.rows.size(); ++i) differs |= other.rows[i].rate != serial.rows[i].rate;
  CHECK(differs);
}

TEST_CASE("exact null rate is within four standard errors of alpha") {
  ExperimentPlan plan(MixtureScenario::single(normal, vec(0, 1)), normal, normal_mean_constraint(0.0));
  plan.sample_sizes = {200};
  plan.replications = 2000;
  const auto& row = run_experiment(plan).find(200, 0.0);
  CHECK(std::abs(row.rate - 0.05) <= 4 * std::sqrt(0.05 * 0.95 / 2000));
}

TEST_CASE("power under a clear shift") {
  ExperimentPlan plan(MixtureScenario::single(normal, vec(1, 1)), normal, normal_mean_constraint(0.0));
  plan.betas = {0.0, 0.1, 0.25};
  plan.replications = 400;
  for (const auto& row : run_experiment(plan).rows) CHECK(row.rate > 0.99);
}

TEST_CASE("failed fits count as acceptances") {
  // Weibull fitted to data with negative values: every replication fails.
  ExperimentPlan plan(MixtureScenario::single(normal, vec(0, 1)), weibull,
                      weibull_scale_constraint(1.0));
  plan.sample_sizes = {10};
  plan.replications = 20;
  const auto table = run_experiment(plan);
  CHECK(table.rows[0].failures == 20);
  CHECK(table.rows[0].rate == 0.0);
  plan.exclude_failures = true;
  CHECK(std::isnan(run_experiment(plan).rows[0].rate));

  plan.replications = 0;
  CHECK_THROWS_AS(run_experiment(plan), Error);
  plan.replications = 5;
  plan.sample_sizes = {1};
  CHECK_THROWS_AS(run_experiment(plan), Error);
}

TEST_CASE("Weibull level and power") {
  ExperimentPlan plan(MixtureScenario::single(weibull, vec(1.5, 1.5)), weibull,
                      weibull_scale_constraint(1.5));
  plan.betas = {0.25};
  plan.replications = 1000;
  const auto& level = run_experiment(plan).find(100, 0.25);
  CHECK(level.rate >= 0.02);
  CHECK(level.rate <= 0.09);
  CHECK(level.failures == 0);
  plan.scenario = MixtureScenario::single(weibull, vec(1.1, 1.5));
  CHECK(run_experiment(plan).find(100, 0.25).rate >= 0.5);
}
