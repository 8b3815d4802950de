#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpd/models.hpp"
#include "dpd/rng.hpp"
#include "dpd/testing.hpp"

namespace dpd {

struct ScenarioComponent {
  ModelPtr model;
  Vector theta;
};

/// Data law sum_j weights[j] * f_j.
struct MixtureScenario {
  std::vector<ScenarioComponent> components;
  std::vector<double> weights;
  std::string label;

  void validate() const;

  static MixtureScenario single(ModelPtr model, Vector theta, std::string label = {});
  /// (1 - eps) f(theta) + eps f(outlier).
  static MixtureScenario contaminated(ModelPtr model, Vector theta, Vector outlier, double eps,
                                      std::string label = {});
};

/// n iid draws: a component picked by weight, then one draw from it.
std::vector<double> sample_scenario(const MixtureScenario& scenario, int n, RngStream& stream);

struct ExperimentPlan {
  ExperimentPlan(MixtureScenario scenario, ModelPtr model, ConstraintSpec constraint);

  MixtureScenario scenario;
  ModelPtr model;  // family fitted to every sample
  ConstraintSpec constraint;
  std::vector<double> betas{0.0};  // gamma = beta
  std::vector<int> sample_sizes{100};
  int replications = 1000;
  double alpha = 0.05;
  std::uint64_t master_seed = 20130101;
  /// Student t-test of the sample mean against the first pinned value.
  bool t_test_baseline = false;
  /// Drop failed fits from the rate denominator instead of counting them as acceptances.
  bool exclude_failures = false;
  TestOptions test_options;

  void validate() const;
};

struct RejectionRow {
  int n = 0;
  double beta = 0.0;
  double gamma = 0.0;
  std::string test;  // "dpd" or "t"
  double rate = 0.0;
  double std_error = 0.0;  // sqrt(rate (1 - rate) / denominator)
  int failures = 0;
  int replications = 0;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;

  const RejectionRow& find(int n, double beta, const std::string& test = "dpd") const;
  void write_csv(std::ostream& out) const;
};

/// Replication i draws from stream i of master_seed; each replication draws
/// max(sample_sizes) points once and uses its leading n for every n.
/// OpenMP-parallel over replications.
RejectionTable run_experiment(const ExperimentPlan& plan);
/// Single-threaded reference; identical table.
RejectionTable run_experiment_serial(const ExperimentPlan& plan);

}  // namespace dpd
