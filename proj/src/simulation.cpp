#include "dpd/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dpd/errors.hpp"

namespace dpd {
namespace {

enum Outcome : std::uint8_t { kAccept = 0, kReject = 1, kFailed = 2 };

struct Layout {
  std::size_t sizes;
  std::size_t betas;
  std::size_t tests;
  std::size_t per_replication() const { return sizes * betas * tests; }
};

Layout layout(const ExperimentPlan& plan) {
  return {plan.sample_sizes.size(), plan.betas.size(), plan.t_test_baseline ? 2u : 1u};
}

// One replication; outcomes laid out as [size][beta][test], where the t row
// only uses beta index 0.
void replicate(const ExperimentPlan& plan, std::uint64_t index, std::span<Outcome> out) {
  RngStream stream(plan.master_seed, index);
  const int n_max = *std::max_element(plan.sample_sizes.begin(), plan.sample_sizes.end());
  const std::vector<double> full = sample_scenario(plan.scenario, n_max, stream);
  TestOptions options = plan.test_options;
  options.alpha = plan.alpha;
  const Layout lay = layout(plan);
  for (std::size_t s = 0; s < lay.sizes; ++s) {
    const std::span<const double> data(full.data(), static_cast<std::size_t>(plan.sample_sizes[s]));
    for (std::size_t b = 0; b < lay.betas; ++b) {
      Outcome& slot = out[(s * lay.betas + b) * lay.tests];
      try {
        const double beta = plan.betas[b];
        slot = dpd_test(*plan.model, data, beta, beta, plan.constraint, options).reject() ? kReject
                                                                                         : kAccept;
      } catch (const Error&) {
        slot = kFailed;
      }
    }
    if (plan.t_test_baseline) {
      Outcome& slot = out[(s * lay.betas) * lay.tests + 1];
      try {
        const double mu0 = plan.constraint.pinned().front().second;
        slot = t_test(data, mu0, Alternative::TwoSided, plan.alpha).reject() ? kReject : kAccept;
      } catch (const Error&) {
        slot = kFailed;
      }
    }
  }
}

RejectionTable tabulate(const ExperimentPlan& plan, const std::vector<Outcome>& outcomes) {
  const Layout lay = layout(plan);
  RejectionTable table;
  const auto row = [&](std::size_t s, std::size_t b, std::size_t t) {
    int rejected = 0, failed = 0;
    for (int r = 0; r < plan.replications; ++r) {
      const Outcome o = outcomes[static_cast<std::size_t>(r) * lay.per_replication() +
                                 (s * lay.betas + b) * lay.tests + t];
      rejected += o == kReject;
      failed += o == kFailed;
    }
    RejectionRow out;
    out.n = plan.sample_sizes[s];
    out.beta = t == 0 ? plan.betas[b] : 0.0;
    out.gamma = out.beta;
    out.test = t == 0 ? "dpd" : "t";
    out.failures = failed;
    out.replications = plan.replications;
    const int denominator = plan.exclude_failures ? plan.replications - failed : plan.replications;
    out.rate = denominator > 0 ? static_cast<double>(rejected) / denominator
                               : std::numeric_limits<double>::quiet_NaN();
    out.std_error = denominator > 0 ? std::sqrt(out.rate * (1.0 - out.rate) / denominator)
                                    : std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back(out);
  };
  for (std::size_t s = 0; s < lay.sizes; ++s) {
    for (std::size_t b = 0; b < lay.betas; ++b) row(s, b, 0);
    if (plan.t_test_baseline) row(s, 0, 1);
  }
  return table;
}

}  // namespace

void MixtureScenario::validate() const {
  if (components.empty() || components.size() != weights.size()) {
    throw Error(ErrorKind::DomainError, "scenario needs one weight per component");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < components.size(); ++j) {
    if (!components[j].model || !components[j].model->in_domain(components[j].theta)) {
      throw Error(ErrorKind::DomainError, "scenario component outside its parameter space");
    }
    if (!(weights[j] >= 0.0 && weights[j] <= 1.0)) {
      throw Error(ErrorKind::DomainError, "scenario weights must lie in [0, 1]");
    }
    total += weights[j];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::DomainError, "scenario weights must sum to 1");
  }
}

MixtureScenario MixtureScenario::single(ModelPtr model, Vector theta, std::string label) {
  MixtureScenario s;
  s.components.push_back({std::move(model), std::move(theta)});
  s.weights = {1.0};
  s.label = std::move(label);
  return s;
}

MixtureScenario MixtureScenario::contaminated(ModelPtr model, Vector theta, Vector outlier,
                                              double eps, std::string label) {
  MixtureScenario s;
  s.components.push_back({model, std::move(theta)});
  s.components.push_back({std::move(model), std::move(outlier)});
  s.weights = {1.0 - eps, eps};
  s.label = std::move(label);
  return s;
}

std::vector<double> sample_scenario(const MixtureScenario& scenario, int n, RngStream& stream) {
  scenario.validate();
  if (n < 1) throw Error(ErrorKind::DomainError, "sample size must be positive");
  std::vector<double> cumulative(scenario.weights.size());
  std::partial_sum(scenario.weights.begin(), scenario.weights.end(), cumulative.begin());
  cumulative.back() = std::numeric_limits<double>::infinity();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) {
    const double u = stream.next_uniform();
    const auto j = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    const auto& c = scenario.components[j];
    x = c.model->sample(c.theta, stream);
  }
  return out;
}

ExperimentPlan::ExperimentPlan(MixtureScenario scenario_, ModelPtr model_,
                               ConstraintSpec constraint_)
    : scenario(std::move(scenario_)), model(std::move(model_)), constraint(std::move(constraint_)) {}

void ExperimentPlan::validate() const {
  scenario.validate();
  if (!model) throw Error(ErrorKind::DomainError, "plan needs a model");
  if (constraint.dimension() != model->dimension()) {
    throw Error(ErrorKind::InvalidConstraint, "constraint dimension differs from the model's");
  }
  if (betas.empty() || sample_sizes.empty()) {
    throw Error(ErrorKind::DomainError, "plan needs at least one beta and one sample size");
  }
  for (double b : betas) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw Error(ErrorKind::DomainError, "beta must be >= 0");
  }
  for (int n : sample_sizes) {
    if (n < 2) throw Error(ErrorKind::DomainError, "sample sizes must be at least 2");
  }
  if (replications < 1) throw Error(ErrorKind::DomainError, "replications must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::DomainError, "alpha must lie in (0, 1)");
  if (t_test_baseline && !constraint.is_pinning()) {
    throw Error(ErrorKind::InvalidConstraint, "the t baseline needs a pinned null value");
  }
}

RejectionTable run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const std::size_t stride = layout(plan).per_replication();
  std::vector<Outcome> outcomes(static_cast<std::size_t>(plan.replications) * stride);
#pragma omp parallel for schedule(dynamic, 4)
  for (int r = 0; r < plan.replications; ++r) {
    replicate(plan, static_cast<std::uint64_t>(r),
              std::span<Outcome>(outcomes).subspan(static_cast<std::size_t>(r) * stride, stride));
  }
  return tabulate(plan, outcomes);
}

RejectionTable run_experiment_serial(const ExperimentPlan& plan) {
  plan.validate();
  const std::size_t stride = layout(plan).per_replication();
  std::vector<Outcome> outcomes(static_cast<std::size_t>(plan.replications) * stride);
  for (int r = 0; r < plan.replications; ++r) {
    replicate(plan, static_cast<std::uint64_t>(r),
              std::span<Outcome>(outcomes).subspan(static_cast<std::size_t>(r) * stride, stride));
  }
  return tabulate(plan, outcomes);
}

const RejectionRow& RejectionTable::find(int n, double beta, const std::string& test) const {
  for (const auto& r : rows) {
    if (r.n == n && r.test == test && (test != "dpd" || std::abs(r.beta - beta) < 1e-12)) return r;
  }
  std::ostringstream msg;
  msg << "no row for n = " << n << ", beta = " << beta << ", test = " << test;
  throw Error(ErrorKind::DomainError, msg.str());
}

void RejectionTable::write_csv(std::ostream& out) const {
  out << "n,beta,gamma,test,rate,stderr,failures\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rows) {
    out << r.n << ',' << r.beta << ',' << r.gamma << ',' << r.test << ',' << r.rate << ','
        << r.std_error << ',' << r.failures << '\n';
  }
}

}  // namespace dpd
