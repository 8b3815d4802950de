#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "dpd/asymptotics.hpp"
#include "dpd/datasets.hpp"
#include "dpd/errors.hpp"
#include "dpd/estimation.hpp"
#include "dpd/power.hpp"
#include "dpd/simulation.hpp"
#include "dpd/testing.hpp"
#include "dpd/tuning.hpp"
#include "dpd/version.hpp"

namespace {

using nlohmann::json;
using dpd::Vector;

constexpr std::uint64_t kDefaultSeed = 20130101;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string model = "normal";
  std::string data;
  std::string column;
  double beta = 0.0;
  std::optional<double> gamma;
  std::optional<double> mu0;
  std::optional<double> sigma0;
  double alpha = 0.05;
  std::string seed = std::to_string(kDefaultSeed);
  std::int64_t mc_draws = 1'000'000;
  bool force_mc = false;
  std::string format = "json";
  std::string output;

  // test
  std::string eigen_point = "restricted";
  std::string alternative = "greater";
  // power / samplesize / simulate
  std::string theta;
  std::string sizes = "100";
  double target = 0.8;
  // tune
  double grid_step = 0.01;
  double pilot = 0.5;
  // simulate
  std::string outlier;
  double eps = 0.0;
  std::string betas = "0,0.1,0.25";
  int replications = 1000;
  bool t_baseline = false;
  bool exclude_failures = false;
  // datasets
  std::string name;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError(flag + " needs at least one value");
  return out;
}

Vector parse_theta(const std::string& text, int p, const std::string& flag) {
  const auto v = parse_list(text, flag);
  if (static_cast<int>(v.size()) != p) {
    throw UsageError(flag + " needs " + std::to_string(p) + " comma-separated values");
  }
  return Eigen::Map<const Vector>(v.data(), p);
}

std::uint64_t resolve_seed(const std::string& text) {
  if (text == "random") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
  }
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("--seed must be a nonnegative integer or 'random'");
  }
}

dpd::ModelPtr make_model(const std::string& name) {
  if (name == "normal") return std::make_shared<dpd::NormalModel>();
  if (name == "weibull") return std::make_shared<dpd::WeibullModel>();
  throw UsageError("unknown model '" + name + "'");
}

std::optional<dpd::ConstraintSpec> make_constraint(const Options& o, bool required) {
  if (o.model == "normal") {
    if (o.sigma0) throw UsageError("--sigma0 applies to the weibull model; use --mu0");
    if (o.mu0) return dpd::normal_mean_constraint(*o.mu0);
    if (required) throw UsageError("--mu0 is required for the normal model");
  } else {
    if (o.mu0) throw UsageError("--mu0 applies to the normal model; use --sigma0");
    if (o.sigma0) {
      if (!(*o.sigma0 > 0.0)) throw UsageError("--sigma0 must be positive");
      return dpd::weibull_scale_constraint(*o.sigma0);
    }
    if (required) throw UsageError("--sigma0 is required for the weibull model");
  }
  return std::nullopt;
}

json named(const dpd::ParametricModel& model, const Vector& theta) {
  json j = json::object();
  const auto names = model.parameter_names();
  for (Eigen::Index i = 0; i < theta.size(); ++i) j[names[static_cast<std::size_t>(i)]] = theta[i];
  return j;
}

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const dpd::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

json fit_json(const dpd::ParametricModel& model, const dpd::EstimationResult& r) {
  json j = {{"theta", named(model, r.theta_hat)},
            {"objective", r.objective_value},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"gradient_norm", r.gradient_norm},
            {"start", r.start_label}};
  if (r.lagrange_multipliers) j["lagrange_multipliers"] = to_json(*r.lagrange_multipliers);
  return j;
}

json test_json(const dpd::ParametricModel& model, const dpd::TestResult& r) {
  json j = {{"statistic", r.statistic},
            {"eigenvalues", to_json(r.eigenvalues)},
            {"p_value", r.p_value},
            {"critical_value", r.critical_value},
            {"alpha", r.alpha},
            {"reject", r.reject()},
            {"alternative", dpd::to_string(r.alternative)},
            {"method", r.method},
            {"n", r.n},
            {"theta_hat", named(model, r.theta_hat)},
            {"theta_tilde", named(model, r.theta_tilde)}};
  if (r.t_p_value) j["t_p_value"] = *r.t_p_value;
  if (r.chi_bar_p_value) j["chi_bar_p_value"] = *r.chi_bar_p_value;
  return j;
}

json analysis_json(const dpd::ParametricModel& model, const dpd::PowerAnalysis& a) {
  return {{"theta_star", named(model, a.theta_star)},
          {"theta_null_star", named(model, a.theta_null_star)},
          {"divergence_gap", a.divergence_gap},
          {"sigma2", a.sigma2},
          {"degenerate", a.degenerate},
          {"t", to_json(a.t_vec)},
          {"s", to_json(a.s_vec)},
          {"joint_covariance", to_json(a.joint_cov)},
          {"critical_value", a.critical_value},
          {"null_eigenvalues", to_json(a.null_eigenvalues)}};
}

struct Output {
  json result;
  std::optional<std::string> csv;
};

class Runner {
 public:
  Runner(const Options& o, std::uint64_t seed) : o_(o), seed_(seed) {}

  double gamma() const { return o_.gamma.value_or(o_.beta); }

  dpd::NamedDataset data() const {
    if (o_.data.empty()) throw UsageError("--data is required");
    const std::optional<std::string> column =
        o_.column.empty() ? std::nullopt : std::optional<std::string>(o_.column);
    return dpd::load_data(o_.data, column);
  }

  dpd::TestOptions test_options() const {
    dpd::TestOptions t;
    t.alpha = o_.alpha;
    t.mc_draws = o_.mc_draws;
    t.seed = seed_;
    t.force_monte_carlo = o_.force_mc;
    if (o_.eigen_point == "restricted") {
      t.eigen_point = dpd::EigenPoint::Restricted;
    } else if (o_.eigen_point == "unrestricted") {
      t.eigen_point = dpd::EigenPoint::Unrestricted;
    } else {
      throw UsageError("--eigen-point must be restricted or unrestricted");
    }
    return t;
  }

  dpd::PowerOptions power_options() const { return {o_.alpha, o_.mc_draws, seed_}; }

  std::vector<double> sample_sizes() const {
    const auto v = parse_list(o_.sizes, "--n");
    for (double n : v) {
      if (n < 2 || n != std::floor(n)) throw UsageError("--n values must be integers >= 2");
    }
    return v;
  }

  Output estimate() const {
    const auto model = make_model(o_.model);
    const auto constraint = make_constraint(o_, false);
    const auto d = data();
    const auto fit = dpd::fit_mdpde(*model, d.values, o_.beta);
    const auto m = dpd::model_matrices(*model, fit.theta_hat, o_.beta, o_.beta);
    const dpd::Matrix Jinv = dpd::spd_inverse(m.J);
    const dpd::Matrix cov = Jinv * m.K * Jinv / static_cast<double>(d.values.size());
    json r = {{"n", d.values.size()}, {"fit", fit_json(*model, fit)}, {"covariance", to_json(cov)}};
    if (constraint) {
      r["restricted_fit"] =
          fit_json(*model, dpd::fit_rmdpde(*model, d.values, o_.beta, *constraint));
    }
    return {r, std::nullopt};
  }

  Output test() const {
    const auto model = make_model(o_.model);
    const auto constraint = make_constraint(o_, true);
    const auto d = data();
    const auto r = dpd::dpd_test(*model, d.values, o_.beta, gamma(), *constraint, test_options());
    return {test_json(*model, r), std::nullopt};
  }

  Output test_onesided() const {
    const auto model = make_model(o_.model);
    const auto constraint = make_constraint(o_, true);
    const auto direction = dpd::parse_alternative(o_.alternative);
    if (direction == dpd::Alternative::TwoSided) {
      throw UsageError("--alternative must be greater or less");
    }
    const auto d = data();
    const auto r = dpd::signed_one_sided_test(*model, d.values, o_.beta, gamma(), *constraint,
                                              direction, test_options());
    return {test_json(*model, r), std::nullopt};
  }

  Output power() const {
    const auto model = make_model(o_.model);
    const auto constraint = make_constraint(o_, true);
    if (o_.theta.empty()) throw UsageError("--theta is required");
    const Vector theta = parse_theta(o_.theta, model->dimension(), "--theta");
    const auto sizes = sample_sizes();
    const auto a = dpd::analyze_power(*model, theta, *constraint, o_.beta, gamma(), power_options());
    json curve = json::array();
    for (double n : sizes) curve.push_back({{"n", static_cast<std::int64_t>(n)}, {"power", a.power(n)}});
    json r = analysis_json(*model, a);
    r["power"] = curve;
    return {r, std::nullopt};
  }

  Output samplesize() const {
    const auto model = make_model(o_.model);
    const auto constraint = make_constraint(o_, true);
    if (o_.theta.empty()) throw UsageError("--theta is required");
    if (!(o_.target > 0.0 && o_.target < 1.0)) throw UsageError("--target must lie in (0, 1)");
    const Vector theta = parse_theta(o_.theta, model->dimension(), "--theta");
    const auto a = dpd::analyze_power(*model, theta, *constraint, o_.beta, gamma(), power_options());
    const auto n = dpd::required_sample_size(a, o_.target);
    json r = analysis_json(*model, a);
    r["target"] = o_.target;
    r["n"] = n;
    r["power_at_n"] = a.power(static_cast<double>(n));
    return {r, std::nullopt};
  }

  Output tune() const {
    const auto model = make_model(o_.model);
    const auto d = data();
    if (!(o_.grid_step > 0.0 && o_.grid_step <= 1.0)) throw UsageError("--grid-step must lie in (0, 1]");
    dpd::TuningConfig config;
    const auto steps = static_cast<int>(std::floor(1.0 / o_.grid_step + 1e-9));
    for (int i = 0; i <= steps; ++i) config.grid.push_back(i * o_.grid_step);
    config.pilot_beta = o_.pilot;
    const auto t = dpd::select_beta(*model, d.values, config);
    json curve = json::array();
    std::ostringstream csv;
    csv << "beta,mse,bias2,variance,ok,selected\n" << std::setprecision(17);
    for (const auto& pt : t.curve) {
      json row = {{"beta", pt.beta}, {"ok", pt.ok}};
      if (pt.ok) {
        row["mse"] = pt.mse;
        row["bias2"] = pt.bias2;
        row["variance"] = pt.variance;
        row["theta"] = named(*model, pt.theta_hat);
      }
      curve.push_back(row);
      csv << pt.beta << ',' << pt.mse << ',' << pt.bias2 << ',' << pt.variance << ','
          << (pt.ok ? 1 : 0) << ',' << (pt.beta == t.beta_opt ? 1 : 0) << '\n';
    }
    json r = {{"beta_opt", t.beta_opt},
              {"pilot_beta", o_.pilot},
              {"pilot", named(*model, t.pilot)},
              {"failures", t.failures},
              {"n", d.values.size()},
              {"curve", curve}};
    return {r, csv.str()};
  }

  Output simulate() const {
    const auto model = make_model(o_.model);
    const auto constraint = make_constraint(o_, true);
    if (o_.theta.empty()) throw UsageError("--theta is required");
    const Vector theta = parse_theta(o_.theta, model->dimension(), "--theta");
    dpd::MixtureScenario scenario = dpd::MixtureScenario::single(model, theta, "pure");
    if (!o_.outlier.empty()) {
      if (!(o_.eps >= 0.0 && o_.eps <= 1.0)) throw UsageError("--eps must lie in [0, 1]");
      scenario = dpd::MixtureScenario::contaminated(
          model, theta, parse_theta(o_.outlier, model->dimension(), "--outlier"), o_.eps,
          "contaminated");
    } else if (o_.eps != 0.0) {
      throw UsageError("--eps needs --outlier");
    }
    dpd::ExperimentPlan plan(scenario, model, *constraint);
    plan.betas = parse_list(o_.betas, "--betas");
    plan.sample_sizes.clear();
    for (double n : sample_sizes()) plan.sample_sizes.push_back(static_cast<int>(n));
    plan.replications = o_.replications;
    plan.alpha = o_.alpha;
    plan.master_seed = seed_;
    plan.t_test_baseline = o_.t_baseline;
    plan.exclude_failures = o_.exclude_failures;
    plan.test_options = test_options();
    if (plan.t_test_baseline && o_.model != "normal") {
      throw UsageError("--t-test applies to the normal model only");
    }
    const auto table = dpd::run_experiment(plan);
    json rows = json::array();
    for (const auto& r : table.rows) {
      rows.push_back({{"n", r.n},
                      {"beta", r.beta},
                      {"gamma", r.gamma},
                      {"test", r.test},
                      {"rate", r.rate},
                      {"stderr", r.std_error},
                      {"failures", r.failures}});
    }
    std::ostringstream csv;
    table.write_csv(csv);
    return {{{"scenario", scenario.label}, {"replications", plan.replications}, {"rows", rows}},
            csv.str()};
  }

  Output datasets() const {
    if (o_.name.empty()) {
      json list = json::array();
      std::ostringstream csv;
      csv << "name,n,source\n";
      for (const auto& name : dpd::builtin_names()) {
        const auto d = dpd::load_builtin(name);
        list.push_back({{"name", name}, {"n", d.values.size()}, {"source", d.source}});
        csv << name << ',' << d.values.size() << ",\"" << d.source << "\"\n";
      }
      return {{{"datasets", list}}, csv.str()};
    }
    const auto d = dpd::load_builtin(o_.name);
    std::ostringstream csv;
    csv << d.name << '\n' << std::setprecision(17);
    for (double v : d.values) csv << v << '\n';
    return {{{"name", d.name}, {"n", d.values.size()}, {"source", d.source}, {"values", d.values}},
            csv.str()};
  }

 private:
  const Options& o_;
  std::uint64_t seed_;
};

void add_model_data(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model, "Model family")->check(CLI::IsMember({"normal", "weibull"}));
  cmd->add_option("--data", o.data, "builtin:<name> or a CSV path");
  cmd->add_option("--column", o.column, "CSV column (name or 0-based index)");
}

void add_tuning(CLI::App* cmd, Options& o) {
  cmd->add_option("--beta", o.beta, "Estimation tuning parameter")->check(CLI::NonNegativeNumber);
  cmd->add_option("--gamma", o.gamma, "Divergence parameter of the statistic (default: beta)")
      ->check(CLI::NonNegativeNumber);
}

void add_null(CLI::App* cmd, Options& o) {
  cmd->add_option("--mu0", o.mu0, "Null mean (normal model)");
  cmd->add_option("--sigma0", o.sigma0, "Null scale (weibull model)");
}

void add_calibration(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha", o.alpha, "Nominal level")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", o.seed, "Integer seed or 'random'");
  cmd->add_option("--mc-draws", o.mc_draws, "Monte Carlo draws for mixture nulls")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--force-mc", o.force_mc, "Use Monte Carlo even for a single eigenvalue");
}

void add_output(CLI::App* cmd, Options& o, bool csv) {
  if (csv) {
    cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  }
  cmd->add_option("--output,-o", o.output, "Output path (default: standard output)");
}

int configure_threads() {
  const char* env = std::getenv("DPD_NUM_THREADS");
  if (env == nullptr || *env == '\0') return omp_get_max_threads();
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) throw UsageError("DPD_NUM_THREADS must be a positive integer");
  omp_set_num_threads(static_cast<int>(n));
  return static_cast<int>(n);
}

std::vector<std::string> echo_invocation(int argc, char** argv, const std::string& command,
                                         bool uses_seed, std::uint64_t seed) {
  std::vector<std::string> out{"dpd"};
  bool seen_seed = false;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      out.push_back(arg);
      out.push_back(std::to_string(seed));
      ++i;
      seen_seed = true;
      continue;
    }
    if (arg.rfind("--seed=", 0) == 0) {
      out.push_back("--seed=" + std::to_string(seed));
      seen_seed = true;
      continue;
    }
    out.push_back(arg);
  }
  if (uses_seed && !seen_seed && !command.empty()) {
    out.push_back("--seed");
    out.push_back(std::to_string(seed));
  }
  return out;
}

json inputs_json(const Options& o, const std::string& command) {
  json j = json::object();
  if (command == "datasets") {
    if (!o.name.empty()) j["name"] = o.name;
    return j;
  }
  j["model"] = o.model;
  if (!o.data.empty()) j["data"] = o.data;
  if (!o.column.empty()) j["column"] = o.column;
  if (command != "simulate") j["beta"] = o.beta;
  if (command != "estimate" && command != "tune") {
    if (command != "simulate") j["gamma"] = o.gamma.value_or(o.beta);
    j["alpha"] = o.alpha;
  }
  if (o.mu0) j["mu0"] = *o.mu0;
  if (o.sigma0) j["sigma0"] = *o.sigma0;
  if (command == "test" || command == "test-onesided" || command == "power" ||
      command == "samplesize" || command == "simulate") {
    j["mc_draws"] = o.mc_draws;
    j["force_mc"] = o.force_mc;
  }
  if (command == "test" || command == "test-onesided") j["eigen_point"] = o.eigen_point;
  if (command == "test-onesided") j["alternative"] = o.alternative;
  if (command == "power" || command == "samplesize" || command == "simulate") j["theta"] = o.theta;
  if (command == "power" || command == "simulate") j["n"] = o.sizes;
  if (command == "samplesize") j["target"] = o.target;
  if (command == "tune") {
    j["grid_step"] = o.grid_step;
    j["pilot"] = o.pilot;
  }
  if (command == "simulate") {
    j["betas"] = o.betas;
    j["replications"] = o.replications;
    j["t_test"] = o.t_baseline;
    j["exclude_failures"] = o.exclude_failures;
    if (!o.outlier.empty()) {
      j["outlier"] = o.outlier;
      j["eps"] = o.eps;
    }
  }
  return j;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw dpd::Error(dpd::ErrorKind::IoError, "cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Robust estimation and testing with the density power divergence", "dpd"};
  app.set_version_flag("--version", std::string(dpd::kVersion) + " (" + dpd::kGitDescribe + ")");
  app.require_subcommand(1);

  auto* estimate = app.add_subcommand("estimate", "Minimum DPD estimate (and restricted fit with --mu0/--sigma0)");
  add_model_data(estimate, o);
  estimate->add_option("--beta", o.beta, "Estimation tuning parameter")->check(CLI::NonNegativeNumber);
  add_null(estimate, o);
  add_output(estimate, o, false);

  auto* test = app.add_subcommand("test", "Two-sided DPD test of a simple null value");
  add_model_data(test, o);
  add_tuning(test, o);
  add_null(test, o);
  add_calibration(test, o);
  test->add_option("--eigen-point", o.eigen_point, "restricted or unrestricted");
  add_output(test, o, false);

  auto* onesided = app.add_subcommand("test-onesided", "Signed one-sided DPD test");
  add_model_data(onesided, o);
  add_tuning(onesided, o);
  add_null(onesided, o);
  add_calibration(onesided, o);
  onesided->add_option("--eigen-point", o.eigen_point, "restricted or unrestricted");
  onesided->add_option("--alternative", o.alternative, "greater or less");
  add_output(onesided, o, false);

  auto* power = app.add_subcommand("power", "Approximate power at a fixed alternative");
  power->add_option("--model", o.model, "Model family")->check(CLI::IsMember({"normal", "weibull"}));
  add_tuning(power, o);
  add_null(power, o);
  add_calibration(power, o);
  power->add_option("--theta", o.theta, "True parameter, comma-separated");
  power->add_option("--n", o.sizes, "Sample sizes, comma-separated");
  add_output(power, o, false);

  auto* samplesize = app.add_subcommand("samplesize", "Sample size reaching a target power");
  samplesize->add_option("--model", o.model, "Model family")->check(CLI::IsMember({"normal", "weibull"}));
  add_tuning(samplesize, o);
  add_null(samplesize, o);
  add_calibration(samplesize, o);
  samplesize->add_option("--theta", o.theta, "True parameter, comma-separated");
  samplesize->add_option("--target", o.target, "Target power in (0, 1)");
  add_output(samplesize, o, false);

  auto* tune = app.add_subcommand("tune", "Select beta by estimated mean square error");
  add_model_data(tune, o);
  tune->add_option("--grid-step", o.grid_step, "Grid spacing on [0, 1]");
  tune->add_option("--pilot", o.pilot, "Pilot beta")->check(CLI::Range(0.0, 1.0));
  add_output(tune, o, true);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rejection rates");
  simulate->add_option("--model", o.model, "Model family")->check(CLI::IsMember({"normal", "weibull"}));
  add_null(simulate, o);
  add_calibration(simulate, o);
  simulate->add_option("--theta", o.theta, "Parameter of the main component");
  simulate->add_option("--outlier", o.outlier, "Parameter of the contaminating component");
  simulate->add_option("--eps", o.eps, "Contamination weight");
  simulate->add_option("--n", o.sizes, "Sample sizes, comma-separated");
  simulate->add_option("--betas", o.betas, "Betas (gamma = beta), comma-separated");
  simulate->add_option("--reps", o.replications, "Replications")->check(CLI::PositiveNumber);
  simulate->add_flag("--t-test", o.t_baseline, "Add the Student t baseline");
  simulate->add_flag("--exclude-failures", o.exclude_failures, "Drop failed fits from the denominator");
  add_output(simulate, o, true);

  auto* datasets = app.add_subcommand("datasets", "List built-in datasets or print one");
  datasets->add_option("--name", o.name, "Dataset to print");
  add_output(datasets, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  const bool uses_seed = sub->get_option_no_throw("--seed") != nullptr;

  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  json envelope;
  try {
    seed = resolve_seed(o.seed);
    threads = configure_threads();
    envelope = {{"tool", {{"name", "dpd"}, {"version", dpd::kVersion}, {"git", dpd::kGitDescribe}}},
                {"command", command},
                {"invocation", echo_invocation(argc, argv, command, uses_seed, seed)},
                {"seed", seed},
                {"threads", threads},
                {"inputs", inputs_json(o, command)}};

    const Runner runner(o, seed);
    Output out;
    if (command == "estimate") out = runner.estimate();
    else if (command == "test") out = runner.test();
    else if (command == "test-onesided") out = runner.test_onesided();
    else if (command == "power") out = runner.power();
    else if (command == "samplesize") out = runner.samplesize();
    else if (command == "tune") out = runner.tune();
    else if (command == "simulate") out = runner.simulate();
    else out = runner.datasets();

    if (o.format == "csv") {
      emit(o.output, *out.csv);
    } else {
      envelope["result"] = out.result;
      emit(o.output, envelope.dump(2) + "\n");
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "dpd " << command << ": " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const dpd::Error& e) {
    envelope["error"] = {{"kind", dpd::to_string(e.kind())}, {"message", e.what()}};
    std::cerr << "dpd " << command << ": " << e.what() << '\n';
    try {
      emit(o.output, envelope.dump(2) + "\n");
    } catch (const dpd::Error&) {
      std::cout << envelope.dump(2) << '\n';
    }
    return 1;
  }
}
