// elo_lab: command-line front end for the rating-dynamics library.
//
// Exit status: 0 success, 1 runtime or numerical failure, 2 usage or
// validation error (including unstable step sizes and malformed input).

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "elolab/elolab.hpp"
#include "reproduce.hpp"

namespace {

using namespace elolab;
using namespace elolab::cli;

struct ScenarioOptions {
  int teams = 15;
  double variance = 3.0;
  double hfa = 0.0;

  ScenarioParams params() const { return {teams, variance, hfa, 1.0}; }
  void record(nlohmann::ordered_json& j) const {
    j["M"] = teams;
    j["v"] = variance;
    j["eta"] = hfa;
  }
};

void add_scenario_options(CLI::App* app, ScenarioOptions& opts) {
  app->add_option("--M", opts.teams, "number of teams")->check(CLI::Range(2, 100000));
  app->add_option("--v", opts.variance, "variance of the true-skill prior")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--eta", opts.hfa, "home-field advantage");
}

void print_scalar(std::ostream& out, const char* name, double value) {
  out << name << " = " << format_number(value) << '\n';
}

// ---------------------------------------------------------------- theory

struct TheoryOptions {
  ScenarioOptions scenario;
  double beta = 0.1;
  int games = 200;
  std::string out;
};

int run_theory(const TheoryOptions& o) {
  const auto scen = o.scenario.params();
  scen.validate();
  const auto s = model_scalars(o.beta, scen);
  const auto curves = theory_trajectory(o.beta, scen, o.games);

  std::ostringstream block;
  print_scalar(block, "h_bar", s.h_bar);
  print_scalar(block, "h2_bar", s.h2_bar);
  print_scalar(block, "ell_min", s.ell_min);
  print_scalar(block, "alpha1", s.rates.alpha1);
  print_scalar(block, "alpha2", s.rates.alpha2);
  print_scalar(block, "tau1", s.rates.tau1);
  print_scalar(block, "tau2", s.rates.tau2);
  print_scalar(block, "tau1_exact", s.rates.tau1_exact);
  print_scalar(block, "tau2_exact", s.rates.tau2_exact);
  print_scalar(block, "d0", s.d0);
  print_scalar(block, "d_inf", s.d_inf);
  print_scalar(block, "v_th", s.v_threshold);
  print_scalar(block, "improvement_bound", s.improvement_bound);
  print_scalar(block, "stability_limit", stability_limit(scen));
  std::cout << block.str();

  OutputBundle bundle("theory", o.out);
  o.scenario.record(bundle.parameters());
  bundle.parameters()["beta"] = o.beta;
  bundle.parameters()["K"] = o.games;
  nlohmann::ordered_json scalars;
  scalars["h_bar"] = json_number(s.h_bar);
  scalars["h2_bar"] = json_number(s.h2_bar);
  scalars["ell_min"] = json_number(s.ell_min);
  scalars["alpha1"] = json_number(s.rates.alpha1);
  scalars["alpha2"] = json_number(s.rates.alpha2);
  scalars["tau1"] = json_number(s.rates.tau1);
  scalars["tau2"] = json_number(s.rates.tau2);
  scalars["tau1_exact"] = json_number(s.rates.tau1_exact);
  scalars["tau2_exact"] = json_number(s.rates.tau2_exact);
  scalars["d0"] = json_number(s.d0);
  scalars["d_inf"] = json_number(s.d_inf);
  scalars["v_th"] = json_number(s.v_threshold);
  scalars["improvement_bound"] = json_number(s.improvement_bound);
  scalars["stability_limit"] = json_number(stability_limit(scen));
  bundle.write_json("theory_scalars.json", scalars);

  auto table = CurveTable::with_key("k", curves.k_grid);
  table.add("mean_skill_factor", curves.mean_skill_factor)
      .add("msd", curves.msd)
      .add("bias_sq", curves.bias_sq)
      .add("total_variance", curves.total_variance)
      .add("excess_loss", curves.excess_loss)
      .add("mean_loss", curves.mean_loss);
  bundle.write_curves("theory_curves", table);
  bundle.finish();
  return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateOptions {
  ScenarioOptions scenario;
  double beta = 0.1;
  int games = 200;
  int runs = 100;
  std::uint64_t seed = 1;
  std::string scheduler = "uniform-random";
  std::string engine = "exact-elo";
  double tolerance = 0.1;
  std::string out;
};

void print_deviation(std::ostream& out, const CurveDeviation& d, double tolerance) {
  out << d.name << ": max_rel_dev = " << format_number(d.max_rel_dev) << " at k = " << d.k_at_max
      << ", mean_rel_dev = " << format_number(d.mean_rel_dev);
  if (d.exceed_ranges.empty()) {
    out << ", within " << format_number(tolerance) << " everywhere\n";
    return;
  }
  out << ", exceeds " << format_number(tolerance) << " on k in";
  for (const auto& [a, b] : d.exceed_ranges) out << " [" << a << ", " << b << "]";
  out << '\n';
}

int run_simulate(const SimulateOptions& o) {
  EnsembleConfig config;
  config.scenario = o.scenario.params();
  config.beta = o.beta;
  config.games = o.games;
  config.runs = o.runs;
  config.seed = o.seed;
  config.scheduler =
      o.scheduler == "uniform-random" ? Scheduler::uniform_random : Scheduler::double_round_robin;
  config.engine = o.engine == "exact-elo" ? Engine::exact_elo : Engine::linearized;
  config.threads = threads_from_env();
  config.validate();
  // Unstable steps are rejected before any simulation work.
  const auto curves = theory_trajectory(o.beta, config.scenario, o.games);
  const auto stats = run_ensemble(config);
  const auto report = compare_to_theory(stats, curves, o.tolerance);

  std::cout << "runs = " << stats.run_count << ", games = " << o.games << ", seed = " << o.seed
            << ", scheduler = " << to_string(config.scheduler)
            << ", engine = " << to_string(config.engine) << '\n';
  for (const auto& d : report.curves) print_deviation(std::cout, d, o.tolerance);

  OutputBundle bundle("simulate", o.out);
  bundle.set_seed(o.seed);
  auto& p = bundle.parameters();
  o.scenario.record(p);
  p["beta"] = o.beta;
  p["K"] = o.games;
  p["runs"] = o.runs;
  p["scheduler"] = to_string(config.scheduler);
  p["engine"] = to_string(config.engine);
  p["tolerance"] = o.tolerance;

  auto msd = CurveTable::with_key("k", stats.k_grid);
  msd.add("empirical_msd", stats.empirical_msd).add("theory_msd", curves.msd);
  bundle.write_curves("simulate_msd", msd);

  std::vector<int> loss_k(stats.k_grid.begin(), stats.k_grid.end() - 1);
  auto loss = CurveTable::with_key("k", loss_k);
  loss.add("empirical_loss", stats.empirical_mean_loss)
      .add("theory_loss",
           std::vector<double>(curves.mean_loss.begin(), curves.mean_loss.end() - 1));
  bundle.write_curves("simulate_loss", loss);

  nlohmann::ordered_json comparison;
  comparison["tolerance"] = o.tolerance;
  for (const auto& d : report.curves) {
    nlohmann::ordered_json c;
    c["max_rel_dev"] = json_number(d.max_rel_dev);
    c["mean_rel_dev"] = json_number(d.mean_rel_dev);
    c["k_at_max"] = d.k_at_max;
    c["exceed_ranges"] = nlohmann::ordered_json::array();
    for (const auto& [a, b] : d.exceed_ranges) c["exceed_ranges"].push_back({a, b});
    comparison["curves"][d.name] = c;
  }
  bundle.write_json("comparison.json", comparison);
  bundle.finish();
  return 0;
}

// -------------------------------------------------------------- estimate

struct EstimateOptions {
  std::string input;
  double step = 0.005;
  int max_epochs = 2000;
  double tolerance = 1e-6;
  std::optional<double> fixed_hfa;
  std::string out;
};

int run_estimate(const EstimateOptions& o) {
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw UsageError("cannot open input file '" + o.input + "'");
  std::vector<SeasonDataset> seasons;
  try {
    seasons = parse_season_csv(in);
  } catch (const ParseError& e) {
    std::cerr << "error: " << o.input << ": " << e.what() << '\n';
    return 2;
  }
  std::sort(seasons.begin(), seasons.end(),
            [](const auto& a, const auto& b) { return a.season_id < b.season_id; });

  FitConfig config;
  config.step = o.step;
  config.max_epochs = o.max_epochs;
  config.tolerance = o.tolerance;
  if (o.fixed_hfa) {
    config.fit_hfa = false;
    config.hfa = *o.fixed_hfa;
  }
  std::vector<SeasonSummary> rows;
  for (const auto& s : seasons) rows.push_back(summarize_season(s, config));

  std::ostringstream table;
  write_summary_table(table, rows);
  std::cout << table.str();

  OutputBundle bundle("estimate", o.out);
  auto& p = bundle.parameters();
  p["input"] = o.input;
  p["step"] = o.step;
  p["max_epochs"] = o.max_epochs;
  p["tolerance"] = o.tolerance;
  p["fixed_eta"] = o.fixed_hfa ? nlohmann::ordered_json(*o.fixed_hfa) : nullptr;
  std::ostringstream csv;
  csv << "season,M,K,eta_hat,v_hat,converged,epochs\n";
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    csv << r.season_id << ',' << r.teams << ',' << r.games << ',' << format_number(r.eta_hat) << ','
        << format_number(r.v_hat) << ',' << (r.converged ? 1 : 0) << ',' << r.epochs << '\n';
    j.push_back({{"season", r.season_id},
                 {"M", r.teams},
                 {"K", r.games},
                 {"eta_hat", json_number(r.eta_hat)},
                 {"v_hat", json_number(r.v_hat)},
                 {"converged", r.converged},
                 {"epochs", r.epochs}});
  }
  bundle.write_text("summary.csv", csv.str());
  bundle.write_json("summary.json", j);
  bundle.finish();
  return 0;
}

// ------------------------------------------------------------------ tune

struct TuneOptions {
  ScenarioOptions scenario;
  double k = 1.0;
  std::string method = "approx";
  bool table1 = false;
  double k_fraction = 0.25;
  std::string out;
};

double tuned_beta(const std::string& method, double k, const ScenarioParams& scen) {
  if (method == "approx") return optimal_beta_approx(k, scen);
  if (method == "numeric") return optimal_beta_numeric(k, scen);
  if (method == "naive") return optimal_beta_naive_taylor(k, scen);
  return optimal_beta_exact_k1(scen);
}

int run_tune(const TuneOptions& o) {
  OutputBundle bundle("tune", o.out);
  auto& p = bundle.parameters();
  p["method"] = o.method;

  if (!o.table1) {
    const auto scen = o.scenario.params();
    const double beta = tuned_beta(o.method, o.k, scen);
    const auto bound = improvement_upper_bound(scen);
    print_scalar(std::cout, "beta", beta);
    print_scalar(std::cout, "improvement_bound", bound.bound);
    print_scalar(std::cout, "small_v_rule", bound.small_v_rule);
    o.scenario.record(p);
    p["k"] = o.k;
    bundle.write_json("tune.json", {{"beta", json_number(beta)},
                                    {"improvement_bound", json_number(bound.bound)},
                                    {"small_v_rule", json_number(bound.small_v_rule)}});
    bundle.finish();
    return 0;
  }

  p["k_fraction"] = o.k_fraction;
  std::cout << "Season      M     K          k      beta     bound\n";
  double beta_sum = 0.0;
  double bound_sum = 0.0;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : kTable1) {
    const auto scen = scenario_of(row);
    const double k = std::max(1.0, o.k_fraction * row.games);
    const double beta = tuned_beta(o.method, k, scen);
    const double bound = improvement_upper_bound(scen).bound;
    beta_sum += beta;
    bound_sum += bound;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8.*s %4d %5d %10.2f %9.4f %9.4f\n",
                  static_cast<int>(row.season.size()), row.season.data(), row.teams, row.games, k,
                  beta, bound);
    std::cout << buf;
    rows.push_back({{"season", std::string(row.season)},
                    {"k", k},
                    {"beta", json_number(beta)},
                    {"improvement_bound", json_number(bound)}});
  }
  const double n = static_cast<double>(kTable1.size());
  print_scalar(std::cout, "mean_beta", beta_sum / n);
  print_scalar(std::cout, "mean_improvement_bound", bound_sum / n);
  bundle.write_json("tune_table1.json", {{"rows", rows},
                                         {"mean_beta", json_number(beta_sum / n)},
                                         {"mean_improvement_bound", json_number(bound_sum / n)}});
  bundle.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elo rating-dynamics lab"};
  app.set_version_flag("--version", std::string(elolab::kVersion));
  app.require_subcommand(1);

  TheoryOptions theory;
  auto* theory_cmd = app.add_subcommand("theory", "closed-form curves and scalars");
  add_scenario_options(theory_cmd, theory.scenario);
  theory_cmd->add_option("--beta", theory.beta, "step size")->check(CLI::PositiveNumber);
  theory_cmd->add_option("--K", theory.games, "number of games")->check(CLI::NonNegativeNumber);
  theory_cmd->add_option("--out", theory.out, "output directory");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo ensemble against the closed form");
  add_scenario_options(sim_cmd, sim.scenario);
  sim_cmd->add_option("--beta", sim.beta, "step size")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--K", sim.games, "games per run")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--runs", sim.runs, "number of runs")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "base seed");
  sim_cmd->add_option("--scheduler", sim.scheduler, "match scheduler")
      ->check(CLI::IsMember({"uniform-random", "double-round-robin"}));
  sim_cmd->add_option("--engine", sim.engine, "rating engine")
      ->check(CLI::IsMember({"exact-elo", "linearized"}));
  sim_cmd->add_option("--tolerance", sim.tolerance, "relative deviation threshold")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim.out, "output directory");

  EstimateOptions est;
  auto* est_cmd = app.add_subcommand("estimate", "fit skills and home advantage per season");
  est_cmd->add_option("--input", est.input, "season results CSV")->required();
  est_cmd->add_option("--step", est.step, "gradient step")->check(CLI::PositiveNumber);
  est_cmd->add_option("--max-epochs", est.max_epochs, "epoch cap")->check(CLI::PositiveNumber);
  est_cmd->add_option("--tol", est.tolerance, "convergence tolerance")
      ->check(CLI::NonNegativeNumber);
  est_cmd->add_option("--fixed-eta", est.fixed_hfa, "hold the home advantage at this value");
  est_cmd->add_option("--out", est.out, "output directory");

  TuneOptions tune;
  auto* tune_cmd = app.add_subcommand("tune", "step size that minimises the MSD after k games");
  add_scenario_options(tune_cmd, tune.scenario);
  tune_cmd->add_option("--k", tune.k, "game count")->check(CLI::Range(1.0, 1e12));
  tune_cmd->add_option("--method", tune.method, "approx, numeric, naive or k1")
      ->check(CLI::IsMember({"approx", "numeric", "naive", "k1"}));
  tune_cmd->add_flag("--table1", tune.table1, "sweep the ten published league seasons");
  tune_cmd->add_option("--k-fraction", tune.k_fraction, "k as a fraction of K with --table1")
      ->check(CLI::PositiveNumber);
  tune_cmd->add_option("--out", tune.out, "output directory");

  ReproduceOptions rep;
  auto* rep_cmd = app.add_subcommand("reproduce", "regenerate a figure or worked example");
  rep_cmd->add_option("target", rep.target, "what to regenerate")
      ->required()
      ->check(CLI::IsMember(reproduce_targets()));
  rep_cmd->add_option("--seed", rep.seed, "base seed");
  rep_cmd->add_option("--out-dir", rep.out_dir, "output directory");
  rep_cmd->add_option("--data", rep.data, "season results CSV used instead of synthetic seasons");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*theory_cmd) return run_theory(theory);
    if (*sim_cmd) return run_simulate(sim);
    if (*est_cmd) return run_estimate(est);
    if (*tune_cmd) return run_tune(tune);
    if (*rep_cmd) return run_reproduce(rep);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const StabilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
