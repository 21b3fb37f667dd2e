#pragma once

// Ensembles of synthetic tournaments for checking the closed-form model.
//
// Run r uses its own generator seeded with derive_seed(seed, r) and draws,
// in this order: the true skills (unless fixed), then per game the match
// (uniform scheduler) and the outcome. The double round-robin scheduler
// shuffles all M(M-1) ordered pairs at the start of every cycle.
//
// Runs are grouped in fixed chunks of kEnsembleChunk consecutive indices.
// Each chunk is summed in run order and chunk sums are added in chunk order,
// so the result is bitwise identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "elolab/core_model.hpp"
#include "elolab/elo_engine.hpp"
#include "elolab/random.hpp"
#include "elolab/scheduling.hpp"
#include "elolab/theory.hpp"

namespace elolab {

enum class Scheduler { uniform_random, double_round_robin };
enum class Engine { exact_elo, linearized };

inline std::string to_string(Scheduler s) {
  return s == Scheduler::uniform_random ? "uniform-random" : "double-round-robin";
}
inline std::string to_string(Engine e) {
  return e == Engine::exact_elo ? "exact-elo" : "linearized";
}

struct EnsembleConfig {
  ScenarioParams scenario;
  double beta = 0.1;
  int games = 1;  // K
  int runs = 1;
  std::uint64_t seed = 0;
  Scheduler scheduler = Scheduler::uniform_random;
  Engine engine = Engine::exact_elo;
  // When set, every run uses these true skills instead of a fresh draw.
  std::optional<SkillVector> fixed_true_skills;
  unsigned threads = 1;  // 0 = hardware concurrency

  void validate() const {
    scenario.validate();
    detail::require(std::isfinite(beta) && beta > 0, "ensemble: step size must be > 0");
    detail::require(games >= 0, "ensemble: number of games must be >= 0");
    detail::require(runs >= 1, "ensemble: at least one run is required");
    if (fixed_true_skills) {
      detail::require(fixed_true_skills->size() == static_cast<std::size_t>(scenario.teams),
                      "ensemble: fixed true skills must have one entry per team");
    }
  }
};

struct EnsembleStats {
  std::vector<int> k_grid;                 // 0..K
  std::vector<double> empirical_msd;       // mean ||theta_k - theta*||^2, K + 1
  std::vector<double> empirical_mean_loss; // mean loss of game k under theta_k, K
  // [team][k], mean and sample variance of theta_{k,m} over runs
  std::vector<std::vector<double>> empirical_mean_skill;
  std::vector<std::vector<double>> empirical_skill_variance;
  int run_count = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kEnsembleChunk = 16;

inline SkillVector draw_true_skills(const ScenarioParams& scenario, Rng& rng) {
  scenario.validate();
  const double sd = std::sqrt(scenario.variance);
  SkillVector theta(static_cast<std::size_t>(scenario.teams));
  for (double& x : theta.values) x = sd * rng.normal();
  return theta;
}

// Bernoulli(sigma(x'theta* + eta)).
inline int simulate_outcome(const SkillVector& theta_star, const MatchRecord& match, double eta,
                            Rng& rng) {
  return rng.bernoulli(win_probability(theta_star, match, eta)) ? 1 : 0;
}

namespace detail {

struct EnsembleAccumulator {
  std::vector<double> msd;
  std::vector<double> loss;
  std::vector<double> skill;     // [m * (K + 1) + k]
  std::vector<double> skill_sq;

  EnsembleAccumulator(std::size_t teams, std::size_t games)
      : msd(games + 1, 0.0),
        loss(games, 0.0),
        skill(teams * (games + 1), 0.0),
        skill_sq(teams * (games + 1), 0.0) {}

  void add(const EnsembleAccumulator& o) {
    for (std::size_t i = 0; i < msd.size(); ++i) msd[i] += o.msd[i];
    for (std::size_t i = 0; i < loss.size(); ++i) loss[i] += o.loss[i];
    for (std::size_t i = 0; i < skill.size(); ++i) skill[i] += o.skill[i];
    for (std::size_t i = 0; i < skill_sq.size(); ++i) skill_sq[i] += o.skill_sq[i];
  }
};

class MatchSource {
 public:
  MatchSource(const EnsembleConfig& config, Rng& rng) : config_(config), rng_(rng) {}

  MatchRecord next() {
    if (config_.scheduler == Scheduler::uniform_random)
      return sample_uniform_match(config_.scenario.teams, rng_);
    if (cursor_ == cycle_.size()) {
      cycle_ = build_double_round_robin(config_.scenario.teams, rng_).matches;
      cursor_ = 0;
    }
    return cycle_[cursor_++];
  }

 private:
  const EnsembleConfig& config_;
  Rng& rng_;
  std::vector<MatchRecord> cycle_;
  std::size_t cursor_ = 0;
};

inline void simulate_run(const EnsembleConfig& config, int run, EnsembleAccumulator& acc) {
  const auto m = static_cast<std::size_t>(config.scenario.teams);
  const auto games = static_cast<std::size_t>(config.games);
  const std::size_t stride = games + 1;
  const double eta = config.scenario.hfa;

  Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(run)));
  const SkillVector theta_star =
      config.fixed_true_skills ? *config.fixed_true_skills : draw_true_skills(config.scenario, rng);
  std::vector<double> theta(m, 0.0);
  MatchSource source(config, rng);

  auto record = [&](std::size_t k) {
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = theta[i] - theta_star[i];
      err += d * d;
      acc.skill[i * stride + k] += theta[i];
      acc.skill_sq[i * stride + k] += theta[i] * theta[i];
    }
    acc.msd[k] += err;
  };

  record(0);
  for (std::size_t k = 0; k < games; ++k) {
    MatchRecord match = source.next();
    match.index = k;
    match.outcome = simulate_outcome(theta_star, match, eta, rng);
    const double loss = config.engine == Engine::exact_elo
                            ? apply_elo_step(theta, match, config.beta, eta)
                            : apply_linearized_step(theta, theta_star.values, match, config.beta, eta);
    acc.loss[k] += loss;
    record(k + 1);
  }
}

}  // namespace detail

inline EnsembleStats run_ensemble(const EnsembleConfig& config) {
  config.validate();
  const auto m = static_cast<std::size_t>(config.scenario.teams);
  const auto games = static_cast<std::size_t>(config.games);
  const int chunks = (config.runs + kEnsembleChunk - 1) / kEnsembleChunk;

  std::vector<detail::EnsembleAccumulator> partial(static_cast<std::size_t>(chunks),
                                                   detail::EnsembleAccumulator(m, games));
  std::atomic<int> next_chunk{0};
  auto worker = [&] {
    for (int c = next_chunk++; c < chunks; c = next_chunk++) {
      const int first = c * kEnsembleChunk;
      const int last = std::min(config.runs, first + kEnsembleChunk);
      for (int r = first; r < last; ++r)
        detail::simulate_run(config, r, partial[static_cast<std::size_t>(c)]);
    }
  };
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : config.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  detail::EnsembleAccumulator total(m, games);
  for (const auto& p : partial) total.add(p);

  const double n = static_cast<double>(config.runs);
  EnsembleStats stats;
  stats.run_count = config.runs;
  stats.seed = config.seed;
  stats.k_grid.resize(games + 1);
  for (std::size_t k = 0; k <= games; ++k) stats.k_grid[k] = static_cast<int>(k);
  stats.empirical_msd.resize(games + 1);
  for (std::size_t k = 0; k <= games; ++k) stats.empirical_msd[k] = total.msd[k] / n;
  stats.empirical_mean_loss.resize(games);
  for (std::size_t k = 0; k < games; ++k) stats.empirical_mean_loss[k] = total.loss[k] / n;
  stats.empirical_mean_skill.assign(m, std::vector<double>(games + 1));
  stats.empirical_skill_variance.assign(m, std::vector<double>(games + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k <= games; ++k) {
      const std::size_t idx = i * (games + 1) + k;
      const double mean = total.skill[idx] / n;
      stats.empirical_mean_skill[i][k] = mean;
      if (config.runs > 1)
        stats.empirical_skill_variance[i][k] =
            std::max(0.0, (total.skill_sq[idx] - n * mean * mean) / (n - 1.0));
    }
  }
  return stats;
}

struct CurveDeviation {
  std::string name;
  double max_rel_dev = 0.0;
  double mean_rel_dev = 0.0;
  int k_at_max = 0;
  // Inclusive [first, last] k ranges where the deviation exceeds the tolerance.
  std::vector<std::pair<int, int>> exceed_ranges;
};

struct ComparisonReport {
  double tolerance = 0.0;
  std::vector<CurveDeviation> curves;  // "msd", then "mean_loss"

  const CurveDeviation& curve(const std::string& name) const {
    for (const auto& c : curves)
      if (c.name == name) return c;
    throw std::invalid_argument("comparison report has no curve named " + name);
  }
};

namespace detail {

inline CurveDeviation compare_curve(std::string name, std::span<const double> empirical,
                                    std::span<const double> model, double tolerance) {
  CurveDeviation out;
  out.name = std::move(name);
  double acc = 0.0;
  int open = -1;
  for (std::size_t k = 0; k < empirical.size(); ++k) {
    const double dev = std::abs(empirical[k] - model[k]) / std::abs(model[k]);
    acc += dev;
    if (dev > out.max_rel_dev) {
      out.max_rel_dev = dev;
      out.k_at_max = static_cast<int>(k);
    }
    if (dev > tolerance) {
      if (open < 0) open = static_cast<int>(k);
    } else if (open >= 0) {
      out.exceed_ranges.emplace_back(open, static_cast<int>(k) - 1);
      open = -1;
    }
  }
  if (open >= 0) out.exceed_ranges.emplace_back(open, static_cast<int>(empirical.size()) - 1);
  if (!empirical.empty()) out.mean_rel_dev = acc / static_cast<double>(empirical.size());
  return out;
}

}  // namespace detail

// Relative deviations |empirical - model| / |model| of the MSD and mean-loss curves.
inline ComparisonReport compare_to_theory(const EnsembleStats& stats, const TheoryCurves& curves,
                                          double tolerance = 0.1) {
  detail::require(stats.k_grid == curves.k_grid, "compare_to_theory: k grids differ");
  detail::require(stats.empirical_msd.size() == curves.msd.size() &&
                      stats.empirical_mean_loss.size() + 1 == curves.mean_loss.size(),
                  "compare_to_theory: curve lengths do not match the k grid");
  ComparisonReport report;
  report.tolerance = tolerance;
  report.curves.push_back(
      detail::compare_curve("msd", stats.empirical_msd, curves.msd, tolerance));
  report.curves.push_back(detail::compare_curve(
      "mean_loss", stats.empirical_mean_loss,
      std::span<const double>(curves.mean_loss).first(stats.empirical_mean_loss.size()),
      tolerance));
  return report;
}

}  // namespace elolab
