#pragma once

// The Elo recursion theta <- theta + beta [y - sigma(x'theta + eta)] x, its
// quadratic approximation around the true skills, and a batch maximum
// likelihood fit of (theta, eta) by repeated stochastic-gradient passes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "elolab/core_model.hpp"

namespace elolab {

struct RatingTrajectory {
  std::vector<SkillVector> skills_by_step;  // K + 1 entries, [0] = initialization
  std::vector<double> per_step_loss;        // K entries, loss of game k under theta_k
};

namespace detail {

inline void require_step(double beta) {
  require(std::isfinite(beta) && beta > 0, "step size must be > 0");
}

}  // namespace detail

// In-place Elo step on raw skills. Returns the loss of the game evaluated
// before the update (predict-then-update).
inline double apply_elo_step(std::span<double> theta, const MatchRecord& match, double beta,
                             double eta) {
  const double z = theta[match.home] - theta[match.away] + eta;
  const double p = logistic(z);
  const int y = *match.outcome;
  const double delta = beta * (static_cast<double>(y) - p);
  theta[match.home] += delta;
  theta[match.away] -= delta;
  return outcome_log_loss(p, y);
}

// In-place step of the recursion linearized around theta_star:
//   theta <- theta - beta h x x'(theta - theta_star) + beta g x
// with g = y - sigma(x'theta_star + eta) and h = L(x'theta_star + eta).
// Returns the exact loss of the game under theta before the update.
inline double apply_linearized_step(std::span<double> theta, std::span<const double> theta_star,
                                    const MatchRecord& match, double beta, double eta) {
  const std::size_t i = match.home;
  const std::size_t j = match.away;
  const double z_star = theta_star[i] - theta_star[j] + eta;
  const double g = static_cast<double>(*match.outcome) - logistic(z_star);
  const double h = logistic_pdf(z_star);
  const double deviation = (theta[i] - theta_star[i]) - (theta[j] - theta_star[j]);
  const double loss = outcome_log_loss(logistic(theta[i] - theta[j] + eta), *match.outcome);
  const double delta = beta * (g - h * deviation);
  theta[i] += delta;
  theta[j] -= delta;
  return loss;
}

inline SkillVector elo_update(const SkillVector& theta, const MatchRecord& match, double beta,
                              double eta) {
  detail::require_step(beta);
  require_outcome(match);
  validate_match(match, theta.size());
  SkillVector next = theta;
  apply_elo_step(next.values, match, beta, eta);
  return next;
}

inline SkillVector linearized_update(const SkillVector& theta, const SkillVector& theta_star,
                                     const MatchRecord& match, double beta, double eta) {
  detail::require_step(beta);
  require_outcome(match);
  detail::require(theta_star.size() == theta.size(), "theta and theta_star differ in length");
  validate_match(match, theta.size());
  SkillVector next = theta;
  apply_linearized_step(next.values, theta_star.values, match, beta, eta);
  return next;
}

inline RatingTrajectory run_rating(const SkillVector& theta0, std::span<const MatchRecord> games,
                                   double beta, double eta) {
  detail::require_step(beta);
  for (const auto& game : games) {
    require_outcome(game);
    validate_match(game, theta0.size());
  }
  RatingTrajectory out;
  out.skills_by_step.reserve(games.size() + 1);
  out.per_step_loss.reserve(games.size());
  out.skills_by_step.push_back(theta0);
  SkillVector current = theta0;
  for (const auto& game : games) {
    out.per_step_loss.push_back(apply_elo_step(current.values, game, beta, eta));
    out.skills_by_step.push_back(current);
  }
  return out;
}

inline RatingTrajectory run_linearized(const SkillVector& theta0, const SkillVector& theta_star,
                                       std::span<const MatchRecord> games, double beta,
                                       double eta) {
  detail::require_step(beta);
  detail::require(theta_star.size() == theta0.size(), "theta0 and theta_star differ in length");
  for (const auto& game : games) {
    require_outcome(game);
    validate_match(game, theta0.size());
  }
  RatingTrajectory out;
  out.skills_by_step.push_back(theta0);
  SkillVector current = theta0;
  for (const auto& game : games) {
    out.per_step_loss.push_back(
        apply_linearized_step(current.values, theta_star.values, game, beta, eta));
    out.skills_by_step.push_back(current);
  }
  return out;
}

// Unbiased sample variance, sum (x - mean)^2 / (M - 1).
inline double sample_variance(const SkillVector& theta) {
  detail::require(theta.size() >= 2, "sample variance needs at least 2 entries");
  const double mean = theta.mean();
  double acc = 0.0;
  for (double x : theta.values) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(theta.size() - 1);
}

struct FitConfig {
  double step = 0.005;
  int max_epochs = 2000;
  double tolerance = 1e-6;  // on the largest parameter change over one epoch
  bool fit_hfa = true;
  double hfa = 0.0;  // starting value, or the fixed value when fit_hfa is false
};

struct EstimationResult {
  SkillVector theta_hat;  // zero mean
  double eta_hat = 0.0;
  double v_hat = 0.0;
  int epochs_used = 0;
  double final_objective = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // total loss after each epoch
};

inline double total_loss(std::span<const double> theta, std::span<const MatchRecord> games,
                         double eta) {
  double acc = 0.0;
  for (const auto& game : games)
    acc += outcome_log_loss(logistic(theta[game.home] - theta[game.away] + eta), *game.outcome);
  return acc;
}

// Epochs visit the games in data order. theta starts at zero, so the skill
// sum stays at zero up to rounding; the result is re-centred anyway.
inline EstimationResult fit_batch_ml(std::span<const MatchRecord> games, int teams,
                                     const FitConfig& config = {}) {
  detail::require(!games.empty(), "fit: dataset is empty");
  detail::require(teams >= 2, "fit: at least 2 teams required");
  detail::require(config.step > 0 && config.max_epochs >= 1 && config.tolerance >= 0,
                  "fit: invalid configuration");
  const auto m = static_cast<std::size_t>(teams);
  std::vector<bool> seen(m, false);
  for (const auto& game : games) {
    require_outcome(game);
    validate_match(game, m);
    seen[game.home] = seen[game.away] = true;
  }
  detail::require(std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }),
                  "fit: every team must appear in at least one game");

  std::vector<double> theta(m, 0.0);
  std::vector<double> previous(m);
  double eta = config.hfa;
  EstimationResult result;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    previous = theta;
    const double previous_eta = eta;
    for (const auto& game : games) {
      const double p = logistic(theta[game.home] - theta[game.away] + eta);
      const double g = config.step * (static_cast<double>(*game.outcome) - p);
      theta[game.home] += g;
      theta[game.away] -= g;
      if (config.fit_hfa) eta += g;
    }
    double change = std::abs(eta - previous_eta);
    for (std::size_t i = 0; i < m; ++i) change = std::max(change, std::abs(theta[i] - previous[i]));
    result.objective_trace.push_back(total_loss(theta, games, eta));
    result.epochs_used = epoch;
    if (change < config.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.theta_hat = SkillVector(std::move(theta));
  const double mean = result.theta_hat.mean();
  for (double& x : result.theta_hat.values) x -= mean;
  result.eta_hat = eta;
  result.v_hat = sample_variance(result.theta_hat);
  result.final_objective = result.objective_trace.back();
  return result;
}

}  // namespace elolab
