#pragma once

// Bradley-Terry win model, logistic primitives and the per-game log-loss.
// Skills are in logit units with scale s = 1 unless stated otherwise.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "elolab/errors.hpp"

namespace elolab {

// Tournament context shared by the closed-form model and the simulator.
struct ScenarioParams {
  int teams = 2;        // M
  double variance = 0;  // v, variance of the true-skill prior
  double hfa = 0;       // eta, home-field advantage
  double scale = 1;     // s

  void validate() const {
    detail::require(teams >= 2, "scenario: team count must be at least 2");
    detail::require(std::isfinite(variance) && variance >= 0,
                    "scenario: skill variance must be finite and >= 0");
    detail::require(std::isfinite(hfa), "scenario: home-field advantage must be finite");
    detail::require(std::isfinite(scale) && scale > 0, "scenario: scale must be > 0");
  }
};

struct SkillVector {
  std::vector<double> values;
  std::vector<std::string> labels;  // empty, or one name per team

  SkillVector() = default;
  explicit SkillVector(std::size_t teams, double fill = 0.0) : values(teams, fill) {}
  explicit SkillVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }
  double mean() const { return values.empty() ? 0.0 : sum() / static_cast<double>(size()); }

  double squared_distance(const SkillVector& other) const {
    detail::require(other.size() == size(), "skill vectors differ in length");
    double acc = 0.0;
    for (std::size_t m = 0; m < size(); ++m) {
      const double d = values[m] - other.values[m];
      acc += d * d;
    }
    return acc;
  }
};

// One game: home team i, away team j, optional outcome (1 = home win).
struct MatchRecord {
  std::size_t index = 0;
  std::size_t home = 0;
  std::size_t away = 0;
  std::optional<int> outcome;

  bool operator==(const MatchRecord&) const = default;
};

inline void validate_match(const MatchRecord& match, std::size_t teams) {
  detail::require(match.home != match.away, "match: home and away team are the same");
  detail::require(match.home < teams && match.away < teams, "match: team index out of range");
  if (match.outcome) {
    detail::require(*match.outcome == 0 || *match.outcome == 1, "match: outcome must be 0 or 1");
  }
}

inline int require_outcome(const MatchRecord& match) {
  detail::require(match.outcome.has_value(), "match: outcome is required");
  return *match.outcome;
}

inline double logistic(double z) {
  detail::require(std::isfinite(z), "logistic: argument must be finite");
  // Branches keep exp() from overflowing for large |z|.
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Density of the standard logistic distribution, sigma(z) * sigma(-z).
inline double logistic_pdf(double z) {
  detail::require(std::isfinite(z), "logistic_pdf: argument must be finite");
  const double e = std::exp(-std::abs(z));
  return e / ((1.0 + e) * (1.0 + e));
}

// Base-10 scale s' such that 1 / (1 + 10^(-z/s')) == logistic(z / s).
inline double scale_to_base10(double s) {
  detail::require(std::isfinite(s) && s > 0, "scale_to_base10: scale must be > 0");
  return s * std::numbers::ln10;
}

inline double base10_sigmoid(double z, double base10_scale) {
  detail::require(std::isfinite(z), "base10_sigmoid: argument must be finite");
  detail::require(base10_scale > 0, "base10_sigmoid: scale must be > 0");
  return 1.0 / (1.0 + std::pow(10.0, -z / base10_scale));
}

// Pre-activation x'theta / s + eta of a game.
inline double match_logit(const SkillVector& theta, const MatchRecord& match, double eta,
                          double s = 1.0) {
  validate_match(match, theta.size());
  return (theta[match.home] - theta[match.away]) / s + eta;
}

inline double win_probability(const SkillVector& theta, const MatchRecord& match, double eta,
                              double s = 1.0) {
  detail::require(s > 0, "win_probability: scale must be > 0");
  return logistic(match_logit(theta, match, eta, s));
}

inline constexpr double kProbabilityClamp = 1e-15;

// Log-loss of a realized outcome under predicted home-win probability p.
inline double outcome_log_loss(double p, int y) {
  const double q = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

inline double match_loss(const SkillVector& theta, const MatchRecord& match, double eta) {
  const int y = require_outcome(match);
  return outcome_log_loss(win_probability(theta, match, eta), y);
}

}  // namespace elolab
