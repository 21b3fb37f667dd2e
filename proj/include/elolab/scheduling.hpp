#pragma once

// Round-robin schedules, i.i.d. uniform match sampling and the schedule
// autocorrelation matrix E[x x'].

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "elolab/core_model.hpp"
#include "elolab/matrix.hpp"
#include "elolab/random.hpp"

namespace elolab {

struct Schedule {
  std::size_t teams = 0;
  std::vector<MatchRecord> matches;

  std::size_t size() const noexcept { return matches.size(); }
  bool empty() const noexcept { return matches.empty(); }
};

using CorrelationMatrix = Matrix;

// Every ordered pair (i, j), i != j, exactly once, in a seeded shuffled order.
inline Schedule build_double_round_robin(int teams, Rng& rng) {
  detail::require(teams >= 2, "double round-robin needs at least 2 teams");
  const auto m = static_cast<std::size_t>(teams);
  Schedule schedule{m, {}};
  schedule.matches.reserve(m * (m - 1));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) schedule.matches.push_back({0, i, j, std::nullopt});
  rng.shuffle(std::span<MatchRecord>(schedule.matches));
  for (std::size_t k = 0; k < schedule.matches.size(); ++k) schedule.matches[k].index = k;
  return schedule;
}

inline Schedule build_double_round_robin(int teams, std::uint64_t seed) {
  Rng rng(seed);
  return build_double_round_robin(teams, rng);
}

// Home team uniform over M; away team uniform over the remaining M - 1.
inline MatchRecord sample_uniform_match(int teams, Rng& rng) {
  detail::require(teams >= 2, "match sampling needs at least 2 teams");
  const auto m = static_cast<std::uint64_t>(teams);
  const auto home = rng.uniform_index(m);
  const auto offset = 1 + rng.uniform_index(m - 1);
  const auto away = (home + offset) % m;
  return {0, static_cast<std::size_t>(home), static_cast<std::size_t>(away), std::nullopt};
}

// +1 at the home index, -1 at the away index.
inline std::vector<double> schedule_vector(const MatchRecord& match, int teams) {
  detail::require(teams >= 2, "schedule vector needs at least 2 teams");
  validate_match(match, static_cast<std::size_t>(teams));
  std::vector<double> x(static_cast<std::size_t>(teams), 0.0);
  x[match.home] = 1.0;
  x[match.away] = -1.0;
  return x;
}

// (2 / (M - 1)) (I - 11'/M)
inline CorrelationMatrix theoretical_autocorrelation(int teams) {
  detail::require(teams >= 2, "autocorrelation needs at least 2 teams");
  const auto m = static_cast<std::size_t>(teams);
  const double md = static_cast<double>(teams);
  CorrelationMatrix r(m);
  const double diag = 2.0 / md;
  const double off = -2.0 / (md * (md - 1.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) r(i, j) = i == j ? diag : off;
  return r;
}

// (1/K) sum_k x_k x_k'
inline CorrelationMatrix empirical_autocorrelation(const Schedule& schedule) {
  detail::require(!schedule.empty(), "autocorrelation of an empty schedule");
  const std::size_t m = schedule.teams;
  detail::require(m >= 2, "schedule must have at least 2 teams");
  // Accumulate integer counts so the complete round-robin case is exact.
  std::vector<long long> counts(m * m, 0);
  for (const auto& match : schedule.matches) {
    validate_match(match, m);
    counts[match.home * m + match.home] += 1;
    counts[match.away * m + match.away] += 1;
    counts[match.home * m + match.away] -= 1;
    counts[match.away * m + match.home] -= 1;
  }
  const double k = static_cast<double>(schedule.size());
  CorrelationMatrix r(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) r(i, j) = static_cast<double>(counts[i * m + j]) / k;
  return r;
}

}  // namespace elolab
