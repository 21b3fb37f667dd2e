#pragma once

// Season result files and the per-season estimation pipeline.
//
// Input format (UTF-8, one file may hold several seasons):
//
//   season,round,home,away,outcome
//   2009,1,Modena,Trento,1
//
// outcome is 1 when the home team wins and 0 otherwise. Rows are taken in
// file order, which is assumed chronological within a season. Teams are
// indexed per season by first appearance. Fields are split on commas and
// trimmed; quoting is not supported.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "elolab/core_model.hpp"
#include "elolab/elo_engine.hpp"
#include "elolab/montecarlo.hpp"
#include "elolab/random.hpp"
#include "elolab/scheduling.hpp"

namespace elolab {

inline constexpr std::string_view kSeasonCsvHeader = "season,round,home,away,outcome";

struct SeasonDataset {
  std::string season_id;
  std::vector<std::string> team_names;  // index = team id
  std::vector<MatchRecord> matches;     // outcomes present, file order
  std::vector<std::string> rounds;      // round label per match

  int teams() const noexcept { return static_cast<int>(team_names.size()); }
  int games() const noexcept { return static_cast<int>(matches.size()); }

  // Exactly M(M-1) matches covering every ordered pair once.
  bool is_complete_round_robin() const {
    const auto m = team_names.size();
    if (m < 2 || matches.size() != m * (m - 1)) return false;
    std::vector<bool> seen(m * m, false);
    for (const auto& match : matches) {
      const std::size_t key = match.home * m + match.away;
      if (match.home == match.away || seen[key]) return false;
      seen[key] = true;
    }
    return true;
  }
};

struct SeasonSummary {
  std::string season_id;
  int teams = 0;  // M
  int games = 0;  // K
  double eta_hat = 0.0;
  double v_hat = 0.0;
  bool converged = false;
  int epochs = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

// Seasons are returned in order of first appearance.
inline std::vector<SeasonDataset> parse_season_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<SeasonDataset> seasons;
  std::map<std::string, std::size_t, std::less<>> season_index;
  std::vector<std::map<std::string, std::size_t, std::less<>>> team_index;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = detail::trim(line);
    if (line_no == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    if (text.empty()) continue;
    if (!header_seen) {
      std::string normalized;
      for (auto f : detail::split_fields(text)) {
        if (!normalized.empty()) normalized += ',';
        normalized += f;
      }
      if (normalized != kSeasonCsvHeader)
        throw ParseError(line_no, "expected header '" + std::string(kSeasonCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto fields = detail::split_fields(text);
    if (fields.size() != 5)
      throw ParseError(line_no, "expected 5 fields, found " + std::to_string(fields.size()));
    const auto season = fields[0];
    const auto home = fields[2];
    const auto away = fields[3];
    const auto outcome = fields[4];
    if (season.empty() || home.empty() || away.empty())
      throw ParseError(line_no, "season and team names must be non-empty");
    if (home == away) throw ParseError(line_no, "team '" + std::string(home) + "' plays itself");
    if (outcome != "0" && outcome != "1")
      throw ParseError(line_no, "outcome must be 0 or 1, found '" + std::string(outcome) + "'");

    auto it = season_index.find(season);
    if (it == season_index.end()) {
      it = season_index.emplace(std::string(season), seasons.size()).first;
      seasons.push_back({std::string(season), {}, {}, {}});
      team_index.emplace_back();
    }
    auto& ds = seasons[it->second];
    auto& teams = team_index[it->second];
    auto team_id = [&](std::string_view name) {
      auto t = teams.find(name);
      if (t != teams.end()) return t->second;
      const std::size_t id = ds.team_names.size();
      teams.emplace(std::string(name), id);
      ds.team_names.emplace_back(name);
      return id;
    };
    const std::size_t i = team_id(home);
    const std::size_t j = team_id(away);
    ds.matches.push_back({ds.matches.size(), i, j, outcome == "1" ? 1 : 0});
    ds.rounds.emplace_back(fields[1]);
  }
  if (!header_seen) throw ParseError(line_no == 0 ? 1 : line_no, "missing header");
  return seasons;
}

inline std::vector<SeasonDataset> parse_season_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_season_csv(in);
}

inline void write_season_csv(std::ostream& out, std::span<const SeasonDataset> seasons) {
  out << kSeasonCsvHeader << '\n';
  for (const auto& ds : seasons) {
    for (std::size_t k = 0; k < ds.matches.size(); ++k) {
      const auto& match = ds.matches[k];
      out << ds.season_id << ',' << (k < ds.rounds.size() ? ds.rounds[k] : std::to_string(k + 1))
          << ',' << ds.team_names[match.home] << ',' << ds.team_names[match.away] << ','
          << require_outcome(match) << '\n';
    }
  }
}

inline EstimationResult fit_season(const SeasonDataset& dataset, const FitConfig& config = {}) {
  return fit_batch_ml(dataset.matches, dataset.teams(), config);
}

inline SeasonSummary summarize_season(const SeasonDataset& dataset, const FitConfig& config = {}) {
  const auto fit = fit_season(dataset, config);
  return {dataset.season_id, dataset.teams(), dataset.games(), fit.eta_hat, fit.v_hat,
          fit.converged, fit.epochs_used};
}

struct SyntheticSeason {
  SeasonDataset dataset;
  SkillVector true_skills;
};

// Full double round-robin with outcomes drawn from the Bradley-Terry model
// under freshly drawn true skills. Teams are named T01, T02, ...; rounds
// group consecutive blocks of floor(M/2) games.
inline SyntheticSeason generate_synthetic_season(const ScenarioParams& scenario,
                                                 std::string season_id, std::uint64_t seed) {
  scenario.validate();
  Rng rng(seed);
  SyntheticSeason out;
  out.true_skills = draw_true_skills(scenario, rng);
  auto schedule = build_double_round_robin(scenario.teams, rng);
  auto& ds = out.dataset;
  ds.season_id = std::move(season_id);
  for (int m = 0; m < scenario.teams; ++m) {
    std::string name = std::to_string(m + 1);
    if (name.size() < 2) name.insert(0, "0");
    ds.team_names.push_back("T" + name);
    out.true_skills.labels.push_back(ds.team_names.back());
  }
  const std::size_t per_round = static_cast<std::size_t>(std::max(1, scenario.teams / 2));
  for (auto& match : schedule.matches) {
    match.outcome = simulate_outcome(out.true_skills, match, scenario.hfa, rng);
    ds.rounds.push_back(std::to_string(match.index / per_round + 1));
    ds.matches.push_back(match);
  }
  return out;
}

// Truncates every curve to the shortest one and averages pointwise.
inline std::vector<double> cross_season_average(std::span<const std::vector<double>> curves) {
  detail::require(!curves.empty(), "cross-season average of no curves");
  std::size_t n = curves.front().size();
  for (const auto& c : curves) n = std::min(n, c.size());
  std::vector<double> out(n, 0.0);
  for (const auto& c : curves)
    for (std::size_t k = 0; k < n; ++k) out[k] += c[k];
  for (double& x : out) x /= static_cast<double>(curves.size());
  return out;
}

// Mean of the last `count` points (all points if the curve is shorter).
inline double tail_mean(std::span<const double> curve, std::size_t count = 10) {
  detail::require(!curve.empty() && count > 0, "tail mean of an empty curve");
  const std::size_t n = std::min(count, curve.size());
  double acc = 0.0;
  for (std::size_t k = curve.size() - n; k < curve.size(); ++k) acc += curve[k];
  return acc / static_cast<double>(n);
}

// Truncate-and-average, then the mean of the final `count` points.
inline double cross_season_tail_mean(std::span<const std::vector<double>> curves,
                                     std::size_t count = 10) {
  const auto avg = cross_season_average(curves);
  return tail_mean(avg, count);
}

struct Table1Row {
  std::string_view season;
  int teams;
  int games;
  double eta_hat;
  double v_hat;
};

// Published per-season summary of ten volleyball league seasons (2009/10 to
// 2018/19, regular season only).
inline constexpr std::array<Table1Row, 10> kTable1{{
    {"2009", 15, 210, 0.66, 2.7},
    {"2010", 14, 182, 0.32, 1.6},
    {"2011", 14, 182, 0.35, 1.2},
    {"2012", 12, 132, 0.40, 1.9},
    {"2013", 12, 132, 0.55, 1.3},
    {"2014", 13, 156, 0.47, 2.9},
    {"2015", 12, 132, 0.06, 2.4},
    {"2016", 14, 182, 0.77, 2.4},
    {"2017", 14, 182, 0.22, 3.0},
    {"2018", 14, 182, 0.49, 3.7},
}};

inline ScenarioParams scenario_of(const Table1Row& row) {
  return {row.teams, row.v_hat, row.eta_hat, 1.0};
}

// Table-1 style rendering, one row per summary in the given order.
inline void write_summary_table(std::ostream& out, std::span<const SeasonSummary> rows) {
  out << "Season      M     K   eta_hat     v_hat  converged\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %4d %5d %9.4f %9.4f  %s\n", r.season_id.c_str(), r.teams,
                  r.games, r.eta_hat, r.v_hat, r.converged ? "yes" : "no");
    out << buf;
  }
}

}  // namespace elolab
