#pragma once

// `elo_lab reproduce <target>`: regenerates the data behind each figure and
// worked example. Curve targets use the closed form only; the example
// targets run the real-data pipeline (fit, then rate with the fitted home
// advantage and score against the fitted skills) on each season.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "cli_common.hpp"
#include "elolab/elolab.hpp"

namespace elolab::cli {

struct ReproduceOptions {
  std::string target;
  std::uint64_t seed = 42;
  std::string out_dir;
  std::string data;
};

inline std::vector<std::string> reproduce_targets() {
  return {"time-constants", "loss-min",   "excess-loss", "improvement", "optimal-beta",
          "appendix-b",     "example1",   "example2",    "example3"};
}

namespace repro {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline const ScenarioParams kReference{15, 3.0, 0.0, 1.0};

struct FittedSeason {
  SeasonDataset dataset;
  EstimationResult fit;
  ScenarioParams scenario;  // M, v_hat, eta_hat
};

// Seasons from --data, or one synthetic season per published row.
inline std::vector<FittedSeason> load_seasons(const ReproduceOptions& o,
                                              const std::vector<std::string>& only = {}) {
  std::vector<SeasonDataset> raw;
  if (!o.data.empty()) {
    std::ifstream in(o.data, std::ios::binary);
    if (!in) throw UsageError("cannot open data file '" + o.data + "'");
    raw = parse_season_csv(in);
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.season_id < b.season_id; });
  } else {
    for (std::size_t r = 0; r < kTable1.size(); ++r) {
      const auto& row = kTable1[r];
      const std::string id(row.season);
      if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
      raw.push_back(
          generate_synthetic_season(scenario_of(row), id, derive_seed(o.seed, r)).dataset);
    }
  }
  std::vector<FittedSeason> out;
  for (auto& ds : raw) {
    auto fit = fit_season(ds);
    ScenarioParams scen{ds.teams(), fit.v_hat, fit.eta_hat, 1.0};
    out.push_back({std::move(ds), std::move(fit), scen});
  }
  detail::require(!out.empty(), "no seasons to process");
  return out;
}

struct SeasonCurves {
  std::vector<double> msd;          // K + 1
  std::vector<double> loss;         // K
  std::vector<double> theory_msd;   // K + 1, NaN when beta is unstable
  std::vector<double> theory_loss;  // K + 1
  RatingTrajectory trajectory;
};

inline SeasonCurves season_curves(const FittedSeason& s, double beta) {
  SeasonCurves c;
  const int games = s.dataset.games();
  c.trajectory =
      run_rating(SkillVector(static_cast<std::size_t>(s.dataset.teams())), s.dataset.matches,
                 beta, s.fit.eta_hat);
  for (const auto& theta : c.trajectory.skills_by_step)
    c.msd.push_back(theta.squared_distance(s.fit.theta_hat));
  c.loss = c.trajectory.per_step_loss;
  if (beta < stability_limit(s.scenario)) {
    const auto t = theory_trajectory(beta, s.scenario, games);
    c.theory_msd = t.msd;
    c.theory_loss = t.mean_loss;
  } else {
    c.theory_msd.assign(static_cast<std::size_t>(games) + 1, kNaN);
    c.theory_loss.assign(static_cast<std::size_t>(games) + 1, kNaN);
  }
  return c;
}

inline std::vector<int> iota_grid(std::size_t n) {
  std::vector<int> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = static_cast<int>(i);
  return k;
}

inline std::vector<double> truncate(std::vector<double> v, std::size_t n) {
  v.resize(std::min(v.size(), n));
  return v;
}

inline std::string beta_label(double beta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", beta);
  return buf;
}

inline nlohmann::ordered_json season_json(const FittedSeason& s) {
  return {{"season", s.dataset.season_id},
          {"M", s.dataset.teams()},
          {"K", s.dataset.games()},
          {"eta_hat", json_number(s.fit.eta_hat)},
          {"v_hat", json_number(s.fit.v_hat)},
          {"converged", s.fit.converged}};
}

inline void time_constants(OutputBundle& out) {
  const auto grid = log_grid(1e-2, 0.999 * stability_limit(kReference), 200);
  std::vector<double> t1, t2, t1e, t2e;
  for (double b : grid) {
    const auto r = convergence_rates(b, kReference);
    t1.push_back(r.tau1);
    t2.push_back(r.tau2);
    t1e.push_back(r.tau1_exact);
    t2e.push_back(r.tau2_exact);
  }
  auto t = CurveTable::with_key("beta", grid);
  t.add("tau1", t1).add("tau2", t2).add("tau1_exact", t1e).add("tau2_exact", t2e);
  out.write_curves("time_constants", t);
}

inline void loss_min(OutputBundle& out) {
  const auto grid = log_grid(1e-2, 1e2, 200);
  auto t = CurveTable::with_key("v", grid);
  for (double eta : {0.0, 0.5, 1.0}) {
    std::vector<double> col;
    for (double v : grid) col.push_back(ell_min(v, eta));
    t.add("ell_min_eta" + beta_label(eta), col);
  }
  std::vector<double> small(grid.size(), std::numbers::ln2), large;
  for (double v : grid) large.push_back(std::numbers::ln2 * std::sqrt(2.0 * std::numbers::ln2 / v));
  t.add("small_v_limit", small).add("large_v_asymptote", large);
  out.write_curves("loss_min", t);
  out.write_json("loss_min_markers.json", {{"v_th", json_number(v_threshold())}});
}

inline void excess_loss(OutputBundle& out) {
  const auto grid = log_grid(1e-2, 0.999 * stability_limit(kReference), 200);
  const double h = h_bar(kReference.variance, kReference.hfa);
  const double m1 = kReference.teams - 1.0;
  auto t = CurveTable::with_key("beta", grid);
  for (int k : {50, 100, 200}) {
    std::vector<double> col;
    for (double b : grid) col.push_back(h / m1 * msd_at(b, kReference, k));
    t.add("excess_k" + std::to_string(k), col);
  }
  std::vector<double> steady;
  for (double b : grid) steady.push_back(h / m1 * steady_state_msd(b, kReference));
  t.add("excess_steady", steady);
  out.write_curves("excess_loss", t);
}

inline void improvement(OutputBundle& out) {
  const auto grid = log_grid(1e-2, 1e2, 200);
  auto t = CurveTable::with_key("v", grid);
  for (int m : {5, 15, 50}) {
    std::vector<double> col;
    for (double v : grid) col.push_back(improvement_upper_bound({m, v, 0.0, 1.0}).bound);
    t.add("bound_M" + std::to_string(m), col);
  }
  std::vector<double> rule;
  for (double v : grid) rule.push_back(2.0 * v);
  t.add("small_v_rule", rule);
  out.write_curves("improvement", t);
}

inline std::vector<int> k_log_grid() {
  std::vector<int> ks;
  for (double k : log_grid(1.0, 1000.0, 120)) {
    const int r = static_cast<int>(std::lround(k));
    if (ks.empty() || ks.back() != r) ks.push_back(r);
  }
  return ks;
}

inline void optimal_beta(OutputBundle& out, bool with_naive) {
  const auto ks = k_log_grid();
  auto t = CurveTable::with_key("k", ks);
  for (double v : {0.1, 1.0, 3.0, 10.0}) {
    const ScenarioParams scen{15, v, 0.0, 1.0};
    std::vector<double> numeric, approx, naive;
    for (int k : ks) {
      numeric.push_back(optimal_beta_numeric(k, scen));
      approx.push_back(optimal_beta_approx(k, scen));
      naive.push_back(optimal_beta_naive_taylor(k, scen));
    }
    const std::string tag = "_v" + beta_label(v);
    t.add("numeric" + tag, numeric).add("approx" + tag, approx);
    if (with_naive) t.add("naive" + tag, naive);
  }
  out.write_curves(with_naive ? "appendix_b" : "optimal_beta", t);
}

inline void example1(OutputBundle& out, const ReproduceOptions& o) {
  const auto seasons = load_seasons(o);
  nlohmann::ordered_json meta = nlohmann::ordered_json::array();
  for (const auto& s : seasons) meta.push_back(season_json(s));
  out.write_json("example1_seasons.json", meta);

  for (double beta : {0.1, 0.87, 2.49}) {
    std::vector<std::vector<double>> msd, loss, tmsd, tloss;
    for (const auto& s : seasons) {
      auto c = season_curves(s, beta);
      msd.push_back(std::move(c.msd));
      loss.push_back(std::move(c.loss));
      tmsd.push_back(std::move(c.theory_msd));
      tloss.push_back(std::move(c.theory_loss));
    }
    // Loss curves are one shorter; every column is cut to the loss length.
    const auto n = cross_season_average(loss).size();
    auto t = CurveTable::with_key("k", iota_grid(n));
    t.add("empirical_msd", truncate(cross_season_average(msd), n))
        .add("theory_msd", truncate(cross_season_average(tmsd), n))
        .add("empirical_loss", cross_season_average(loss))
        .add("theory_loss", truncate(cross_season_average(tloss), n));
    out.write_curves("example1_beta_" + beta_label(beta), t);
  }
}

inline void example2(OutputBundle& out, const ReproduceOptions& o) {
  const auto seasons = load_seasons(o);
  const auto grid = log_grid(0.05, 4.0, 30);
  std::vector<double> emp_msd, th_msd, emp_loss, th_loss;
  for (double beta : grid) {
    std::vector<std::vector<double>> msd, loss, tmsd, tloss;
    for (const auto& s : seasons) {
      auto c = season_curves(s, beta);
      msd.push_back(std::move(c.msd));
      loss.push_back(std::move(c.loss));
      tmsd.push_back(std::move(c.theory_msd));
      tloss.push_back(std::move(c.theory_loss));
    }
    const auto n = cross_season_average(loss).size();
    emp_msd.push_back(tail_mean(truncate(cross_season_average(msd), n)));
    th_msd.push_back(tail_mean(truncate(cross_season_average(tmsd), n)));
    emp_loss.push_back(tail_mean(cross_season_average(loss)));
    th_loss.push_back(tail_mean(truncate(cross_season_average(tloss), n)));
  }
  auto t = CurveTable::with_key("beta", grid);
  t.add("empirical_msd", emp_msd)
      .add("theory_msd", th_msd)
      .add("empirical_loss", emp_loss)
      .add("theory_loss", th_loss);
  out.write_curves("example2", t);

  double bound = 0.0;
  double beta_k = 0.0;
  double beta_quarter = 0.0;
  for (const auto& s : seasons) {
    bound += improvement_upper_bound(s.scenario).bound;
    beta_k += optimal_beta_approx(s.dataset.games(), s.scenario);
    beta_quarter += optimal_beta_approx(std::max(1.0, s.dataset.games() / 4.0), s.scenario);
  }
  const double n = static_cast<double>(seasons.size());
  out.write_json("example2_markers.json", {{"mean_improvement_bound", json_number(bound / n)},
                                           {"mean_optimal_beta_K", json_number(beta_k / n)},
                                           {"mean_optimal_beta_K_4", json_number(beta_quarter / n)}});
}

inline void example3(OutputBundle& out, const ReproduceOptions& o) {
  const auto seasons = load_seasons(o, {"2009", "2015", "2017", "2018"});
  nlohmann::ordered_json meta = nlohmann::ordered_json::array();
  for (const auto& s : seasons) {
    const double beta = optimal_beta_approx(std::max(1.0, s.dataset.games() / 4.0), s.scenario);
    auto c = season_curves(s, beta);
    const auto rates = convergence_rates(beta, s.scenario);
    const auto m = static_cast<std::size_t>(s.dataset.teams());

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      return s.fit.theta_hat[a] > s.fit.theta_hat[b];
    });
    const std::vector<std::size_t> picks{order.front(), order[m / 3], order[2 * m / 3],
                                         order.back()};

    auto t = CurveTable::with_key("k", iota_grid(c.msd.size()));
    for (auto team : picks) {
      std::vector<double> emp, model;
      for (std::size_t k = 0; k < c.msd.size(); ++k) {
        emp.push_back(c.trajectory.skills_by_step[k][team]);
        model.push_back((1.0 - std::pow(rates.alpha1, static_cast<double>(k))) *
                        s.fit.theta_hat[team]);
      }
      const auto& name = s.dataset.team_names[team];
      t.add("skill_" + name, emp).add("model_skill_" + name, model);
    }
    t.add("empirical_msd", c.msd).add("theory_msd", c.theory_msd);
    out.write_curves("example3_" + s.dataset.season_id, t);

    auto j = season_json(s);
    j["beta"] = json_number(beta);
    meta.push_back(j);
  }
  out.write_json("example3_seasons.json", meta);
}

}  // namespace repro

inline int run_reproduce(const ReproduceOptions& o) {
  OutputBundle out("reproduce", o.out_dir.empty() ? "reproduce_" + o.target : o.out_dir);
  out.parameters()["target"] = o.target;
  const bool uses_data = o.target.starts_with("example");
  if (uses_data) {
    out.parameters()["data"] = o.data.empty() ? nlohmann::ordered_json("synthetic") : nlohmann::ordered_json(o.data);
    if (o.data.empty()) out.set_seed(o.seed);
  }

  if (o.target == "time-constants") repro::time_constants(out);
  else if (o.target == "loss-min") repro::loss_min(out);
  else if (o.target == "excess-loss") repro::excess_loss(out);
  else if (o.target == "improvement") repro::improvement(out);
  else if (o.target == "optimal-beta") repro::optimal_beta(out, false);
  else if (o.target == "appendix-b") repro::optimal_beta(out, true);
  else if (o.target == "example1") repro::example1(out, o);
  else if (o.target == "example2") repro::example2(out, o);
  else if (o.target == "example3") repro::example3(out, o);
  else throw UsageError("unknown reproduce target '" + o.target + "'");
  out.finish();
  std::cout << "wrote " << o.target << " to "
            << (o.out_dir.empty() ? "reproduce_" + o.target : o.out_dir) << '\n';
  return 0;
}

}  // namespace elolab::cli
