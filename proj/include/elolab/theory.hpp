#pragma once

// Closed-form stochastic model of the Elo recursion under uniform scheduling
// and a N(0, v) prior on the true skills. All quantities are in logit units
// (s = 1).
//
// The expectations over theta* and the schedule are closed with the Laplace
// approximation
//
//   E[f(z)] ~ f(0) sqrt(v_f / (2v + v_f)) exp(-eta^2 / (2 (2v + v_f))),
//   z ~ N(eta, 2v),  v_f = -f(0) / f''(0),
//
// which gives h_bar = E[L], h2_bar = E[L^2] and the loss floor ell_min.
// With those, the mean skills follow (1 - alpha1^k) theta*, the MSD follows
// d_k = alpha2^k (d_0 - d_inf) + d_inf, and the mean loss is
// ell_min + h_bar d_k / (M - 1).

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "elolab/core_model.hpp"
#include "elolab/golden_section.hpp"
#include "elolab/matrix.hpp"

namespace elolab {

struct LaplaceIdentity {
  double f_at_zero = 0.0;  // f(0)
  double v_f = 0.0;        // -f(0) / f''(0)
};

inline constexpr LaplaceIdentity kLogisticPdfIdentity{0.25, 2.0};
inline constexpr LaplaceIdentity kLogisticPdfSquaredIdentity{1.0 / 16.0, 1.0};
inline constexpr LaplaceIdentity kBinaryEntropyIdentity{std::numbers::ln2, 4.0 * std::numbers::ln2};

namespace detail {

inline void require_variance(double v) {
  require(std::isfinite(v) && v >= 0, "skill variance must be finite and >= 0");
}

inline void require_positive_variance(double v) {
  require(std::isfinite(v) && v > 0, "skill variance must be > 0");
}

}  // namespace detail

inline double laplace_expectation(const LaplaceIdentity& identity, double eta, double v) {
  detail::require_variance(v);
  detail::require(identity.v_f > 0 && identity.f_at_zero > 0, "invalid Laplace identity");
  const double spread = 2.0 * v + identity.v_f;
  return identity.f_at_zero * std::sqrt(identity.v_f / spread) *
         std::exp(-eta * eta / (2.0 * spread));
}

// E[L(x'theta* + eta)]
inline double h_bar(double v, double eta) {
  detail::require_variance(v);
  return 0.25 / std::sqrt(v + 1.0) * std::exp(-eta * eta / (4.0 * (v + 1.0)));
}

// E[L^2(x'theta* + eta)]
inline double h2_bar(double v, double eta) {
  detail::require_variance(v);
  return (1.0 / 16.0) * std::sqrt(1.0 / (2.0 * v + 1.0)) *
         std::exp(-eta * eta / (2.0 * (2.0 * v + 1.0)));
}

// Mean loss at theta = theta*, a floor for any rating algorithm.
inline double ell_min(double v, double eta) {
  detail::require_variance(v);
  constexpr double ln2 = std::numbers::ln2;
  return ln2 * std::sqrt(2.0 * ln2 / (v + 2.0 * ln2)) *
         std::exp(-eta * eta / (4.0 * v + 8.0 * ln2));
}

// Crossing of the small-v and large-v asymptotes of ell_min.
inline constexpr double v_threshold() { return 2.0 * std::numbers::ln2; }

// Largest stable step: keeps h_bar - beta h2_bar > 0, i.e. alpha2 < 1.
inline double stability_limit(const ScenarioParams& scenario) {
  scenario.validate();
  return h_bar(scenario.variance, scenario.hfa) / h2_bar(scenario.variance, scenario.hfa);
}

struct ConvergenceRates {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double tau1 = 0.0;  // (M - 1) / (2 beta h_bar)
  double tau2 = 0.0;  // (M - 1) / (4 beta (h_bar - beta h2_bar))
  double tau1_exact = std::numeric_limits<double>::quiet_NaN();  // -1 / ln alpha1
  double tau2_exact = std::numeric_limits<double>::quiet_NaN();
  bool stable = false;  // |alpha1| < 1 and |alpha2| < 1
};

inline ConvergenceRates convergence_rates(double beta, const ScenarioParams& scenario) {
  scenario.validate();
  detail::require(std::isfinite(beta) && beta > 0, "step size must be > 0");
  const double m1 = static_cast<double>(scenario.teams - 1);
  const double h = h_bar(scenario.variance, scenario.hfa);
  const double h2 = h2_bar(scenario.variance, scenario.hfa);
  ConvergenceRates r;
  r.alpha1 = 1.0 - 2.0 * beta * h / m1;
  r.alpha2 = 1.0 - (4.0 / m1) * beta * (h - beta * h2);
  r.tau1 = m1 / (2.0 * beta * h);
  r.tau2 = m1 / (4.0 * beta * (h - beta * h2));
  if (r.alpha1 > 0 && r.alpha1 < 1) r.tau1_exact = -1.0 / std::log(r.alpha1);
  if (r.alpha2 > 0 && r.alpha2 < 1) r.tau2_exact = -1.0 / std::log(r.alpha2);
  r.stable = std::abs(r.alpha1) < 1 && std::abs(r.alpha2) < 1;
  return r;
}

// K_c = multiple * tau1; multiple = 3 leaves about 5% of the initial error.
inline double games_to_convergence(double beta, const ScenarioParams& scenario,
                                   double multiple = 3.0) {
  detail::require(std::isfinite(multiple) && multiple > 0, "multiple must be > 0");
  const auto rates = convergence_rates(beta, scenario);
  if (!(rates.alpha1 > 0 && rates.alpha1 < 1)) {
    std::ostringstream msg;
    msg << "mean recursion is not monotonically convergent: alpha1 = " << rates.alpha1
        << " for beta = " << beta << " (need 0 < alpha1 < 1)";
    throw StabilityError(msg.str());
  }
  return multiple * rates.tau1;
}

namespace detail {

inline void require_stable_step(double beta, const ScenarioParams& scenario) {
  require(std::isfinite(beta) && beta > 0, "step size must be > 0");
  const double limit = stability_limit(scenario);
  if (!(beta < limit)) {
    std::ostringstream msg;
    msg << "step size beta = " << beta << " is outside the mean-square stability region "
        << "(beta must be < h_bar / h2_bar = " << limit << " for v = " << scenario.variance
        << ", eta = " << scenario.hfa << ")";
    throw StabilityError(msg.str());
  }
}

}  // namespace detail

// d_inf = beta h_bar (M - 1) / (2 (h_bar - beta h2_bar))
inline double steady_state_msd(double beta, const ScenarioParams& scenario) {
  detail::require_stable_step(beta, scenario);
  const double h = h_bar(scenario.variance, scenario.hfa);
  const double h2 = h2_bar(scenario.variance, scenario.hfa);
  return beta * h * static_cast<double>(scenario.teams - 1) / (2.0 * (h - beta * h2));
}

inline double initial_msd(const ScenarioParams& scenario) {
  scenario.validate();
  return static_cast<double>(scenario.teams) * scenario.variance;
}

// d_k for real-valued k >= 0.
inline double msd_at(double beta, const ScenarioParams& scenario, double k) {
  const double d_inf = steady_state_msd(beta, scenario);
  const double alpha2 = convergence_rates(beta, scenario).alpha2;
  return std::pow(alpha2, k) * (initial_msd(scenario) - d_inf) + d_inf;
}

struct TheoryCurves {
  std::vector<int> k_grid;
  std::vector<double> mean_skill_factor;  // 1 - alpha1^k
  std::vector<double> msd;                // d_k
  std::vector<double> bias_sq;            // b_k = alpha1^(2k) d_0
  std::vector<double> total_variance;     // omega_k
  std::vector<double> excess_loss;        // h_bar d_k / (M - 1)
  std::vector<double> mean_loss;          // ell_min + excess
  double d0 = 0.0;
  double d_inf = 0.0;
  double ell_min = 0.0;
};

inline TheoryCurves theory_trajectory(double beta, const ScenarioParams& scenario, int K) {
  scenario.validate();
  detail::require(K >= 0, "number of games must be >= 0");
  detail::require_stable_step(beta, scenario);
  const auto rates = convergence_rates(beta, scenario);
  if (!(std::abs(rates.alpha2) < 1)) {
    std::ostringstream msg;
    msg << "mean-square recursion diverges: alpha2 = " << rates.alpha2;
    throw StabilityError(msg.str());
  }
  const double h = h_bar(scenario.variance, scenario.hfa);
  const double m1 = static_cast<double>(scenario.teams - 1);

  TheoryCurves c;
  c.d0 = initial_msd(scenario);
  c.d_inf = steady_state_msd(beta, scenario);
  c.ell_min = ell_min(scenario.variance, scenario.hfa);
  const auto n = static_cast<std::size_t>(K) + 1;
  c.k_grid.resize(n);
  c.mean_skill_factor.resize(n);
  c.msd.resize(n);
  c.bias_sq.resize(n);
  c.total_variance.resize(n);
  c.excess_loss.resize(n);
  c.mean_loss.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    const double a1k = std::pow(rates.alpha1, kd);
    const double a2k = std::pow(rates.alpha2, kd);
    c.k_grid[k] = static_cast<int>(k);
    c.mean_skill_factor[k] = 1.0 - a1k;
    c.msd[k] = a2k * (c.d0 - c.d_inf) + c.d_inf;
    c.bias_sq[k] = a1k * a1k * c.d0;
    c.total_variance[k] = (a2k - a1k * a1k) * c.d0 + (1.0 - a2k) * c.d_inf;
    c.excess_loss[k] = h / m1 * c.msd[k];
    c.mean_loss[k] = c.ell_min + c.excess_loss[k];
  }
  return c;
}

struct ImprovementBound {
  double bound = 0.0;         // [(1 - 1/M) / (2v) + h2_bar / h_bar]^-1
  double small_v_rule = 0.0;  // 2v
};

// Largest beta for which the steady-state MSD stays below its initial value Mv.
inline ImprovementBound improvement_upper_bound(const ScenarioParams& scenario) {
  scenario.validate();
  detail::require_positive_variance(scenario.variance);
  const double v = scenario.variance;
  const double m = static_cast<double>(scenario.teams);
  const double ratio = h2_bar(v, scenario.hfa) / h_bar(v, scenario.hfa);
  return {1.0 / ((1.0 - 1.0 / m) / (2.0 * v) + ratio), 2.0 * v};
}

namespace detail {

inline double optimal_beta_formula(double k, const ScenarioParams& scenario, bool naive) {
  scenario.validate();
  require_positive_variance(scenario.variance);
  require(std::isfinite(k) && k >= 1, "game count k must be >= 1");
  const double v = scenario.variance;
  const double m = static_cast<double>(scenario.teams);
  const double h = h_bar(v, scenario.hfa);
  const double h2 = h2_bar(v, scenario.hfa);
  const double k_weight = naive ? h : h2;
  return 0.5 / ((1.0 - 1.0 / m) / (2.0 * v) + h2 / h + 2.0 * k_weight * (k - 1.0) / (m - 1.0));
}

}  // namespace detail

// Approximate argmin_beta d_k, with h2_bar weighting the (k - 1) term. k may
// be fractional (e.g. K/4).
inline double optimal_beta_approx(double k, const ScenarioParams& scenario) {
  return detail::optimal_beta_formula(k, scenario, false);
}

// Second-order Taylor expansion of d_k around beta = 0, h_bar in the k term.
// Overshoots the k-dependence; kept for comparison.
inline double optimal_beta_naive_taylor(double k, const ScenarioParams& scenario) {
  return detail::optimal_beta_formula(k, scenario, true);
}

// Exact argmin of d_1.
inline double optimal_beta_exact_k1(const ScenarioParams& scenario) {
  return detail::optimal_beta_formula(1.0, scenario, false);
}

inline constexpr double kOptimalBetaLowerBracket = 1e-6;
inline constexpr double kOptimalBetaUpperFraction = 0.999;

// argmin_beta d_k by golden-section search on log(beta) over
// [1e-6, 0.999 h_bar / h2_bar], to `rel_tol` relative precision in beta.
inline double optimal_beta_numeric(double k, const ScenarioParams& scenario,
                                   double rel_tol = 1e-8) {
  scenario.validate();
  detail::require_positive_variance(scenario.variance);
  detail::require(std::isfinite(k) && k >= 1, "game count k must be >= 1");
  const double lo = std::log(kOptimalBetaLowerBracket);
  const double hi = std::log(kOptimalBetaUpperFraction * stability_limit(scenario));
  auto objective = [&](double log_beta) { return msd_at(std::exp(log_beta), scenario, k); };
  const auto best = golden_section_minimize(objective, lo, hi, rel_tol);
  const double edge_margin = 1e3 * rel_tol;
  if (best.x - lo < edge_margin || hi - best.x < edge_margin) {
    std::ostringstream msg;
    msg << "optimal step search collapsed onto the bracket edge: beta = " << std::exp(best.x)
        << ", bracket [" << std::exp(lo) << ", " << std::exp(hi) << "], k = " << k
        << ", d_k = " << best.value;
    throw NumericalError(msg.str());
  }
  return std::exp(best.x);
}

// H = diag(H' 1) - H', [H']_mn = (L(t_m - t_n + eta) + L(t_n - t_m + eta)) / (M (M - 1)).
inline Matrix fisher_information(const SkillVector& theta_star, double eta) {
  const std::size_t m = theta_star.size();
  detail::require(m >= 2, "Fisher information needs at least 2 teams");
  const double norm = static_cast<double>(m) * static_cast<double>(m - 1);
  Matrix h(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double diff = theta_star[a] - theta_star[b];
      const double w = (logistic_pdf(diff + eta) + logistic_pdf(-diff + eta)) / norm;
      h(a, b) = -w;
      h(b, a) = -w;
      h(a, a) += w;
      h(b, b) += w;
    }
  }
  return h;
}

// Scalar summary of the model at one operating point.
struct ModelScalars {
  double h_bar = 0.0;
  double h2_bar = 0.0;
  double ell_min = 0.0;
  ConvergenceRates rates;
  double d0 = 0.0;
  double d_inf = 0.0;
  double v_threshold = 0.0;
  double improvement_bound = std::numeric_limits<double>::quiet_NaN();  // NaN when v = 0
};

inline ModelScalars model_scalars(double beta, const ScenarioParams& scenario) {
  ModelScalars s;
  s.h_bar = h_bar(scenario.variance, scenario.hfa);
  s.h2_bar = h2_bar(scenario.variance, scenario.hfa);
  s.ell_min = ell_min(scenario.variance, scenario.hfa);
  s.rates = convergence_rates(beta, scenario);
  s.d0 = initial_msd(scenario);
  s.d_inf = steady_state_msd(beta, scenario);
  s.v_threshold = v_threshold();
  if (scenario.variance > 0) s.improvement_bound = improvement_upper_bound(scenario).bound;
  return s;
}

}  // namespace elolab
