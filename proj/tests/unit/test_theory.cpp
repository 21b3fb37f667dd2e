#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "elolab/montecarlo.hpp"
#include "elolab/theory.hpp"
#include "oracles.hpp"
#include "reference_model.hpp"

using namespace elolab;

namespace {

constexpr double kLn2 = std::numbers::ln2;
const ScenarioParams kBase{15, 3.0, 0.0, 1.0};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Laplace, ReducesToValueAtZero) {
  EXPECT_DOUBLE_EQ(laplace_expectation(kLogisticPdfIdentity, 0.0, 0.0), 0.25);
  EXPECT_DOUBLE_EQ(laplace_expectation(kBinaryEntropyIdentity, 0.0, 0.0), kLn2);
  EXPECT_THROW(laplace_expectation(kLogisticPdfIdentity, 0.0, -1.0), std::invalid_argument);
}

TEST(Laplace, IdentityConstantsFromDerivatives) {
  // v_f = -f(0) / f''(0), with f'' by central differences of the exact integrands.
  const double h = 1e-4;
  auto vf = [&](auto f) {
    const double f2 = (f(h) - 2 * f(0.0) + f(-h)) / (h * h);
    return -f(0.0) / f2;
  };
  auto pdf = [](double z) { return oracle::logistic_density(z); };
  auto pdf_sq = [](double z) { return std::pow(oracle::logistic_density(z), 2); };
  auto entropy = [](double z) { return oracle::binary_entropy_of_logit(z); };
  EXPECT_NEAR(vf(pdf), kLogisticPdfIdentity.v_f, 1e-5);
  EXPECT_NEAR(vf(pdf_sq), kLogisticPdfSquaredIdentity.v_f, 1e-5);
  EXPECT_NEAR(vf(entropy), kBinaryEntropyIdentity.v_f, 1e-5);
  EXPECT_NEAR(pdf(0.0), kLogisticPdfIdentity.f_at_zero, 1e-15);
  EXPECT_NEAR(pdf_sq(0.0), kLogisticPdfSquaredIdentity.f_at_zero, 1e-15);
  EXPECT_NEAR(entropy(0.0), kBinaryEntropyIdentity.f_at_zero, 1e-15);
}

TEST(Laplace, WithinFivePercentOfQuadratureAtModerateVariance) {
  const oracle::GaussHermite gh(96);
  auto pdf = [](double z) { return oracle::logistic_density(z); };
  const double quad = gh.expectation(pdf, 0.0, 2.0 * 3.0);
  EXPECT_LE(rel(laplace_expectation(kLogisticPdfIdentity, 0.0, 3.0), quad), 0.05);
}

TEST(Laplace, ClosedFormsMatchIdentityTable) {
  for (double v : {0.0, 0.3, 1.0, 2.7, 10.0}) {
    for (double eta : {0.0, 0.4, -1.1}) {
      EXPECT_NEAR(h_bar(v, eta), laplace_expectation(kLogisticPdfIdentity, eta, v), 1e-12);
      EXPECT_NEAR(h2_bar(v, eta), laplace_expectation(kLogisticPdfSquaredIdentity, eta, v), 1e-12);
      EXPECT_NEAR(ell_min(v, eta), laplace_expectation(kBinaryEntropyIdentity, eta, v), 1e-12);
    }
  }
}

TEST(HBar, Values) {
  EXPECT_DOUBLE_EQ(h_bar(0.0, 0.0), 0.25);
  EXPECT_DOUBLE_EQ(h_bar(3.0, 0.0), 0.125);
  const double oracle_value = 0.25 / std::sqrt(3.7) * std::exp(-0.66 * 0.66 / (4 * 3.7));
  EXPECT_NEAR(h_bar(2.7, 0.66), oracle_value, 1e-15);
  EXPECT_NEAR(h_bar(2.7, 0.66), 0.126199, 5e-7);
  EXPECT_THROW(h_bar(-0.1, 0.0), std::invalid_argument);
}

TEST(H2Bar, Values) {
  EXPECT_DOUBLE_EQ(h2_bar(0.0, 0.0), 0.0625);
  EXPECT_NEAR(h2_bar(3.0, 0.0), 1.0 / (16.0 * std::sqrt(7.0)), 1e-16);
  EXPECT_NEAR(h2_bar(3.0, 0.0), 0.023623, 5e-7);
  EXPECT_THROW(h2_bar(-0.1, 0.0), std::invalid_argument);
  for (double v : {0.0, 0.5, 3.0, 10.0}) {
    const double ratio = h2_bar(v, 0.0) / h_bar(v, 0.0);
    EXPECT_GE(ratio, std::sqrt(2.0) / 8.0 - 1e-15);
    EXPECT_LE(ratio, 0.25 + 1e-15);
  }
}

TEST(EllMin, Values) {
  EXPECT_DOUBLE_EQ(ell_min(0.0, 0.0), kLn2);
  const double oracle_value = kLn2 * std::sqrt(2 * kLn2 / (3.0 + 2 * kLn2));
  EXPECT_NEAR(ell_min(3.0, 0.0), oracle_value, 1e-15);
  EXPECT_NEAR(ell_min(3.0, 0.0), 0.389710, 5e-5);
  EXPECT_LT(ell_min(100.0, 0.0), 0.082);
  double previous = INFINITY;
  for (double v = 0.0; v <= 100.0; v += 0.5) {
    EXPECT_LT(ell_min(v, 0.0), previous);
    previous = ell_min(v, 0.0);
  }
  EXPECT_THROW(ell_min(-1.0, 0.0), std::invalid_argument);
}

TEST(VThreshold, Values) {
  EXPECT_NEAR(v_threshold(), 1.386294, 5e-7);
  EXPECT_NEAR(ell_min(v_threshold(), 0.0), kLn2 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(ell_min(v_threshold(), 0.0), 0.490129, 5e-7);
  const double asymptote = kLn2 * std::sqrt(2 * kLn2 / v_threshold());
  EXPECT_NEAR(asymptote, ell_min(0.0, 0.0), 1e-15);
}

TEST(ConvergenceRates, ReferenceScenario) {
  const auto r = convergence_rates(0.1, kBase);
  const oracle::Reference ref{15, 3.0L, 0.0L};
  EXPECT_NEAR(r.alpha1, 1.0 - 2 * 0.1 * 0.125 / 14, 1e-15);
  EXPECT_NEAR(r.alpha2, static_cast<double>(ref.alpha2(0.1L)), 1e-15);
  EXPECT_NEAR(r.alpha1, 0.998214, 5e-7);
  EXPECT_NEAR(r.alpha2, 0.996496, 5e-7);
  EXPECT_NEAR(r.tau1, 560.0, 1e-9);
  EXPECT_NEAR(r.tau2, 285.39, 5e-3);
  EXPECT_TRUE(r.stable);
  EXPECT_NEAR(std::pow(r.alpha1, 100.0), std::exp(-100.0 / r.tau1_exact), 1e-13);
}

TEST(ConvergenceRates, SmallStepLimit) {
  for (double beta : {1e-3, 1e-4, 1e-6}) {
    const auto r = convergence_rates(beta, kBase);
    EXPECT_LT(1.0 - r.alpha1, 1e-3);
    EXPECT_NEAR(r.tau1 / r.tau2, 2.0, 0.2);
    EXPECT_LE(rel(r.tau1, r.tau1_exact), 0.01);
  }
  const auto r = convergence_rates(1e-6, kBase);
  EXPECT_NEAR(r.tau1 / r.tau2, 2.0, 1e-5);
}

TEST(ConvergenceRates, RejectsNonPositiveStep) {
  EXPECT_THROW(convergence_rates(0.0, kBase), std::invalid_argument);
  EXPECT_THROW(convergence_rates(-0.5, kBase), std::invalid_argument);
}

TEST(ConvergenceRates, UnstableStepIsFlagged) {
  const ScenarioParams tiny{2, 0.0, 0.0, 1.0};
  const auto r = convergence_rates(20.0, tiny);
  EXPECT_FALSE(r.stable);
  EXPECT_TRUE(std::isnan(r.tau1_exact));
  EXPECT_TRUE(std::isfinite(r.tau1));
}

TEST(GamesToConvergence, Values) {
  EXPECT_NEAR(games_to_convergence(0.1, kBase), 1680.0, 1e-9);
  EXPECT_NEAR(games_to_convergence(0.2, kBase), 840.0, 1e-9);
  const auto r = convergence_rates(0.1, kBase);
  EXPECT_LE(std::pow(r.alpha1, 3 * r.tau1), 0.05);
  EXPECT_NEAR(std::exp(-3.0), 0.0498, 1e-4);
  EXPECT_THROW(games_to_convergence(20.0, {2, 0.0, 0.0, 1.0}), StabilityError);
}

TEST(TheoryTrajectory, EndpointsAndIdentities) {
  const auto c = theory_trajectory(0.1, kBase, 300);
  ASSERT_EQ(c.k_grid.size(), 301u);
  EXPECT_DOUBLE_EQ(c.d0, 45.0);
  EXPECT_DOUBLE_EQ(theory_trajectory(0.1, {15, 2.7, 0.0, 1.0}, 1).d0, 40.5);
  const double oracle_dinf = 0.1 * 0.125 * 14 / (2 * (0.125 - 0.1 / (16 * std::sqrt(7.0))));
  EXPECT_NEAR(c.d_inf, oracle_dinf, 1e-13);
  EXPECT_NEAR(c.d_inf, 0.71348, 5e-6);
  EXPECT_EQ(c.total_variance[0], 0.0);
  EXPECT_DOUBLE_EQ(c.bias_sq[0], c.d0);
  EXPECT_NEAR(c.mean_loss[0], c.ell_min + 0.125 * 45.0 / 14.0, 1e-14);
  const oracle::Reference ref{15, 3.0L, 0.0L};
  for (std::size_t k = 0; k < c.k_grid.size(); ++k) {
    EXPECT_NEAR(c.bias_sq[k] + c.total_variance[k], c.msd[k], 1e-12);
    EXPECT_NEAR(c.mean_loss[k] - c.ell_min, 0.125 / 14.0 * c.msd[k], 1e-12);
    EXPECT_NEAR(c.msd[k], static_cast<double>(ref.msd(0.1L, k)), 1e-11);
  }
}

TEST(TheoryTrajectory, LongRunLimits) {
  const auto c = theory_trajectory(1.0, kBase, 5000);
  EXPECT_LT(c.bias_sq.back(), 1e-6);
  EXPECT_NEAR(c.total_variance.back(), c.d_inf, 1e-6);
  EXPECT_NEAR(c.mean_skill_factor.back(), 1.0, 1e-6);
}

TEST(TheoryTrajectory, RejectsUnstableStep) {
  const double limit = stability_limit(kBase);
  EXPECT_NEAR(limit, h_bar(3.0, 0.0) / h2_bar(3.0, 0.0), 1e-15);
  EXPECT_THROW(theory_trajectory(limit, kBase, 10), StabilityError);
  EXPECT_THROW(theory_trajectory(limit * 1.5, kBase, 10), StabilityError);
  EXPECT_NO_THROW(theory_trajectory(limit * 0.99, kBase, 10));
  EXPECT_THROW(theory_trajectory(0.0, kBase, 10), std::invalid_argument);
  EXPECT_THROW(theory_trajectory(0.1, kBase, -1), std::invalid_argument);
}

TEST(ImprovementBound, Values) {
  const auto b = improvement_upper_bound(kBase);
  const double oracle_value = 1.0 / ((1.0 - 1.0 / 15) / 6.0 + 0.5 / std::sqrt(7.0));
  EXPECT_NEAR(b.bound, oracle_value, 1e-14);
  EXPECT_NEAR(b.bound, 2.90243, 5e-5);
  EXPECT_DOUBLE_EQ(b.small_v_rule, 6.0);
  EXPECT_THROW(improvement_upper_bound({15, 0.0, 0.0, 1.0}), std::invalid_argument);
}

TEST(ImprovementBound, SmallVarianceRule) {
  const auto b = improvement_upper_bound({1000, 0.05, 0.0, 1.0});
  EXPECT_LE(rel(b.bound, 0.1), 0.15);
}

TEST(ImprovementBound, SteadyStateEqualsInitialAtBound) {
  for (double v : {0.5, 3.0, 8.0}) {
    const ScenarioParams scen{12, v, 0.3, 1.0};
    const double b = improvement_upper_bound(scen).bound;
    EXPECT_NEAR(steady_state_msd(b, scen), initial_msd(scen), 1e-9 * initial_msd(scen));
  }
}

TEST(OptimalBeta, FirstGameIsHalfTheBound) {
  EXPECT_NEAR(optimal_beta_approx(1, kBase), 1.45122, 5e-6);
  for (double v : {0.2, 3.0, 9.0}) {
    const ScenarioParams scen{9, v, 0.5, 1.0};
    EXPECT_NEAR(optimal_beta_approx(1, scen), improvement_upper_bound(scen).bound / 2, 1e-15);
    EXPECT_DOUBLE_EQ(optimal_beta_naive_taylor(1, scen), optimal_beta_approx(1, scen));
    EXPECT_DOUBLE_EQ(optimal_beta_exact_k1(scen), optimal_beta_approx(1, scen));
  }
}

TEST(OptimalBeta, NaiveVersusCorrected) {
  EXPECT_NEAR(optimal_beta_naive_taylor(50, kBase), 0.40999, 1e-5);
  EXPECT_NEAR(optimal_beta_approx(50, kBase), 0.98058, 2e-5);
}

TEST(OptimalBeta, FractionalGameCount) {
  const double at = optimal_beta_approx(52.5, kBase);
  EXPECT_LT(at, optimal_beta_approx(52, kBase));
  EXPECT_GT(at, optimal_beta_approx(53, kBase));
}

TEST(OptimalBeta, RejectsInvalidInput) {
  EXPECT_THROW(optimal_beta_approx(0.5, kBase), std::invalid_argument);
  EXPECT_THROW(optimal_beta_approx(5, {15, 0.0, 0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(optimal_beta_naive_taylor(0, kBase), std::invalid_argument);
  EXPECT_THROW(optimal_beta_numeric(0, kBase), std::invalid_argument);
  EXPECT_THROW(optimal_beta_numeric(5, {15, 0.0, 0.0, 1.0}), std::invalid_argument);
}

TEST(OptimalBetaNumeric, FirstGameMatchesExactForm) {
  for (double v : {0.1, 1.0, 3.0, 10.0}) {
    const ScenarioParams scen{15, v, 0.0, 1.0};
    EXPECT_LE(rel(optimal_beta_numeric(1, scen), optimal_beta_exact_k1(scen)), 1e-6) << v;
  }
}

TEST(OptimalBetaNumeric, AgreesWithBruteForceGrid) {
  for (double v : {0.1, 1.0, 10.0}) {
    for (int k : {1, 10, 100, 400}) {
      const oracle::Reference ref{15, v, 0.0L};
      const double limit = static_cast<double>(ref.h() / ref.h2());
      const double grid = oracle::grid_argmin_log(
          [&](double b) { return static_cast<double>(ref.msd(b, k)); }, 1e-6, 0.999 * limit);
      EXPECT_LE(rel(optimal_beta_numeric(k, {15, v, 0.0, 1.0}), grid), 1e-5)
          << "v = " << v << ", k = " << k;
    }
  }
}

TEST(OptimalBetaNumeric, ApproximationTracksNumericForSmallAndModerateK) {
  for (double v : {0.1, 1.0}) {
    for (int k : {1, 10, 100}) {
      const ScenarioParams scen{15, v, 0.0, 1.0};
      EXPECT_LE(rel(optimal_beta_approx(k, scen), optimal_beta_numeric(k, scen)), 0.15)
          << "v = " << v << ", k = " << k;
    }
  }
}

TEST(OptimalBetaNumeric, DecreasingInGamesAndBelowBound) {
  for (double v : {0.1, 1.0, 3.0, 10.0}) {
    for (double eta : {0.0, 0.6}) {
      const ScenarioParams scen{15, v, eta, 1.0};
      const double bound = improvement_upper_bound(scen).bound;
      double previous = INFINITY;
      for (int k : {1, 2, 5, 10, 30, 100, 300, 1000}) {
        const double b = optimal_beta_numeric(k, scen);
        EXPECT_LE(b, previous * (1 + 1e-7));
        EXPECT_LE(b, bound);
        previous = b;
      }
    }
  }
}

TEST(OptimalBetaNumeric, NaiveMismatchForLongerHorizons) {
  for (int k : {20, 50, 100, 200, 500}) {
    const double numeric = optimal_beta_numeric(k, kBase);
    EXPECT_GT(rel(optimal_beta_naive_taylor(k, kBase), numeric), 0.30) << k;
    EXPECT_LE(rel(optimal_beta_approx(k, kBase), numeric), 0.15) << k;
  }
}

TEST(MsdInBeta, Unimodal) {
  for (int k : {1, 10, 100, 1000}) {
    const double limit = stability_limit(kBase);
    int sign_changes = 0;
    double prev_diff = 0.0;
    double prev = msd_at(1e-6, kBase, k);
    const int n = 2000;
    for (int i = 1; i <= n; ++i) {
      const double beta = std::exp(std::log(1e-6) + (std::log(0.999 * limit) - std::log(1e-6)) * i / n);
      const double d = msd_at(beta, kBase, k);
      const double diff = d - prev;
      if (i > 1 && ((diff > 0) != (prev_diff > 0)) && diff != 0 && prev_diff != 0) ++sign_changes;
      prev_diff = diff;
      prev = d;
    }
    EXPECT_EQ(sign_changes, 1) << "k = " << k;
  }
}

TEST(FisherInformation, AllEqualSkills) {
  const auto h = fisher_information(SkillVector(3), 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_NEAR(h(i, j), i == j ? 1.0 / 6.0 : -1.0 / 12.0, 1e-16);
  EXPECT_THROW(fisher_information(SkillVector(1), 0.0), std::invalid_argument);
}

TEST(FisherInformation, StructureForRandomSkills) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    SkillVector theta(7);
    for (double& x : theta.values) x = rng.normal(0.0, 2.0);
    const auto h = fisher_information(theta, 0.4);
    EXPECT_TRUE(h.is_symmetric(0.0));
    for (double e : h.multiply(std::vector<double>(7, 1.0))) EXPECT_NEAR(e, 0.0, 1e-15);
    // Positive semidefinite: x'Hx >= 0 for random x.
    for (int t = 0; t < 10; ++t) {
      std::vector<double> x(7);
      for (double& e : x) e = rng.normal();
      const auto hx = h.multiply(x);
      double q = 0.0;
      for (std::size_t i = 0; i < 7; ++i) q += x[i] * hx[i];
      EXPECT_GE(q, -1e-15);
    }
  }
}

TEST(FisherInformation, AverageMatchesScaledAutocorrelation) {
  const int teams = 200;
  const double v = 1.0;
  const ScenarioParams scen{teams, v, 0.0, 1.0};
  Rng rng(77);
  Matrix mean(teams);
  const int draws = 100;
  for (int d = 0; d < draws; ++d) {
    const auto h = fisher_information(draw_true_skills(scen, rng), 0.0);
    for (int i = 0; i < teams; ++i)
      for (int j = 0; j < teams; ++j) mean(i, j) += h(i, j) / draws;
  }
  // Entrywise noise on single off-diagonal entries is a few percent at 100
  // draws, so off-diagonals are compared through their mean.
  const auto r = theoretical_autocorrelation(teams);
  const double h = h_bar(v, 0.0);
  double off_sum = 0.0;
  for (int i = 0; i < teams; ++i) {
    EXPECT_LE(rel(mean(i, i), h * r(i, i)), 0.05) << "diagonal " << i;
    for (int j = 0; j < teams; ++j)
      if (i != j) off_sum += mean(i, j);
  }
  const double off_mean = off_sum / (teams * (teams - 1.0));
  EXPECT_LE(rel(off_mean, h * r(0, 1)), 0.05);
}

TEST(ModelScalars, Consistent) {
  const auto s = model_scalars(0.1, kBase);
  EXPECT_DOUBLE_EQ(s.h_bar, 0.125);
  EXPECT_DOUBLE_EQ(s.d0, 45.0);
  EXPECT_DOUBLE_EQ(s.d_inf, steady_state_msd(0.1, kBase));
  EXPECT_DOUBLE_EQ(s.improvement_bound, improvement_upper_bound(kBase).bound);
  EXPECT_TRUE(std::isnan(model_scalars(0.1, {15, 0.0, 0.0, 1.0}).improvement_bound));
}
