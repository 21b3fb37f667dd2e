#pragma once

// Independent numerical references for the test suite. Nothing here calls
// into the library's closed forms.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

// Physicists' Gauss-Hermite rule: integral of exp(-x^2) f(x) ~ sum w_i f(x_i).
// Roots by Newton iteration on the orthonormal recurrence.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussHermite(int n) : nodes(static_cast<std::size_t>(n)), weights(nodes.size()) {
    const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
      if (i == 0) z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
      else if (i == 1) z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
      else if (i == 2) z = 1.86 * z - 0.86 * nodes[0];
      else if (i == 3) z = 1.91 * z - 0.91 * nodes[1];
      else z = 2.0 * z - nodes[static_cast<std::size_t>(i - 2)];
      double pp = 0.0;
      int it = 0;
      for (; it < 100; ++it) {
        double p1 = pim4;
        double p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
        }
        pp = std::sqrt(2.0 * n) * p2;
        const double z1 = z;
        z = z1 - p1 / pp;
        if (std::abs(z - z1) <= 1e-14) break;
      }
      if (it == 100) throw std::runtime_error("Gauss-Hermite: root did not converge");
      nodes[static_cast<std::size_t>(i)] = z;
      nodes[static_cast<std::size_t>(n - 1 - i)] = -z;
      weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
      weights[static_cast<std::size_t>(n - 1 - i)] = weights[static_cast<std::size_t>(i)];
    }
  }

  // E[f(z)] for z ~ N(mean, variance).
  double expectation(const std::function<double(double)>& f, double mean, double variance) const {
    if (variance == 0.0) return f(mean);
    const double scale = std::sqrt(2.0 * variance);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mean + scale * nodes[i]);
    return acc / std::sqrt(std::numbers::pi);
  }
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double logistic_density(double z) { return sigmoid(z) * sigmoid(-z); }

inline double binary_entropy_of_logit(double z) {
  const double p = sigmoid(z);
  const double q = sigmoid(-z);
  double h = 0.0;
  if (p > 0) h -= p * std::log(p);
  if (q > 0) h -= q * std::log(q);
  return h;
}

// Brute-force minimiser: dense log-spaced scan, then repeated local refinement
// around the best grid point.
inline double grid_argmin_log(const std::function<double(double)>& f, double lo, double hi,
                              int points = 4001, int refinements = 6) {
  double a = std::log(lo);
  double b = std::log(hi);
  double best = a;
  for (int round = 0; round <= refinements; ++round) {
    double best_value = INFINITY;
    const double step = (b - a) / (points - 1);
    for (int i = 0; i < points; ++i) {
      const double x = a + step * i;
      const double value = f(std::exp(x));
      if (value < best_value) {
        best_value = value;
        best = x;
      }
    }
    a = std::max(std::log(lo), best - 2 * step);
    b = std::min(std::log(hi), best + 2 * step);
  }
  return std::exp(best);
}

}  // namespace oracle
