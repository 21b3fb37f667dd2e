#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "elolab/errors.hpp"

namespace elolab {

struct UnivariateMinimum {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

// Golden-section search for the minimum of a unimodal f on [lo, hi]. Stops
// when the bracket is narrower than `abs_tol`.
template <typename F>
UnivariateMinimum golden_section_minimize(F&& f, double lo, double hi, double abs_tol,
                                          int max_iterations = 500) {
  detail::require(lo < hi, "golden section: empty bracket");
  detail::require(abs_tol > 0, "golden section: tolerance must be > 0");
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  int it = 0;
  while (b - a > abs_tol && it < max_iterations) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
    ++it;
  }
  if (b - a > abs_tol) {
    std::ostringstream msg;
    msg << "golden section: no convergence after " << it << " iterations, bracket [" << a << ", "
        << b << "]";
    throw NumericalError(msg.str());
  }
  return f1 <= f2 ? UnivariateMinimum{x1, f1, it} : UnivariateMinimum{x2, f2, it};
}

}  // namespace elolab
