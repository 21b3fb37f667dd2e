#pragma once

// Second, deliberately plain implementation of the mean-square model used as
// an oracle. Expectations come from Gauss-Hermite quadrature of the Laplace
// closed form written out by hand, in long double.

#include <cmath>
#include <numbers>

namespace oracle {

struct Reference {
  int M;
  long double v;
  long double eta;

  long double h() const {
    return 0.25L / std::sqrt(v + 1.0L) * std::exp(-eta * eta / (4.0L * (v + 1.0L)));
  }
  long double h2() const {
    return (1.0L / 16.0L) / std::sqrt(2.0L * v + 1.0L) *
           std::exp(-eta * eta / (2.0L * (2.0L * v + 1.0L)));
  }
  long double alpha2(long double beta) const {
    return 1.0L - 4.0L * beta * (h() - beta * h2()) / (M - 1);
  }
  long double d_inf(long double beta) const {
    return beta * h() * (M - 1) / (2.0L * (h() - beta * h2()));
  }
  long double msd(long double beta, long double k) const {
    const long double d0 = M * v;
    return std::pow(alpha2(beta), k) * (d0 - d_inf(beta)) + d_inf(beta);
  }
};

}  // namespace oracle
