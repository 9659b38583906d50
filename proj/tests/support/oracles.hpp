#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "rotflow/vec2.hpp"

namespace oracle {

using ld = long double;

// Cutoff as the exponential partition h(2-|t|) / (h(2-|t|) + h(|t|-1)).
inline ld h_exp(ld s) { return s > 0 ? std::exp(-1.0L / s) : 0.0L; }
inline ld cutoff(ld t) {
  const ld u = std::fabs(t);
  const ld a = h_exp(2.0L - u);
  const ld b = h_exp(u - 1.0L);
  return a / (a + b);
}

// beta(r) = A (1 - (r/rho)^2)^p and its first three r-derivatives, expanded by hand.
struct Bump {
  ld A, rho;
  int p;
  ld w(ld r) const { return 1.0L - (r / rho) * (r / rho); }
  ld value(ld r) const { return r >= rho ? 0.0L : A * std::pow(w(r), p); }
  ld d1(ld r) const { return r >= rho ? 0.0L : -2.0L * A * p * r / (rho * rho) * std::pow(w(r), p - 1); }
  ld d2(ld r) const {
    if (r >= rho) return 0.0L;
    const ld k = 2.0L * A * p / (rho * rho);
    return -k * std::pow(w(r), p - 1) + 2.0L * k * (p - 1) * r * r / (rho * rho) * std::pow(w(r), p - 2);
  }
  ld laplacian(ld r) const { return r == 0 ? 2.0L * d2(0) : d2(r) + d1(r) / r; }
};

// J0 and J1 from their power series.
inline ld bessel_j0(ld x) {
  ld term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 80; ++k) {
    term *= -(x * x / 4.0L) / (static_cast<ld>(k) * k);
    sum += term;
  }
  return sum;
}
inline ld bessel_j1(ld x) {
  ld term = x / 2.0L, sum = term;
  for (int k = 1; k < 80; ++k) {
    term *= -(x * x / 4.0L) / (static_cast<ld>(k) * (k + 1));
    sum += term;
  }
  return sum;
}

// Central differences of a scalar function of the plane.
using Scalar2 = std::function<double(rotflow::Vec2)>;
inline rotflow::Vec2 fd_grad(const Scalar2 &f, rotflow::Vec2 x, double h) {
  auto d = [&](rotflow::Vec2 e) {
    return (-f(x + 2.0 * h * e) + 8.0 * f(x + h * e) - 8.0 * f(x - h * e) + f(x - 2.0 * h * e)) /
           (12.0 * h);
  };
  return {d({1.0, 0.0}), d({0.0, 1.0})};
}
inline double fd_laplacian(const Scalar2 &f, rotflow::Vec2 x, double h) {
  auto d2 = [&](rotflow::Vec2 e) {
    return (-f(x + 2.0 * h * e) + 16.0 * f(x + h * e) - 30.0 * f(x) + 16.0 * f(x - h * e) -
            f(x - 2.0 * h * e)) /
           (12.0 * h * h);
  };
  return d2({1.0, 0.0}) + d2({0.0, 1.0});
}

inline double max_abs(const std::vector<double> &v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

inline double rel_l2(const std::vector<double> &a, const std::vector<double> &b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace oracle
