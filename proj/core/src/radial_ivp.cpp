#include "rotflow/radial_ivp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rotflow/error.hpp"

namespace rotflow {

namespace {

using State = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Integrator {
public:
  Integrator(const RadialIvpProblem &p) : p_(p) {}

  State deriv(double r, const State &y) const {
    double f = 0.0;
    try {
      f = p_.nonlinearity(y[0]);
    } catch (const std::exception &ex) {
      throw IvpError(std::string("nonlinearity evaluation failed: ") + ex.what());
    }
    if (!std::isfinite(f))
      throw IvpError("nonlinearity returned a non-finite value at phi = " + std::to_string(y[0]));
    return {y[1], -y[1] / r - f};
  }

  // One DP5 step; returns the 5th-order solution and writes the error estimate.
  State dp_step(double r, const State &y, const State &k1, double h, State &err, State &k7) const {
    auto comb = [&](std::initializer_list<std::pair<double, const State *>> terms) {
      State out = y;
      for (const auto &[w, k] : terms) {
        out[0] += h * w * (*k)[0];
        out[1] += h * w * (*k)[1];
      }
      return out;
    };
    const State k2 = deriv(r + c2 * h, comb({{a21, &k1}}));
    const State k3 = deriv(r + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
    const State k4 = deriv(r + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = deriv(r + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        deriv(r + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y5 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    k7 = deriv(r + h, y5);
    for (std::size_t i = 0; i < 2; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    return y5;
  }

  // Advance from r to exactly r_target (either direction).
  State advance(double r, State y, double r_target, double &h_guess) {
    const StepControl &ctl = p_.control;
    const double dir = r_target > r ? 1.0 : -1.0;
    State k1 = deriv(r, y);
    while (dir * (r_target - r) > 0.0) {
      double h = ctl.fixed_step > 0.0 ? ctl.fixed_step : h_guess;
      bool last = false;
      if (h >= dir * (r_target - r)) {
        h = dir * (r_target - r);
        last = true;
      }
      const double hmin = 1e-14 * std::max(1.0, std::fabs(r));
      if (h < hmin) {
        if (last) return y; // target coincides with r to rounding
        throw IvpError("step size underflow at r = " + std::to_string(r));
      }
      if (++steps_ > ctl.max_steps) throw IvpError("step budget exhausted");

      State err{};
      State k7{};
      const State y_new = dp_step(r, y, k1, dir * h, err, k7);

      if (ctl.fixed_step > 0.0) {
        r = last ? r_target : r + dir * h;
        y = y_new;
        k1 = k7;
        ++accepted_;
        continue;
      }

      double norm = 0.0;
      for (std::size_t i = 0; i < 2; ++i) {
        const double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
        norm += (err[i] / sc) * (err[i] / sc);
      }
      norm = std::sqrt(norm / 2.0);
      if (!std::isfinite(norm)) throw IvpError("non-finite solution at r = " + std::to_string(r));

      const double factor =
          norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -1.0 / kIvpOrder), 0.2, 5.0);
      if (norm <= 1.0) {
        r = last ? r_target : r + dir * h;
        y = y_new;
        k1 = k7;
        ++accepted_;
        if (!last) h_guess = h * factor;
      } else {
        ++rejected_;
        h_guess = h * std::min(factor, 1.0);
      }
    }
    return y;
  }

  std::size_t accepted() const { return accepted_; }
  std::size_t rejected() const { return rejected_; }

private:
  const RadialIvpProblem &p_;
  std::size_t steps_ = 0;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
};

} // namespace

RadialIvpProblem RadialIvpProblem::symmetric(std::function<double(double)> f, double r0,
                                             double value, double slope, double eps) {
  RadialIvpProblem p;
  p.nonlinearity = std::move(f);
  p.r0 = r0;
  p.value = value;
  p.slope = slope;
  p.r_min = r0 - eps;
  p.r_max = r0 + eps;
  p.validate();
  return p;
}

void RadialIvpProblem::validate() const {
  if (!nonlinearity) throw InvalidInput("radial IVP: missing nonlinearity");
  if (!(r_min > 0.0)) throw InvalidInput("radial IVP: interval must stay away from r = 0");
  if (!(r_min <= r0 && r0 <= r_max) || !(r_max > r_min))
    throw InvalidInput("radial IVP: r0 must lie inside a nonempty interval");
  if (!std::isfinite(value) || !std::isfinite(slope))
    throw InvalidInput("radial IVP: non-finite initial data");
  if (!(control.abs_tol > 0.0) || !(control.rel_tol >= 0.0))
    throw InvalidInput("radial IVP: tolerances must be positive");
}

RadialIvpSolution solve_radial_ivp(const RadialIvpProblem &problem) {
  problem.validate();
  const StepControl &ctl = problem.control;
  const double spacing =
      ctl.table_spacing > 0.0 ? ctl.table_spacing : (problem.r_max - problem.r_min) / 2048.0;

  // Nodes r0 + k*spacing, k in [-n_back, n_fwd], so r0 is reproduced exactly.
  const auto n_back = static_cast<std::size_t>(
      std::floor((problem.r0 - problem.r_min) / spacing * (1.0 + 1e-12)));
  const auto n_fwd = static_cast<std::size_t>(
      std::floor((problem.r_max - problem.r0) / spacing * (1.0 + 1e-12)));
  const std::size_t n = n_back + n_fwd + 1;

  RadialIvpSolution sol;
  sol.r.resize(n);
  sol.phi.resize(n);
  sol.slope.resize(n);
  sol.origin_index = n_back;
  for (std::size_t i = 0; i < n; ++i)
    sol.r[i] = problem.r0 + (static_cast<double>(i) - static_cast<double>(n_back)) * spacing;
  sol.r[n_back] = problem.r0;
  sol.phi[n_back] = problem.value;
  sol.slope[n_back] = problem.slope;

  Integrator integ(problem);
  const double h0 = ctl.initial_step > 0.0 ? ctl.initial_step : spacing / 4.0;

  double h = h0;
  State y{problem.value, problem.slope};
  for (std::size_t i = n_back + 1; i < n; ++i) {
    y = integ.advance(sol.r[i - 1], y, sol.r[i], h);
    sol.phi[i] = y[0];
    sol.slope[i] = y[1];
  }
  h = h0;
  y = {problem.value, problem.slope};
  for (std::size_t i = n_back; i-- > 0;) {
    y = integ.advance(sol.r[i + 1], y, sol.r[i], h);
    sol.phi[i] = y[0];
    sol.slope[i] = y[1];
  }
  sol.accepted_steps = integ.accepted();
  sol.rejected_steps = integ.rejected();

  const int order = n >= 6 ? 5 : 4;
  if (n >= static_cast<std::size_t>(order) + 1)
    sol.profile =
        RadialProfile::tabulated(sol.r, sol.phi, order, RadialProfile::Support::segment);
  return sol;
}

} // namespace rotflow
