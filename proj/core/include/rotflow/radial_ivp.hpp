#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rotflow/radial_profile.hpp"

namespace rotflow {

/// Step control for the embedded Dormand-Prince 5(4) integrator.
struct StepControl {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// Nonzero: integrate with this constant step instead of adapting (order studies).
  double fixed_step = 0.0;
  /// Output table spacing; zero means (r_max - r_min) / 2048.
  double table_spacing = 0.0;
  double initial_step = 0.0;
  std::size_t max_steps = 10'000'000;
};

/// phi'' + phi'/r + f(phi) = 0 on [r_min, r_max] with data at r0.
struct RadialIvpProblem {
  std::function<double(double)> nonlinearity;
  double r0 = 1.0;
  double value = 0.0;
  double slope = 0.0;
  double r_min = 0.5;
  double r_max = 1.5;
  StepControl control;

  /// Interval (r0 - eps, r0 + eps); requires r0 - eps > 0.
  static RadialIvpProblem symmetric(std::function<double(double)> f, double r0, double value,
                                    double slope, double eps);
  void validate() const;
};

/// Sampled solution on a uniform table containing r0 as an exact node.
struct RadialIvpSolution {
  std::vector<double> r;
  std::vector<double> phi;
  std::vector<double> slope;
  std::size_t origin_index = 0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Segment profile interpolating (r, phi).
  RadialProfile profile;
};

/// Embedded-pair RK integration of the radial semilinear IVP, forward and
/// backward from r0. Throws IvpError on step-size underflow, step budget
/// exhaustion, or non-finite nonlinearity values.
RadialIvpSolution solve_radial_ivp(const RadialIvpProblem &problem);

/// Order of the propagated solution of the embedded pair.
inline constexpr int kIvpOrder = 5;

} // namespace rotflow
