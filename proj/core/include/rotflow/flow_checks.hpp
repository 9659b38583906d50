#pragma once

#include <limits>
#include <string>
#include <vector>

#include "rotflow/flow_spec.hpp"
#include "rotflow/grid_io.hpp"

namespace rotflow {

/// Pointwise (v0 - Omega x^perp) . grad omega0 = grad^perp phi . grad lap phi.
struct ResidualReport {
  Grid2D residual;
  double max_abs = 0.0;
  double rms = 0.0;
  double max_grad = 0.0;     ///< max |grad^perp phi|
  double max_grad_lap = 0.0; ///< max |grad lap phi|
  double normalized_max = 0.0;
  double normalized_rms = 0.0;
};

/// Normalization divides by max|grad^perp phi| * max|grad lap phi|. A factor
/// below its roundoff floor (max|grad lap phi| <= 1e-8 max|grad phi| / l^2,
/// l the grid half-diagonal) counts as identically zero, so 0/0 -> 0.
ResidualReport residual_rotating(const Field &field, const GridSpec &grid);

enum class RadialityVerdict { radial, locally_radial, not_locally_radial };
std::string to_string(RadialityVerdict v);

struct AnnulusReport {
  Vec2 center;
  double r_inner = 0.0;
  double r_outer = 0.0; ///< may be +inf
  std::string origin;   ///< "bump k", "exterior", "imported candidate", "whole plane"
  double angular_variation = 0.0;
  bool radial = false;
};

struct LocalRadialityReport {
  std::vector<AnnulusReport> annuli;
  RadialityVerdict verdict = RadialityVerdict::radial;
  std::string summary;
};

struct LocalRadialityOptions {
  std::size_t n_radii = 48;
  std::size_t n_angles = 128;
  /// Max-minus-min on each tested circle, relative to the global oscillation.
  double tolerance = 1e-6;
};

/// Decomposition R^2 = S u (union of annuli) realized by the construction,
/// with each annulus verified numerically. Gap regions belong to S.
LocalRadialityReport check_locally_radial(const FlowSpec &spec,
                                          const LocalRadialityOptions &opts = {});

struct OmegaBoundsReport {
  double omega = 0.0;
  double inf_all = 0.0;
  double sup_all = 0.0;
  double inf_inner = 0.0; ///< over B_R
  double sup_inner = 0.0;
  bool stationary = false;       ///< Omega == 0: the bound says nothing about rotation
  bool strict_inclusion = false; ///< inf_inner/2 < Omega < sup_inner/2
  bool chain_holds = false;      ///< inf_all <= inf_inner/2 < Omega < sup_inner/2 <= sup_all
};

/// Samples omega0 on `grid` and compares Omega with half its range over B_R.
OmegaBoundsReport omega_bounds_check(const Field &field, double glue_radius,
                                     const GridSpec &grid);

/// Evaluates one derived quantity of `field` on every grid node.
enum class Quantity { phi, velocity_x, velocity_y, vorticity };
Grid2D sample_grid(const Field &field, const GridSpec &grid, Quantity q);

} // namespace rotflow
