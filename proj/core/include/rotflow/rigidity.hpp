#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "rotflow/field.hpp"

namespace rotflow {

struct SymmetrySetOptions {
  double r_max = 1.0;
  double dr = 0.05;
  std::size_t n_angles = 256;
  /// Membership threshold on the normalized circle oscillation sigma.
  double tau = 1e-8;
  /// Boundary radii are refined by bisection against this roundoff-level
  /// threshold (raised to the noise level of the member run).
  double refine_floor = 1e-13;
  std::size_t refine_iterations = 50;
};

struct CircleSample {
  double r = 0.0;
  double sigma = 0.0; ///< (max - min of phi on the circle) / global oscillation
  bool member = false;
};

struct RadiusInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct BoundaryRadius {
  double r = 0.0;         ///< refined location
  double sampled_r = 0.0; ///< last member sample before refinement
  bool non_isolated = false;
};

/// Numerical estimate of I = { r : phi is constant on |x| = r }.
struct SymmetrySetEstimate {
  std::vector<CircleSample> samples;
  std::vector<RadiusInterval> intervals; ///< closed, disjoint, increasing
  std::vector<BoundaryRadius> boundary;  ///< endpoints inside (0, r_max)
  double oscillation = 0.0;
  SymmetrySetOptions options;

  bool contains(double r) const;
};

/// Samples circles r_i = i dr, i dr <= r_max. sigma uses max-minus-min over
/// `n_angles` equally spaced angles, normalized by the oscillation of phi over
/// a fixed 64-angle sampling of the same radii (so more angles never lower sigma).
SymmetrySetEstimate estimate_symmetry_set(const Field &field, const SymmetrySetOptions &opts);

struct BoundaryGradient {
  double r = 0.0;
  bool non_isolated = false;
  double max_grad = 0.0;
  double relative = 0.0; ///< max_grad / max|grad phi| over the sampled disk
  bool violation = false;
};

struct BoundaryGradientReport {
  std::vector<BoundaryGradient> radii;
  double field_scale = 0.0;
  double tolerance = 1e-8;
  bool any_violation = false;
};

/// max |grad phi| on each boundary circle of the estimate. Only non-isolated
/// boundary radii can be flagged; isolated ones are reported without a gate.
BoundaryGradientReport boundary_gradient_check(const Field &field,
                                               const SymmetrySetEstimate &estimate,
                                               double tolerance = 1e-8);

struct RadialConsistencyReport {
  double max_discrepancy = 0.0;
  double relative = 0.0; ///< over max |lap phi| on the tested circles
  std::size_t n_points = 0;
};

/// Compares the 2D Laplacian with phi'' + phi'/r of the profile extracted
/// along a ray from `center`, on radii in [r_lo, r_hi].
RadialConsistencyReport radial_consistency(const Field &field, double r_lo, double r_hi,
                                           Vec2 center, double dr, std::size_t n_angles = 16);

struct Region {
  Vec2 center;
  double r_inner = 0.0;
  double r_outer = 1.0;
};

struct FunctionalRelationOptions {
  std::size_t n_radial = 160;
  std::size_t n_angular = 160;
  std::size_t bins = 256;
  /// Points with |grad phi| <= this x max|grad phi| are excluded.
  double gradient_threshold = 1e-6;
  double tau_f = 1e-6;
};

struct ScatterPoint {
  double phi = 0.0;
  double lap_phi = 0.0;
};

/// Single-valuedness of lap phi as a function of phi. Each retained sample
/// is moved along grad phi onto the level set of its bin centre (Newton) and
/// the spread of lap phi is taken over the projected points of each bin.
struct FunctionalRelationReport {
  std::vector<ScatterPoint> scatter; ///< raw (phi, lap phi) after filtering
  std::size_t projected = 0;
  double width = 0.0; ///< W: max over bins of the spread
  double lap_range = 0.0;
  double relative_width = 0.0;
  bool single_valued = false;
  std::string verdict() const { return single_valued ? "single-valued" : "multi-valued"; }
};

FunctionalRelationReport functional_relation_test(const Field &field, const Region &region,
                                                  const FunctionalRelationOptions &opts = {});

} // namespace rotflow
