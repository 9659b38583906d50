#pragma once

#include <limits>

#include "rotflow/vec2.hpp"

namespace rotflow {

enum class Provenance { analytic, imported_grid };

/// Relative stream function phi and everything derived from it at one point.
///
/// velocity = grad^perp phi + Omega x^perp, vorticity = lap phi + 2 Omega.
struct FieldSample {
  Vec2 x;
  double phi = 0.0;
  Vec2 grad;
  Sym2 hessian;
  double laplacian = 0.0;
  Vec2 grad_laplacian;
  Vec2 velocity;
  double vorticity = 0.0;
  Provenance provenance = Provenance::analytic;
};

/// Fills velocity and vorticity from the phi derivatives.
inline void assemble_flow(FieldSample &s, double omega) {
  s.laplacian = s.hessian.trace();
  s.velocity = perp(s.grad) + omega * perp(s.x);
  s.vorticity = s.laplacian + 2.0 * omega;
}

/// Anything that can be evaluated pointwise as a relative stream function.
class Field {
public:
  virtual ~Field() = default;
  virtual FieldSample sample(Vec2 x) const = 0;
  virtual double angular_velocity() const { return 0.0; }
  /// Radius of the disk around the origin where samples are meaningful.
  virtual double extent() const { return std::numeric_limits<double>::infinity(); }
};

} // namespace rotflow
