#pragma once

#include <filesystem>

#include "rotflow/field.hpp"
#include "rotflow/grid_io.hpp"

namespace rotflow {

/// Externally produced phi-bar on a uniform grid.
///
/// Derivatives up to third order come from tensor-product local polynomials
/// of the declared order (Fornberg weights on an (order+1)^2 stencil).
/// Outside the grid rectangle the field is identically zero.
class ImportedField final : public Field {
public:
  ImportedField(Grid2D grid, int order = 5);
  static ImportedField load(const std::filesystem::path &path, int order = 5);

  FieldSample sample(Vec2 x) const override;
  double extent() const override;

  /// phi-bar restricted to its derivative jet (no flow assembly).
  FieldSample jet(Vec2 x) const;
  bool contains(Vec2 x) const;
  /// True when every sample on the outermost frame is zero to `rel_tol` x max|phi|.
  bool frame_vanishes(double rel_tol = 1e-12) const;
  /// Largest |x| over grid nodes with nonzero value.
  double support_radius() const;

  const Grid2D &grid() const { return grid_; }
  int order() const { return order_; }

private:
  Grid2D grid_;
  int order_;
};

} // namespace rotflow
