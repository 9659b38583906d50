#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "rotflow/vec2.hpp"

namespace rotflow {

/// Uniform node-centred grid, x_i = x0 + i*dx, y_j = y0 + j*dy.
struct GridSpec {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 1.0;
  double dy = 1.0;

  /// n x n nodes spanning [-half_width, half_width]^2 inclusive.
  static GridSpec square(std::size_t n, double half_width);

  std::size_t size() const { return nx * ny; }
  Vec2 point(std::size_t i, std::size_t j) const {
    return {x0 + static_cast<double>(i) * dx, y0 + static_cast<double>(j) * dy};
  }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  double x_max() const { return x0 + static_cast<double>(nx - 1) * dx; }
  double y_max() const { return y0 + static_cast<double>(ny - 1) * dy; }
};

/// Named field on a grid; row-major with x fastest.
struct Grid2D {
  GridSpec spec;
  std::string name;
  std::vector<double> values;

  double &at(std::size_t i, std::size_t j) { return values[spec.index(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return values[spec.index(i, j)]; }
};

/// Raw dump: one text line "nx ny x0 y0 dx dy field-name" followed by
/// nx*ny little-endian IEEE-754 doubles, row-major.
void write_grid(const std::filesystem::path &path, const Grid2D &grid);
Grid2D read_grid(const std::filesystem::path &path);

} // namespace rotflow
