#include "rotflow/imported_field.hpp"

#include <algorithm>
#include <cmath>

#include "rotflow/error.hpp"
#include "rotflow/interpolation.hpp"

namespace rotflow {

ImportedField::ImportedField(Grid2D grid, int order) : grid_(std::move(grid)), order_(order) {
  if (order_ < 3 || static_cast<std::size_t>(order_) + 1 > kMaxStencil)
    throw InvalidInput("imported field: interpolation order must be in [3, 11]");
  const std::size_t width = static_cast<std::size_t>(order_) + 1;
  if (grid_.spec.nx < width || grid_.spec.ny < width)
    throw InvalidInput("imported field: grid smaller than the interpolation stencil");
  if (grid_.values.size() != grid_.spec.size())
    throw InvalidInput("imported field: value count does not match grid");
  for (double v : grid_.values)
    if (!std::isfinite(v)) throw InvalidInput("imported field: non-finite sample");
}

ImportedField ImportedField::load(const std::filesystem::path &path, int order) {
  return ImportedField(read_grid(path), order);
}

bool ImportedField::contains(Vec2 x) const {
  const GridSpec &s = grid_.spec;
  return x.x >= s.x0 && x.x <= s.x_max() && x.y >= s.y0 && x.y <= s.y_max();
}

double ImportedField::extent() const {
  const GridSpec &s = grid_.spec;
  return std::min({std::fabs(s.x0), std::fabs(s.x_max()), std::fabs(s.y0), std::fabs(s.y_max())});
}

FieldSample ImportedField::jet(Vec2 x) const {
  FieldSample out;
  out.x = x;
  out.provenance = Provenance::imported_grid;
  if (!contains(x)) return out;

  const GridSpec &s = grid_.spec;
  const std::size_t width = static_cast<std::size_t>(order_) + 1;
  const std::size_t i0 = uniform_stencil_start(s.x0, s.dx, s.nx, x.x, width);
  const std::size_t j0 = uniform_stencil_start(s.y0, s.dy, s.ny, x.y, width);

  std::array<double, kMaxStencil> xs{};
  std::array<double, kMaxStencil> ys{};
  for (std::size_t k = 0; k < width; ++k) {
    // Local coordinates keep the weights well conditioned.
    xs[k] = static_cast<double>(k) * s.dx;
    ys[k] = static_cast<double>(k) * s.dy;
  }
  StencilWeights wx{};
  StencilWeights wy{};
  const Vec2 base = s.point(i0, j0);
  fornberg_weights3(x.x - base.x, std::span<const double>(xs.data(), width), wx);
  fornberg_weights3(x.y - base.y, std::span<const double>(ys.data(), width), wy);

  // d[a][b] = d^a/dx^a d^b/dy^b, a + b <= 3.
  double d[4][4] = {};
  for (std::size_t j = 0; j < width; ++j) {
    double row[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < width; ++i) {
      const double f = grid_.values[s.index(i0 + i, j0 + j)];
      for (int a = 0; a < 4; ++a) row[a] += wx[a][i] * f;
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; a + b < 4; ++b) d[a][b] += wy[b][j] * row[a];
  }

  out.phi = d[0][0];
  out.grad = {d[1][0], d[0][1]};
  out.hessian = {d[2][0], d[1][1], d[0][2]};
  out.laplacian = out.hessian.trace();
  out.grad_laplacian = {d[3][0] + d[1][2], d[2][1] + d[0][3]};
  return out;
}

FieldSample ImportedField::sample(Vec2 x) const {
  FieldSample s = jet(x);
  assemble_flow(s, 0.0);
  return s;
}

bool ImportedField::frame_vanishes(double rel_tol) const {
  const GridSpec &s = grid_.spec;
  double peak = 0.0;
  for (double v : grid_.values) peak = std::max(peak, std::fabs(v));
  const double tol = rel_tol * peak;
  for (std::size_t i = 0; i < s.nx; ++i)
    if (std::fabs(grid_.at(i, 0)) > tol || std::fabs(grid_.at(i, s.ny - 1)) > tol) return false;
  for (std::size_t j = 0; j < s.ny; ++j)
    if (std::fabs(grid_.at(0, j)) > tol || std::fabs(grid_.at(s.nx - 1, j)) > tol) return false;
  return true;
}

double ImportedField::support_radius() const {
  const GridSpec &s = grid_.spec;
  double r = 0.0;
  for (std::size_t j = 0; j < s.ny; ++j)
    for (std::size_t i = 0; i < s.nx; ++i)
      if (grid_.at(i, j) != 0.0) r = std::max(r, norm(s.point(i, j)));
  return r;
}

} // namespace rotflow
