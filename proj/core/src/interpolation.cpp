#include "rotflow/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "rotflow/error.hpp"

namespace rotflow {

namespace {

// Fornberg (1988), "Generation of finite difference formulas on arbitrarily
// spaced grids". c[k][j] is the weight of node j for the k-th derivative.
template <typename Table>
void fornberg_impl(double z, std::span<const double> x, int m, Table &c) {
  const std::size_t n = x.size();
  double c1 = 1.0;
  double c4 = x[0] - z;
  for (int k = 0; k <= m; ++k)
    for (std::size_t j = 0; j < n; ++j) c[k][j] = 0.0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
}

} // namespace

std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes,
                                                  int max_order) {
  if (nodes.empty() || max_order < 0) throw InvalidInput("fornberg_weights: empty stencil");
  std::vector<std::vector<double>> c(static_cast<std::size_t>(max_order) + 1,
                                     std::vector<double>(nodes.size()));
  fornberg_impl(z, nodes, max_order, c);
  return c;
}

void fornberg_weights3(double z, std::span<const double> nodes, StencilWeights &out) {
  if (nodes.empty() || nodes.size() > kMaxStencil)
    throw InvalidInput("fornberg_weights3: stencil size out of range");
  fornberg_impl(z, nodes, 3, out);
}

std::size_t stencil_start(std::span<const double> sorted_nodes, double z, std::size_t width) {
  const std::size_t n = sorted_nodes.size();
  if (width > n) throw InvalidInput("stencil wider than table");
  const auto it = std::upper_bound(sorted_nodes.begin(), sorted_nodes.end(), z);
  const auto right = static_cast<std::ptrdiff_t>(it - sorted_nodes.begin());
  std::ptrdiff_t start = right - static_cast<std::ptrdiff_t>(width / 2);
  start = std::clamp<std::ptrdiff_t>(start, 0, static_cast<std::ptrdiff_t>(n - width));
  return static_cast<std::size_t>(start);
}

std::size_t uniform_stencil_start(double x0, double dx, std::size_t n, double z, std::size_t width) {
  if (width > n) throw InvalidInput("stencil wider than grid");
  const double s = std::clamp(std::floor((z - x0) / dx), -1.0, static_cast<double>(n));
  std::ptrdiff_t right = static_cast<std::ptrdiff_t>(s) + 1;
  std::ptrdiff_t start = right - static_cast<std::ptrdiff_t>(width / 2);
  start = std::clamp<std::ptrdiff_t>(start, 0, static_cast<std::ptrdiff_t>(n - width));
  return static_cast<std::size_t>(start);
}

} // namespace rotflow
