#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rotflow {

/// Finite-difference / interpolation weights at `z` for derivatives 0..max_order
/// from arbitrary distinct nodes (Fornberg's recursion).
///
/// Result is indexed [order][node].
std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes,
                                                  int max_order);

/// Same, fixed to derivatives 0..3, writing into a caller-provided buffer.
/// `nodes.size()` must not exceed kMaxStencil.
inline constexpr std::size_t kMaxStencil = 12;
using StencilWeights = std::array<std::array<double, kMaxStencil>, 4>;
void fornberg_weights3(double z, std::span<const double> nodes, StencilWeights &out);

/// First index of a `width`-point stencil around `z` in a sorted node array,
/// shifted inward at the ends.
std::size_t stencil_start(std::span<const double> sorted_nodes, double z, std::size_t width);

/// Same for a uniform grid x_i = x0 + i*dx with n nodes.
std::size_t uniform_stencil_start(double x0, double dx, std::size_t n, double z, std::size_t width);

} // namespace rotflow
