#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "rotflow/flow_spec.hpp"
#include "rotflow/grid_io.hpp"

namespace rotflow {

/// Periodic box [-L, L)^2 with N points per side (N a power of two, N >= 16).
struct SpectralGrid {
  std::size_t n = 256;
  double half_width = 8.0;

  static SpectralGrid make(std::size_t n, double half_width);
  double spacing() const { return 2.0 * half_width / static_cast<double>(n); }
  double coordinate(std::size_t i) const {
    return -half_width + static_cast<double>(i) * spacing();
  }
  Vec2 point(std::size_t i, std::size_t j) const { return {coordinate(i), coordinate(j)}; }
  std::size_t size() const { return n * n; }
  /// Node layout in the raw-grid dump format.
  GridSpec grid_spec() const;
  /// Rejects specs whose support radius 2R is not below 0.9 L.
  void check_support(double glue_radius) const;
};

/// Physical vorticity samples at time t, row-major with x fastest.
struct VorticityState {
  std::vector<double> omega;
  double time = 0.0;
};

enum class Dealiasing { none, two_thirds };

struct SolverConfig {
  double cfl = 0.5;
  /// Fixed time step; when absent it is derived from the CFL number.
  std::optional<double> dt;
  Dealiasing dealiasing = Dealiasing::two_thirds;
  /// Exponential filter exp(-strength (|k|/k_max)^order) after each step.
  bool filter = false;
  double filter_strength = 36.0;
  int filter_order = 36;
  /// Diagnostics every this many steps (the final state is always recorded).
  std::size_t diagnostic_every = 10;
  /// Dt cap 2 pi / (|Omega| steps_per_revolution).
  double steps_per_revolution = 1000.0;
};

struct VelocityGrids {
  std::vector<double> vx;
  std::vector<double> vy;
};

/// Pseudo-spectral solver for d_t omega + v . grad omega = 0 with
/// v = grad^perp Laplacian^{-1} omega, classical RK4 in time.
///
/// Owns FFT plans and scratch space: one instance per simulation, not to be
/// shared across threads. Independent instances may run concurrently.
class SpectralSolver {
public:
  SpectralSolver(SpectralGrid grid, SolverConfig config = {});
  ~SpectralSolver();
  SpectralSolver(const SpectralSolver &) = delete;
  SpectralSolver &operator=(const SpectralSolver &) = delete;

  const SpectralGrid &grid() const { return grid_; }
  const SolverConfig &config() const { return config_; }

  /// Rejects fields whose mean exceeds 1e-12 max|omega|.
  VelocityGrids velocity_from_vorticity(const VorticityState &state);
  /// -v . grad omega with the configured dealiasing of the product.
  std::vector<double> rhs(const VorticityState &state);
  /// One RK4 step; throws InstabilityError on non-finite values.
  VorticityState step(const VorticityState &state, double dt);
  /// Advances `steps` steps of size dt.
  VorticityState advance(const VorticityState &state, double dt, std::size_t steps);

  /// Spectral Laplacian and its inverse (zero mode set to 0).
  std::vector<double> laplacian(const std::vector<double> &field);
  std::vector<double> inverse_laplacian(const std::vector<double> &field);

  double max_speed(const VorticityState &state);
  /// 1/2 int |v|^2 and int omega^2 over the box.
  double energy(const VorticityState &state);
  double enstrophy(const VorticityState &state) const;
  double mean(const VorticityState &state) const;

  /// CFL-limited step for `state`, capped for rotating flows.
  double stable_dt(const VorticityState &state, double omega);

private:
  struct Impl;
  SpectralGrid grid_;
  SolverConfig config_;
  std::unique_ptr<Impl> impl_;
};

/// omega0(R_{Omega t} x) on the spectral grid, R the clockwise rotation.
std::vector<double> rotate_reference(const ComposedFlow &flow, const SpectralGrid &grid, double t);

/// Initial vorticity sampled from the construction, with its grid mean removed.
VorticityState initial_state(const ComposedFlow &flow, const SpectralGrid &grid);

struct DiagnosticsRow {
  double t = 0.0;
  double energy = 0.0;
  double enstrophy = 0.0;
  double min_w = 0.0;
  double max_w = 0.0;
  double e_rot = 0.0;
  double mean_w = 0.0;
  std::vector<double> bump_angles;
};

struct RunResult {
  std::vector<DiagnosticsRow> series;
  double dt = 0.0;
  std::size_t steps = 0;
  VorticityState final_state;

  double final_error() const { return series.empty() ? 0.0 : series.back().e_rot; }
  double max_error() const;
  double energy_drift() const;
  double enstrophy_drift() const;
};

struct RunOptions {
  /// Called with every recorded state (snapshots); may be empty.
  std::function<void(const VorticityState &, std::size_t step)> on_diagnostic;
};

/// Evolves the construction's omega0 to `horizon` and measures the deviation
/// from rigid rotation e(t) = ||omega(t) - omega0(R_{Omega t} .)||_2 / ||omega0||_2.
RunResult run(const ComposedFlow &flow, const SpectralGrid &grid, const SolverConfig &config,
              double horizon, const RunOptions &options = {});

/// Bump centre estimates: first moments of |omega - 2 Omega| over disks of
/// radius rho_k around the rigidly rotated centres. Returns polar angles; NaN
/// for bumps centred at the origin.
std::vector<double> track_bumps(const ComposedFlow &flow, const SpectralGrid &grid,
                                const std::vector<double> &omega, double t);

} // namespace rotflow
