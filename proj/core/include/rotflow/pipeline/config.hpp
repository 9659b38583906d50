#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rotflow/flow_spec.hpp"
#include "rotflow/rigidity.hpp"
#include "rotflow/spectral.hpp"

namespace rotflow::pipeline {

using Json = nlohmann::json;

struct BuildSettings {
  std::size_t residual_n = 1024;
  double residual_tol = 1e-8;
};

struct SimulateSettings {
  SolverConfig solver;
  double horizon_revolutions = 1.0;
  std::optional<double> horizon_time;
  /// Write an omega snapshot at recorded states whose step is a multiple of this (0: off).
  std::size_t snapshot_every = 0;
  double e_tol = 1e-2;
};

struct AnalysisSettings {
  SymmetrySetOptions symmetry;
  FunctionalRelationOptions relation;
  double boundary_tol = 1e-8;
  double radiality_tol = 1e-6;
  std::size_t bounds_n = 512;
};

/// Effective configuration: embedded defaults, then the config file, then overrides.
struct PipelineConfig {
  Json effective;
  std::filesystem::path base_dir;

  FlowSpec flow;
  std::size_t grid_n = 256;
  double half_width = 7.0;
  BuildSettings build;
  SimulateSettings simulate;
  AnalysisSettings analysis;
  std::filesystem::path out_dir;

  SpectralGrid spectral_grid() const { return SpectralGrid::make(grid_n, half_width); }
  /// Revolutions are converted with the period 2 pi / |Omega|; for Omega = 0
  /// a revolution is taken as 2 pi time units.
  double horizon() const;
  std::string hash() const;
};

Json default_config();

/// Sets a dot-path key ("solver.cfl=0.25", "flow.bumps.0.amplitude=2").
/// The value is parsed as JSON when possible and kept as a string otherwise.
void apply_override(Json &config, const std::string &assignment);

/// Merges `user` onto `defaults`, rejecting keys the defaults do not define.
Json merge_config(const Json &defaults, const Json &user);

PipelineConfig make_config(const Json &user, const std::filesystem::path &base_dir,
                           const std::vector<std::string> &overrides = {});
PipelineConfig load_config(const std::filesystem::path &path,
                           const std::vector<std::string> &overrides = {});

/// JSON description of a flow spec (profiles by parameters or table path).
Json describe_flow(const PipelineConfig &config);

} // namespace rotflow::pipeline
