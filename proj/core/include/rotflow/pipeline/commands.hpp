#pragma once

#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rotflow/flow_checks.hpp"
#include "rotflow/pipeline/config.hpp"
#include "rotflow/rigidity.hpp"
#include "rotflow/spectral.hpp"

namespace rotflow::pipeline {

inline constexpr int kExitOk = 0;
inline constexpr int kExitGateFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Environment variable capping the number of concurrent sweep workers.
inline constexpr const char *kMaxWorkersEnv = "ROTFLOW_MAX_WORKERS";

class Log {
public:
  explicit Log(bool quiet, std::ostream *out = nullptr);
  void info(const std::string &msg);
  void error(const std::string &msg);

private:
  bool quiet_;
  std::ostream *out_;
  std::mutex mutex_;
};

struct CommandContext {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> out_dir;
  std::vector<std::string> overrides;
  bool quiet = false;
};

struct BuildOutcome {
  ResidualReport residual;
  std::size_t exterior_samples = 0;
  std::size_t exterior_nonzero = 0; ///< samples with |x| >= 2R where v0 or omega0 != 0
  bool passed = false;
};

struct SimulateOutcome {
  RunResult run;
  double horizon = 0.0;
  bool passed = false;
};

struct AnalyzeOutcome {
  SymmetrySetEstimate symmetry;
  BoundaryGradientReport boundary;
  LocalRadialityReport radiality;
  OmegaBoundsReport bounds;
  std::vector<std::pair<Region, FunctionalRelationReport>> annuli;
  std::optional<FunctionalRelationReport> global;
  bool passed = false;
};

/// Stage bodies writing into `out_dir` (which must exist).
BuildOutcome run_build(const PipelineConfig &config, const std::filesystem::path &out_dir, Log &log);
SimulateOutcome run_simulate(const PipelineConfig &config, const std::filesystem::path &out_dir,
                             Log &log);
AnalyzeOutcome run_analyze(const PipelineConfig &config, const std::filesystem::path &out_dir,
                           Log &log);

/// CLI entry points: load the config, run the stage, update the manifest and
/// return the process exit code.
int cmd_build(const CommandContext &ctx, Log &log);
int cmd_simulate(const CommandContext &ctx, Log &log);
int cmd_analyze(const CommandContext &ctx, Log &log);
/// `params` entries are "key=v1,v2,..." and extend `sweep.params` of the config.
int cmd_sweep(const CommandContext &ctx, const std::vector<std::string> &params, Log &log);

/// Worker count for `cells` sweep cells given the environment cap.
std::size_t sweep_workers(std::size_t cells);

} // namespace rotflow::pipeline
