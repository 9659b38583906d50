#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rotflow/pipeline/config.hpp"

namespace rotflow::pipeline {

struct StageRecord {
  std::string name;
  std::string status; ///< "ok", "failed" or "error"
  double seconds = 0.0;
  std::string message;
};

struct FileRecord {
  std::string path; ///< relative to the output directory, '/' separated
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// manifest.json of an output directory. Stages recorded under the same
/// config hash are kept; a different hash starts a fresh stage list.
class Manifest {
public:
  static constexpr const char *kFileName = "manifest.json";

  Manifest(std::filesystem::path out_dir, const PipelineConfig &config);

  void record(StageRecord stage);
  /// Rescans the directory, checksums every file and writes the manifest.
  void write();

  const std::vector<StageRecord> &stages() const { return stages_; }
  const std::vector<FileRecord> &files() const { return files_; }

  static std::vector<FileRecord> scan(const std::filesystem::path &out_dir);

private:
  std::filesystem::path dir_;
  Json config_;
  std::string hash_;
  std::vector<StageRecord> stages_;
  std::vector<FileRecord> files_;
};

} // namespace rotflow::pipeline
