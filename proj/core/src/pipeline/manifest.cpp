#include "rotflow/pipeline/manifest.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "rotflow/error.hpp"
#include "rotflow/pipeline/sha256.hpp"
#include "rotflow/version.hpp"

namespace rotflow::pipeline {

Manifest::Manifest(std::filesystem::path out_dir, const PipelineConfig &config)
    : dir_(std::move(out_dir)), config_(config.effective), hash_(config.hash()) {
  const auto path = dir_ / kFileName;
  std::ifstream in(path);
  if (!in) return;
  try {
    const Json old = Json::parse(in);
    if (old.value("config_hash", "") != hash_) return;
    for (const Json &s : old.at("stages"))
      stages_.push_back({s.at("name").get<std::string>(), s.at("status").get<std::string>(),
                         s.at("seconds").get<double>(), s.value("message", "")});
  } catch (const nlohmann::json::exception &) {
    stages_.clear(); // unreadable manifest: start over
  }
}

void Manifest::record(StageRecord stage) {
  std::erase_if(stages_, [&](const StageRecord &s) { return s.name == stage.name; });
  stages_.push_back(std::move(stage));
}

std::vector<FileRecord> Manifest::scan(const std::filesystem::path &out_dir) {
  std::vector<FileRecord> files;
  for (const auto &entry : std::filesystem::recursive_directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), out_dir);
    if (rel == kFileName) continue;
    files.push_back({rel.generic_string(), sha256_file(entry.path()), entry.file_size()});
  }
  std::sort(files.begin(), files.end(),
            [](const FileRecord &a, const FileRecord &b) { return a.path < b.path; });
  return files;
}

void Manifest::write() {
  files_ = scan(dir_);
  Json j;
  j["toolkit"] = "rotflow";
  j["version"] = kVersion;
  j["config_hash"] = hash_;
  j["config"] = config_;
  j["stages"] = Json::array();
  for (const auto &s : stages_)
    j["stages"].push_back(
        {{"name", s.name}, {"status", s.status}, {"seconds", s.seconds}, {"message", s.message}});
  j["files"] = Json::array();
  for (const auto &f : files_)
    j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  std::ofstream out(dir_ / kFileName);
  if (!out) throw Error(fmt::format("cannot write {}", (dir_ / kFileName).string()));
  out << j.dump(2) << '\n';
}

} // namespace rotflow::pipeline
