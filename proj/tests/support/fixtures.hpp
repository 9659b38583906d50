#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "rotflow/flow_spec.hpp"
#include "rotflow/pipeline/config.hpp"

namespace fixtures {

inline std::filesystem::path dir() { return ROTFLOW_FIXTURE_DIR; }
inline std::filesystem::path path(const std::string &name) { return dir() / (name + ".json"); }

inline rotflow::pipeline::PipelineConfig config(const std::string &name,
                                                const std::vector<std::string> &overrides = {}) {
  return rotflow::pipeline::load_config(path(name), overrides);
}
inline rotflow::FlowSpec spec(const std::string &name,
                              const std::vector<std::string> &overrides = {}) {
  return config(name, overrides).flow;
}

inline std::filesystem::path scratch(const std::string &name) {
  const auto p = std::filesystem::path(ROTFLOW_SCRATCH_DIR) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// Random valid FlowSpec: 1-4 disjoint bumps inside B_R with random (A, rho, p), random Omega.
// Grid-based checks pass a larger minimum p and rho so the fields are resolved.
inline rotflow::FlowSpec random_spec(std::mt19937_64 &rng, int min_p = 3, double min_rho = 0.05) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  rotflow::FlowSpec s;
  s.glue_radius = 1.0 + 4.0 * U(rng);
  s.omega = -3.0 + 6.0 * U(rng);
  const int n = 1 + static_cast<int>(U(rng) * 4.0);
  for (int tries = 0; tries < 200 && static_cast<int>(s.bumps.size()) < n; ++tries) {
    const double R = s.glue_radius;
    const double rho = R * (min_rho + (0.45 - min_rho) * U(rng));
    const double r = (R - rho) * 0.98 * U(rng);
    const double th = 2.0 * 3.141592653589793 * U(rng);
    const rotflow::Vec2 c{r * std::cos(th), r * std::sin(th)};
    bool ok = true;
    for (const auto &b : s.bumps)
      ok = ok && rotflow::norm(b.center - c) > 1.01 * (rho + b.profile.support_radius());
    if (!ok) continue;
    const double A = (U(rng) < 0.5 ? -1.0 : 1.0) * (0.01 + 2.0 * U(rng));
    const int p = min_p + static_cast<int>(U(rng) * 10.0);
    s.bumps.push_back({c, rotflow::RadialProfile::bump(A, rho, p)});
  }
  return s;
}

} // namespace fixtures
