#include "rotflow/pipeline/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "rotflow/error.hpp"
#include "rotflow/pipeline/sha256.hpp"

namespace rotflow::pipeline {

namespace {

std::vector<std::string> split_path(const std::string &key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (const auto &p : parts)
    if (p.empty()) throw InvalidInput(fmt::format("override key '{}' has an empty component", key));
  return parts;
}

bool is_index(const std::string &s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

void merge_into(Json &out, const Json &user, const std::string &where) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = where.empty() ? it.key() : where + "." + it.key();
    if (!out.contains(it.key())) throw InvalidInput(fmt::format("unknown config key '{}'", key));
    Json &slot = out[it.key()];
    if (slot.is_object() && !slot.empty()) {
      if (!it->is_object())
        throw InvalidInput(fmt::format("config key '{}' must be a section (object)", key));
      merge_into(slot, *it, key);
    } else {
      slot = *it;
    }
  }
}

template <typename T> T get(const Json &j, const char *section, const char *key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw InvalidInput(fmt::format("config key '{}.{}' has the wrong type", section, key));
  }
}

std::size_t get_count(const Json &j, const char *section, const char *key) {
  const Json &v = j.at(section).at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw InvalidInput(fmt::format("config key '{}.{}' must be a non-negative integer", section, key));
  return v.get<std::size_t>();
}

Vec2 get_point(const Json &j, const std::string &where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InvalidInput(fmt::format("'{}' must be a two-element numeric array", where));
  return {j[0].get<double>(), j[1].get<double>()};
}

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

Bump parse_bump(const Json &b, std::size_t k, const std::filesystem::path &base) {
  const std::string where = fmt::format("flow.bumps.{}", k);
  if (!b.is_object()) throw InvalidInput(fmt::format("'{}' must be an object", where));
  for (auto it = b.begin(); it != b.end(); ++it) {
    static const std::vector<std::string> known{"center", "amplitude", "radius", "smoothness",
                                                "table", "order"};
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw InvalidInput(fmt::format("unknown config key '{}.{}'", where, it.key()));
  }
  const Vec2 c = get_point(b.value("center", Json::array({0.0, 0.0})), where + ".center");
  try {
    if (b.contains("table")) {
      const int order = b.value("order", 5);
      return {c, RadialProfile::load_table(resolve(base, b.at("table").get<std::string>()), order)};
    }
    return {c, RadialProfile::bump(b.at("amplitude").get<double>(), b.at("radius").get<double>(),
                                   b.at("smoothness").get<int>())};
  } catch (const nlohmann::json::exception &) {
    throw InvalidInput(fmt::format(
        "'{}' needs numeric amplitude, radius and integer smoothness, or a table path", where));
  }
}

} // namespace

Json default_config() {
  return Json::parse(R"({
    "flow": {"omega": 0.0, "glue_radius": 3.0, "bumps": [], "imported": null},
    "grid": {"n": 256, "half_width": 7.0},
    "build": {"residual_n": 1024, "residual_tol": 1e-8},
    "solver": {"cfl": 0.5, "dt": null, "dealiasing": "two_thirds", "filter": false,
               "filter_strength": 36.0, "filter_order": 36, "diagnostic_every": 10,
               "steps_per_revolution": 1000.0, "horizon_revolutions": 1.0,
               "horizon_time": null, "snapshot_every": 0, "e_tol": 1e-2},
    "analysis": {"dr": 0.05, "r_max": null, "n_angles": 256, "tau": 1e-8,
                 "refine_floor": 1e-13, "tau_f": 1e-6, "bins": 256,
                 "gradient_threshold": 1e-6, "n_radial": 160, "n_angular": 160,
                 "boundary_tol": 1e-8, "radiality_tol": 1e-6, "bounds_n": 512},
    "output": {"dir": "out"},
    "sweep": {"params": {}, "stages": ["build", "simulate"]}
  })");
}

Json merge_config(const Json &defaults, const Json &user) {
  if (!user.is_object()) throw InvalidInput("config root must be a JSON object");
  Json out = defaults;
  merge_into(out, user, "");
  return out;
}

void apply_override(Json &config, const std::string &assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw InvalidInput(fmt::format("override '{}' is not of the form key=value", assignment));
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::parse_error &) {
    value = text;
  }
  Json *node = &config;
  const auto parts = split_path(key);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string &p = parts[i];
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      if (!is_index(p) || std::stoul(p) >= node->size())
        throw InvalidInput(fmt::format("override '{}': '{}' is not a valid index", key, p));
      node = &(*node)[std::stoul(p)];
    } else if (node->is_object()) {
      if (!node->contains(p) && !last)
        throw InvalidInput(fmt::format("override '{}': unknown section '{}'", key, p));
      node = &(*node)[p];
    } else {
      throw InvalidInput(fmt::format("override '{}': '{}' is not a section", key, p));
    }
  }
  *node = value;
}

double PipelineConfig::horizon() const {
  if (simulate.horizon_time) return *simulate.horizon_time;
  const double period = flow.omega != 0.0 ? 2.0 * std::numbers::pi / std::fabs(flow.omega)
                                          : 2.0 * std::numbers::pi;
  return simulate.horizon_revolutions * period;
}

std::string PipelineConfig::hash() const { return sha256_hex(effective.dump()); }

PipelineConfig make_config(const Json &user, const std::filesystem::path &base_dir,
                           const std::vector<std::string> &overrides) {
  const Json defaults = default_config();
  Json eff = merge_config(defaults, user);
  for (const auto &o : overrides) apply_override(eff, o);
  eff = merge_config(defaults, eff); // re-check keys introduced by overrides

  PipelineConfig c;
  c.effective = eff;
  c.base_dir = base_dir;

  c.flow.omega = get<double>(eff, "flow", "omega");
  c.flow.glue_radius = get<double>(eff, "flow", "glue_radius");
  const Json &bumps = eff["flow"]["bumps"];
  if (!bumps.is_array()) throw InvalidInput("'flow.bumps' must be an array");
  for (std::size_t k = 0; k < bumps.size(); ++k)
    c.flow.bumps.push_back(parse_bump(bumps[k], k, base_dir));
  const Json &imp = eff["flow"]["imported"];
  if (!imp.is_null()) {
    if (!imp.is_object() || !imp.contains("path") || !imp["path"].is_string())
      throw InvalidInput("'flow.imported' must be null or an object with a 'path'");
    const int order = imp.value("order", 5);
    c.flow.imported = std::make_shared<const ImportedField>(
        ImportedField::load(resolve(base_dir, imp["path"].get<std::string>()), order));
  }

  c.grid_n = get_count(eff, "grid", "n");
  c.half_width = get<double>(eff, "grid", "half_width");

  c.build.residual_n = get_count(eff, "build", "residual_n");
  c.build.residual_tol = get<double>(eff, "build", "residual_tol");
  if (c.build.residual_n < 2) throw InvalidInput("build.residual_n must be at least 2");

  SolverConfig &s = c.simulate.solver;
  s.cfl = get<double>(eff, "solver", "cfl");
  if (!eff["solver"]["dt"].is_null()) s.dt = get<double>(eff, "solver", "dt");
  const auto dealias = get<std::string>(eff, "solver", "dealiasing");
  if (dealias == "two_thirds")
    s.dealiasing = Dealiasing::two_thirds;
  else if (dealias == "none")
    s.dealiasing = Dealiasing::none;
  else
    throw InvalidInput(fmt::format("solver.dealiasing '{}' is not one of two_thirds, none", dealias));
  s.filter = get<bool>(eff, "solver", "filter");
  s.filter_strength = get<double>(eff, "solver", "filter_strength");
  s.filter_order = get<int>(eff, "solver", "filter_order");
  s.diagnostic_every = get_count(eff, "solver", "diagnostic_every");
  s.steps_per_revolution = get<double>(eff, "solver", "steps_per_revolution");
  c.simulate.horizon_revolutions = get<double>(eff, "solver", "horizon_revolutions");
  if (!eff["solver"]["horizon_time"].is_null())
    c.simulate.horizon_time = get<double>(eff, "solver", "horizon_time");
  c.simulate.snapshot_every = get_count(eff, "solver", "snapshot_every");
  c.simulate.e_tol = get<double>(eff, "solver", "e_tol");
  if (!(s.cfl > 0.0)) throw InvalidInput("solver.cfl must be positive");
  if (s.dt && !(*s.dt > 0.0)) throw InvalidInput("solver.dt must be positive");

  AnalysisSettings &a = c.analysis;
  a.symmetry.dr = get<double>(eff, "analysis", "dr");
  a.symmetry.r_max = eff["analysis"]["r_max"].is_null() ? 2.0 * c.flow.glue_radius
                                                         : get<double>(eff, "analysis", "r_max");
  a.symmetry.n_angles = get_count(eff, "analysis", "n_angles");
  a.symmetry.tau = get<double>(eff, "analysis", "tau");
  a.symmetry.refine_floor = get<double>(eff, "analysis", "refine_floor");
  a.relation.tau_f = get<double>(eff, "analysis", "tau_f");
  a.relation.bins = get_count(eff, "analysis", "bins");
  a.relation.gradient_threshold = get<double>(eff, "analysis", "gradient_threshold");
  a.relation.n_radial = get_count(eff, "analysis", "n_radial");
  a.relation.n_angular = get_count(eff, "analysis", "n_angular");
  a.boundary_tol = get<double>(eff, "analysis", "boundary_tol");
  a.radiality_tol = get<double>(eff, "analysis", "radiality_tol");
  a.bounds_n = get_count(eff, "analysis", "bounds_n");

  c.out_dir = resolve(base_dir, get<std::string>(eff, "output", "dir"));

  // Cross-section checks before any computation.
  c.flow.validate();
  c.spectral_grid().check_support(c.flow.glue_radius);
  const double t = c.horizon();
  if (!std::isfinite(t) || t < 0.0) throw InvalidInput("solver horizon must be finite and >= 0");
  if (!eff["sweep"]["params"].is_object()) throw InvalidInput("'sweep.params' must be an object");
  return c;
}

PipelineConfig load_config(const std::filesystem::path &path,
                           const std::vector<std::string> &overrides) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("cannot open config file {}", path.string()));
  Json user;
  try {
    user = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error &e) {
    throw InvalidInput(fmt::format("config {}: {}", path.string(), e.what()));
  }
  return make_config(user, path.parent_path(), overrides);
}

Json describe_flow(const PipelineConfig &config) {
  Json j;
  j["omega"] = config.flow.omega;
  j["glue_radius"] = config.flow.glue_radius;
  j["bumps"] = Json::array();
  for (const Bump &b : config.flow.bumps) {
    Json e;
    e["center"] = {b.center.x, b.center.y};
    e["support_radius"] = b.profile.support_radius();
    if (b.profile.kind() == ProfileKind::closed_form) {
      e["kind"] = "bump";
      e["amplitude"] = b.profile.amplitude();
      e["smoothness"] = b.profile.smoothness();
    } else {
      e["kind"] = "tabulated";
      e["interpolation_order"] = b.profile.interpolation_order();
      e["nodes"] = b.profile.table_r().size();
    }
    j["bumps"].push_back(e);
  }
  j["imported"] = config.effective["flow"]["imported"];
  return j;
}

} // namespace rotflow::pipeline
