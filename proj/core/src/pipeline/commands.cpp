#include "rotflow/pipeline/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include <fmt/format.h>

#include "rotflow/error.hpp"
#include "rotflow/grid_io.hpp"
#include "rotflow/pipeline/manifest.hpp"

namespace rotflow::pipeline {

Log::Log(bool quiet, std::ostream *out) : quiet_(quiet), out_(out ? out : &std::cerr) {}

void Log::info(const std::string &msg) {
  if (quiet_) return;
  std::lock_guard lock(mutex_);
  *out_ << msg << '\n';
}

void Log::error(const std::string &msg) {
  std::lock_guard lock(mutex_);
  *out_ << "error: " << msg << '\n';
}

namespace {

/// Raised by stage bodies when a result misses its configured bound.
class GateFailure : public Error {
public:
  using Error::Error;
};

std::ofstream open_out(const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  return out;
}

void write_json(const std::filesystem::path &path, const Json &j) { open_out(path) << j.dump(2) << '\n'; }

std::string num(double v) { return fmt::format("{:.17g}", v); }

Json residual_json(const BuildOutcome &b, const PipelineConfig &c) {
  return {{"grid_n", c.build.residual_n},
          {"half_width", c.half_width},
          {"max_abs", b.residual.max_abs},
          {"rms", b.residual.rms},
          {"max_grad", b.residual.max_grad},
          {"max_grad_lap", b.residual.max_grad_lap},
          {"normalized_max", b.residual.normalized_max},
          {"normalized_rms", b.residual.normalized_rms},
          {"tolerance", c.build.residual_tol},
          {"exterior_samples", b.exterior_samples},
          {"exterior_nonzero", b.exterior_nonzero},
          {"passed", b.passed}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

using StageBody = std::function<void(const PipelineConfig &, const std::filesystem::path &)>;

int run_stage(const CommandContext &ctx, const std::string &name, Log &log, const StageBody &body) {
  std::optional<PipelineConfig> config;
  try {
    config = load_config(ctx.config_path, ctx.overrides);
  } catch (const Error &e) {
    log.error(e.what());
    return kExitUsage;
  }
  const std::filesystem::path out = ctx.out_dir ? *ctx.out_dir : config->out_dir;
  try {
    std::filesystem::create_directories(out);
  } catch (const std::filesystem::filesystem_error &e) {
    log.error(fmt::format("cannot create output directory {}: {}", out.string(), e.what()));
    return kExitUsage;
  }

  Manifest manifest(out, *config);
  StageRecord rec{name, "ok", 0.0, ""};
  int code = kExitOk;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(*config, out);
  } catch (const GateFailure &e) {
    rec.status = "failed";
    rec.message = e.what();
    log.error(e.what());
    code = kExitGateFailed;
  } catch (const InvalidInput &e) {
    rec.status = "error";
    rec.message = e.what();
    log.error(e.what());
    code = kExitUsage;
  } catch (const InvalidSpec &e) {
    rec.status = "error";
    rec.message = e.what();
    log.error(e.what());
    code = kExitUsage;
  } catch (const std::exception &e) {
    rec.status = "error";
    rec.message = e.what();
    log.error(e.what());
    code = kExitRuntime;
  }
  rec.seconds = seconds_since(t0);
  manifest.record(rec);
  try {
    manifest.write();
  } catch (const std::exception &e) {
    log.error(e.what());
    return kExitRuntime;
  }
  log.info(fmt::format("{}: {} in {:.2f} s -> {}", name, rec.status, rec.seconds, out.string()));
  return code;
}

} // namespace

BuildOutcome run_build(const PipelineConfig &config, const std::filesystem::path &out_dir, Log &log) {
  const ComposedFlow flow(config.flow);
  const GridSpec dump = config.spectral_grid().grid_spec();
  log.info(fmt::format("build: sampling fields on {}x{} grid", dump.nx, dump.ny));
  for (Quantity q : {Quantity::phi, Quantity::velocity_x, Quantity::velocity_y, Quantity::vorticity}) {
    const Grid2D g = sample_grid(flow, dump, q);
    write_grid(out_dir / (g.name + ".grid"), g);
  }
  Json spec = describe_flow(config);
  write_json(out_dir / "flow_spec.json", spec);

  BuildOutcome b;
  const GridSpec res_grid = GridSpec::square(config.build.residual_n, config.half_width);
  log.info(fmt::format("build: residual on {}x{} grid", res_grid.nx, res_grid.ny));
  b.residual = residual_rotating(flow, res_grid);
  const double r_ext = 2.0 * config.flow.glue_radius;
  for (std::size_t j = 0; j < res_grid.ny; ++j)
    for (std::size_t i = 0; i < res_grid.nx; ++i) {
      const Vec2 x = res_grid.point(i, j);
      if (norm(x) < r_ext) continue;
      ++b.exterior_samples;
      const FieldSample s = flow.sample(x);
      if (s.velocity.x != 0.0 || s.velocity.y != 0.0 || s.vorticity != 0.0) ++b.exterior_nonzero;
    }
  b.passed = b.residual.normalized_max <= config.build.residual_tol && b.exterior_nonzero == 0;
  write_json(out_dir / "residual.json", residual_json(b, config));
  log.info(fmt::format("build: normalized residual {:.3e}, exterior nonzero {}",
                       b.residual.normalized_max, b.exterior_nonzero));
  return b;
}

SimulateOutcome run_simulate(const PipelineConfig &config, const std::filesystem::path &out_dir,
                             Log &log) {
  const ComposedFlow flow(config.flow);
  const SpectralGrid grid = config.spectral_grid();
  SimulateOutcome o;
  o.horizon = config.horizon();

  RunOptions opts;
  const std::size_t every = config.simulate.snapshot_every;
  if (every > 0) {
    std::filesystem::create_directories(out_dir / "snapshots");
    opts.on_diagnostic = [&](const VorticityState &s, std::size_t step) {
      if (step % every != 0) return;
      Grid2D g{grid.grid_spec(), "omega", s.omega};
      write_grid(out_dir / "snapshots" / fmt::format("omega_{:08d}.grid", step), g);
    };
  }
  log.info(fmt::format("simulate: N = {}, horizon {:.6g}", grid.n, o.horizon));
  o.run = run(flow, grid, config.simulate.solver, o.horizon, opts);

  auto csv = open_out(out_dir / "diagnostics.csv");
  csv << "t,energy,enstrophy,min_w,max_w,e_rot";
  for (std::size_t k = 0; k < config.flow.bumps.size(); ++k) csv << ",angle_" << k;
  csv << '\n';
  for (const DiagnosticsRow &r : o.run.series) {
    csv << num(r.t) << ',' << num(r.energy) << ',' << num(r.enstrophy) << ',' << num(r.min_w)
        << ',' << num(r.max_w) << ',' << num(r.e_rot);
    for (double a : r.bump_angles) csv << ',' << num(a);
    csv << '\n';
  }
  csv.close();

  o.passed = o.run.final_error() <= config.simulate.e_tol;
  write_json(out_dir / "simulate.json", {{"grid_n", grid.n},
                                         {"half_width", grid.half_width},
                                         {"horizon", o.horizon},
                                         {"dt", o.run.dt},
                                         {"steps", o.run.steps},
                                         {"e_final", o.run.final_error()},
                                         {"e_max", o.run.max_error()},
                                         {"energy_drift", o.run.energy_drift()},
                                         {"enstrophy_drift", o.run.enstrophy_drift()},
                                         {"e_tol", config.simulate.e_tol},
                                         {"passed", o.passed}});
  log.info(fmt::format("simulate: {} steps, e(T) = {:.3e}", o.run.steps, o.run.final_error()));
  return o;
}

AnalyzeOutcome run_analyze(const PipelineConfig &config, const std::filesystem::path &out_dir,
                           Log &log) {
  const ComposedFlow flow(config.flow);
  const AnalysisSettings &a = config.analysis;
  AnalyzeOutcome o;

  log.info("analyze: symmetry set");
  o.symmetry = estimate_symmetry_set(flow, a.symmetry);
  {
    auto csv = open_out(out_dir / "symmetry_set.csv");
    csv << "radius,sigma,member\n";
    for (const CircleSample &c : o.symmetry.samples)
      csv << num(c.r) << ',' << num(c.sigma) << ',' << (c.member ? 1 : 0) << '\n';
  }
  o.boundary = boundary_gradient_check(flow, o.symmetry, a.boundary_tol);
  {
    auto csv = open_out(out_dir / "boundary_gradient.csv");
    csv << "radius,sampled_radius,non_isolated,max_grad,relative,violation\n";
    for (std::size_t i = 0; i < o.boundary.radii.size(); ++i) {
      const BoundaryGradient &g = o.boundary.radii[i];
      csv << num(g.r) << ',' << num(o.symmetry.boundary[i].sampled_r) << ','
          << (g.non_isolated ? 1 : 0) << ',' << num(g.max_grad) << ',' << num(g.relative) << ','
          << (g.violation ? 1 : 0) << '\n';
    }
  }

  log.info("analyze: functional relation");
  for (const Bump &b : config.flow.bumps) {
    const Region region{b.center, 0.0, b.profile.support_radius()};
    o.annuli.emplace_back(region, functional_relation_test(flow, region, a.relation));
  }
  std::string global_note;
  try {
    o.global = functional_relation_test(flow, Region{{0.0, 0.0}, 0.0, config.flow.glue_radius},
                                        a.relation);
  } catch (const InvalidInput &e) {
    global_note = e.what();
  }
  {
    auto csv = open_out(out_dir / "functional_relation.csv");
    csv << "region,center_x,center_y,r_inner,r_outer,width,lap_range,relative_width,verdict\n";
    auto row = [&](const std::string &name, const Region &r, const FunctionalRelationReport &f) {
      csv << name << ',' << num(r.center.x) << ',' << num(r.center.y) << ',' << num(r.r_inner)
          << ',' << num(r.r_outer) << ',' << num(f.width) << ',' << num(f.lap_range) << ','
          << num(f.relative_width) << ',' << f.verdict() << '\n';
    };
    for (std::size_t k = 0; k < o.annuli.size(); ++k)
      row(fmt::format("bump_{}", k), o.annuli[k].first, o.annuli[k].second);
    if (o.global) row("global", Region{{0.0, 0.0}, 0.0, config.flow.glue_radius}, *o.global);
  }
  if (o.global) {
    auto csv = open_out(out_dir / "scatter.csv");
    csv << "phi,lap_phi\n";
    for (const ScatterPoint &p : o.global->scatter) csv << num(p.phi) << ',' << num(p.lap_phi) << '\n';
  }

  log.info("analyze: radiality and vorticity bounds");
  LocalRadialityOptions ro;
  ro.tolerance = a.radiality_tol;
  o.radiality = check_locally_radial(config.flow, ro);
  o.bounds = omega_bounds_check(flow, config.flow.glue_radius,
                                GridSpec::square(a.bounds_n, config.half_width));
  o.passed = !o.boundary.any_violation;

  Json j;
  j["symmetry_set"] = Json::array();
  for (const RadiusInterval &iv : o.symmetry.intervals) j["symmetry_set"].push_back({iv.lo, iv.hi});
  j["boundary_violation"] = o.boundary.any_violation;
  j["boundary_tolerance"] = o.boundary.tolerance;
  j["radiality"] = {{"verdict", to_string(o.radiality.verdict)}, {"summary", o.radiality.summary}};
  j["omega_bounds"] = {{"omega", o.bounds.omega},         {"inf_inner", o.bounds.inf_inner},
                       {"sup_inner", o.bounds.sup_inner}, {"inf_all", o.bounds.inf_all},
                       {"sup_all", o.bounds.sup_all},     {"stationary", o.bounds.stationary},
                       {"strict_inclusion", o.bounds.strict_inclusion},
                       {"chain_holds", o.bounds.chain_holds}};
  j["functional_relation"] = Json::array();
  for (std::size_t k = 0; k < o.annuli.size(); ++k)
    j["functional_relation"].push_back({{"region", fmt::format("bump_{}", k)},
                                        {"width", o.annuli[k].second.width},
                                        {"relative_width", o.annuli[k].second.relative_width},
                                        {"verdict", o.annuli[k].second.verdict()}});
  if (o.global)
    j["functional_relation"].push_back({{"region", "global"},
                                        {"width", o.global->width},
                                        {"relative_width", o.global->relative_width},
                                        {"verdict", o.global->verdict()}});
  else
    j["functional_relation_note"] = global_note;
  j["passed"] = o.passed;
  write_json(out_dir / "analysis.json", j);

  auto txt = open_out(out_dir / "analysis.txt");
  txt << "radiality: " << to_string(o.radiality.verdict) << '\n';
  txt << "symmetry set intervals:";
  for (const RadiusInterval &iv : o.symmetry.intervals)
    txt << fmt::format(" [{:.6g}, {:.6g}]", iv.lo, iv.hi);
  txt << '\n';
  for (const BoundaryGradient &g : o.boundary.radii)
    txt << fmt::format("boundary r = {:.12g} ({}): max|grad phi| relative {:.3e}{}\n", g.r,
                       g.non_isolated ? "non-isolated" : "isolated", g.relative,
                       g.violation ? "  VIOLATION" : "");
  for (std::size_t k = 0; k < o.annuli.size(); ++k)
    txt << fmt::format("bump {}: W = {:.3e} ({:.3e} of range), {}\n", k, o.annuli[k].second.width,
                       o.annuli[k].second.relative_width, o.annuli[k].second.verdict());
  if (o.global)
    txt << fmt::format("global: W = {:.3e} ({:.3e} of range), {}\n", o.global->width,
                       o.global->relative_width, o.global->verdict());
  else
    txt << "global: " << global_note << '\n';
  txt << fmt::format("omega bounds: inf/2 = {:.6g}, Omega = {:.6g}, sup/2 = {:.6g}, strict = {}\n",
                     0.5 * o.bounds.inf_inner, o.bounds.omega, 0.5 * o.bounds.sup_inner,
                     o.bounds.strict_inclusion ? "yes" : "no");
  log.info(fmt::format("analyze: {}", to_string(o.radiality.verdict)));
  return o;
}

namespace {

std::string gate_message(const BuildOutcome &b, const PipelineConfig &c) {
  if (b.exterior_nonzero > 0)
    return fmt::format("tolerance not met: {} samples with |x| >= 2R carry nonzero velocity or "
                       "vorticity",
                       b.exterior_nonzero);
  if (!b.passed)
    return fmt::format("tolerance not met: normalized residual {:.3e} > {:.3e}",
                       b.residual.normalized_max, c.build.residual_tol);
  return {};
}

std::string gate_message(const SimulateOutcome &s, const PipelineConfig &c) {
  if (!s.passed)
    return fmt::format("tolerance not met: e(T) = {:.3e} > {:.3e}", s.run.final_error(),
                       c.simulate.e_tol);
  return {};
}

} // namespace

int cmd_build(const CommandContext &ctx, Log &log) {
  return run_stage(ctx, "build", log, [&](const PipelineConfig &c, const std::filesystem::path &out) {
    if (const std::string m = gate_message(run_build(c, out, log), c); !m.empty())
      throw GateFailure(m);
  });
}

int cmd_simulate(const CommandContext &ctx, Log &log) {
  return run_stage(ctx, "simulate", log, [&](const PipelineConfig &c, const std::filesystem::path &out) {
    if (const std::string m = gate_message(run_simulate(c, out, log), c); !m.empty())
      throw GateFailure(m);
  });
}

int cmd_analyze(const CommandContext &ctx, Log &log) {
  return run_stage(ctx, "analyze", log, [&](const PipelineConfig &c, const std::filesystem::path &out) {
    const AnalyzeOutcome a = run_analyze(c, out, log);
    if (!a.passed)
      throw GateFailure("tolerance not met: nonzero gradient on a non-isolated boundary circle");
  });
}

std::size_t sweep_workers(std::size_t cells) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv(kMaxWorkersEnv)) {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw InvalidInput(fmt::format("{} must be a positive integer, got '{}'", kMaxWorkersEnv, env));
    n = std::min(n, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(1, std::min(n, cells));
}

namespace {

struct SweepAxis {
  std::string key;
  std::vector<Json> values;
};

std::vector<Json> parse_values(const std::string &list) {
  std::vector<Json> values;
  std::size_t start = 0;
  while (start < list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string::npos) comma = list.size();
    const std::string item = list.substr(start, comma - start);
    if (!item.empty()) {
      try {
        values.push_back(Json::parse(item));
      } catch (const nlohmann::json::parse_error &) {
        values.emplace_back(item);
      }
    }
    start = comma + 1;
  }
  return values;
}

struct CellResult {
  std::string status = "ok";
  std::string message;
  std::optional<BuildOutcome> build;
  std::optional<SimulateOutcome> simulate;
};

std::string opt_num(bool has, double v) { return has ? num(v) : std::string(); }

} // namespace

int cmd_sweep(const CommandContext &ctx, const std::vector<std::string> &params, Log &log) {
  std::optional<PipelineConfig> base;
  std::vector<SweepAxis> axes;
  bool do_build = false;
  bool do_simulate = false;
  try {
    base = load_config(ctx.config_path, ctx.overrides);
    for (auto it = base->effective["sweep"]["params"].begin();
         it != base->effective["sweep"]["params"].end(); ++it) {
      if (!it->is_array()) throw InvalidInput(fmt::format("sweep.params.{} must be an array", it.key()));
      axes.push_back({it.key(), std::vector<Json>(it->begin(), it->end())});
    }
    for (const std::string &p : params) {
      const std::size_t eq = p.find('=');
      if (eq == std::string::npos || eq == 0)
        throw InvalidInput(fmt::format("sweep parameter '{}' is not of the form key=v1,v2", p));
      SweepAxis axis{p.substr(0, eq), parse_values(p.substr(eq + 1))};
      std::erase_if(axes, [&](const SweepAxis &a) { return a.key == axis.key; });
      axes.push_back(std::move(axis));
    }
    for (const Json &s : base->effective["sweep"]["stages"]) {
      const std::string stage = s.is_string() ? s.get<std::string>() : "";
      if (stage == "build")
        do_build = true;
      else if (stage == "simulate")
        do_simulate = true;
      else
        throw InvalidInput(fmt::format("sweep.stages entry {} is not build or simulate", s.dump()));
    }
  } catch (const Error &e) {
    log.error(e.what());
    return kExitUsage;
  }

  const auto sweep_t0 = std::chrono::steady_clock::now();
  std::size_t cells = axes.empty() ? 0 : 1;
  for (const SweepAxis &a : axes) cells *= a.values.size();
  const std::filesystem::path out = ctx.out_dir ? *ctx.out_dir : base->out_dir;
  std::filesystem::create_directories(out);

  auto cell_overrides = [&](std::size_t cell) {
    std::vector<std::string> ov;
    std::size_t rest = cell;
    for (std::size_t k = axes.size(); k-- > 0;) {
      const auto &vals = axes[k].values;
      ov.push_back(axes[k].key + "=" + vals[rest % vals.size()].dump());
      rest /= vals.size();
    }
    std::reverse(ov.begin(), ov.end());
    return ov;
  };

  std::size_t workers = 1;
  try {
    workers = sweep_workers(cells);
  } catch (const Error &e) {
    log.error(e.what());
    return kExitUsage;
  }
  log.info(fmt::format("sweep: {} cells on {} workers", cells, workers));

  std::vector<CellResult> results(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t cell = next++; cell < cells; cell = next++) {
      CellResult &r = results[cell];
      const auto cell_dir = out / fmt::format("cell_{:03d}", cell);
      try {
        Json eff = base->effective;
        for (const auto &o : cell_overrides(cell)) apply_override(eff, o);
        const PipelineConfig c = make_config(eff, base->base_dir);
        std::filesystem::create_directories(cell_dir);
        Manifest manifest(cell_dir, c);
        if (do_build) {
          const auto t0 = std::chrono::steady_clock::now();
          r.build = run_build(c, cell_dir, log);
          const std::string m = gate_message(*r.build, c);
          manifest.record({"build", m.empty() ? "ok" : "failed", seconds_since(t0), m});
          if (!m.empty()) {
            r.status = "failed";
            r.message = m;
          }
        }
        if (do_simulate) {
          const auto t0 = std::chrono::steady_clock::now();
          r.simulate = run_simulate(c, cell_dir, log);
          const std::string m = gate_message(*r.simulate, c);
          manifest.record({"simulate", m.empty() ? "ok" : "failed", seconds_since(t0), m});
          if (!m.empty()) {
            r.status = "failed";
            if (r.message.empty()) r.message = m;
          }
        }
        manifest.write();
      } catch (const std::exception &e) {
        r.status = "error";
        r.message = e.what();
        log.error(fmt::format("sweep cell {}: {}", cell, e.what()));
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();

  bool all_ok = true;
  {
    auto csv = open_out(out / "sweep.csv");
    csv << "cell";
    for (const SweepAxis &a : axes) csv << ',' << a.key;
    csv << ",status,residual,exterior_nonzero,e_final,e_max,energy_drift,enstrophy_drift,message\n";
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const CellResult &r = results[cell];
      all_ok = all_ok && r.status == "ok";
      csv << cell;
      std::size_t rest = cell;
      std::vector<std::string> vals(axes.size());
      for (std::size_t k = axes.size(); k-- > 0;) {
        const auto &v = axes[k].values;
        const Json &x = v[rest % v.size()];
        vals[k] = x.is_string() ? x.get<std::string>() : x.dump();
        rest /= v.size();
      }
      for (const auto &v : vals) csv << ',' << v;
      std::string msg = r.message;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      csv << ',' << r.status << ',' << opt_num(r.build.has_value(), r.build ? r.build->residual.normalized_max : 0.0)
          << ',' << (r.build ? std::to_string(r.build->exterior_nonzero) : std::string()) << ','
          << opt_num(r.simulate.has_value(), r.simulate ? r.simulate->run.final_error() : 0.0) << ','
          << opt_num(r.simulate.has_value(), r.simulate ? r.simulate->run.max_error() : 0.0) << ','
          << opt_num(r.simulate.has_value(), r.simulate ? r.simulate->run.energy_drift() : 0.0) << ','
          << opt_num(r.simulate.has_value(), r.simulate ? r.simulate->run.enstrophy_drift() : 0.0)
          << ',' << msg << '\n';
    }
  }
  Manifest manifest(out, *base);
  manifest.record({"sweep", all_ok ? "ok" : "failed", seconds_since(sweep_t0),
                   all_ok ? "" : "some cells failed; see sweep.csv"});
  manifest.write();
  log.info(fmt::format("sweep: {} -> {}", all_ok ? "all cells ok" : "some cells failed",
                       (out / "sweep.csv").string()));
  return all_ok ? kExitOk : kExitGateFailed;
}

} // namespace rotflow::pipeline
