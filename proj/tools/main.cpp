#include <cmath>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rotflow/error.hpp"
#include "rotflow/grid_io.hpp"
#include "rotflow/pipeline/commands.hpp"
#include "rotflow/radial_profile.hpp"
#include "rotflow/version.hpp"

namespace {

using namespace rotflow;
using namespace rotflow::pipeline;

struct ShearedOptions {
  std::string out;
  std::size_t n = 257;
  double half_width = 2.0;
  double shear = 0.5;
  double amplitude = 1.0;
  double radius = 1.2;
  int smoothness = 10;
};

// phi(x) = beta(|S x|) with S = [[1, shear], [0, 1]]: a bump stretched along a diagonal.
int write_sheared(const ShearedOptions &o) {
  const RadialProfile beta = RadialProfile::bump(o.amplitude, o.radius, o.smoothness);
  Grid2D g;
  g.spec = GridSpec::square(o.n, o.half_width);
  g.name = "phi";
  g.values.resize(g.spec.size());
  for (std::size_t j = 0; j < g.spec.ny; ++j)
    for (std::size_t i = 0; i < g.spec.nx; ++i) {
      const Vec2 x = g.spec.point(i, j);
      const double r = std::hypot(x.x + o.shear * x.y, x.y);
      g.values[g.spec.index(i, j)] = r < o.radius ? beta.eval(r).beta : 0.0;
    }
  write_grid(o.out, g);
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"rotflow: compactly supported uniformly rotating Euler flows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommandContext ctx;
  std::string config;
  std::string out;
  std::vector<std::string> params;

  auto common = [&](CLI::App *sub) {
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output.dir)");
    sub->add_option("--override", ctx.overrides, "dot-path assignment key=value (repeatable)")
        ->take_all();
    sub->add_flag("--quiet", ctx.quiet, "suppress progress messages");
  };
  auto *build = app.add_subcommand("build", "construct the flow, write field grids and residual");
  auto *simulate = app.add_subcommand("simulate", "run the spectral solver and check rigid rotation");
  auto *analyze = app.add_subcommand("analyze", "symmetry set, boundary gradients, functional relation");
  auto *sweep = app.add_subcommand("sweep", "run a cartesian parameter sweep concurrently");
  for (auto *s : {build, simulate, analyze, sweep}) common(s);
  sweep->add_option("--param", params, "key=v1,v2,... (repeatable)")->take_all();

  ShearedOptions sheared;
  auto *fixture = app.add_subcommand("make-sheared", "write a sheared-bump phi grid for import");
  fixture->add_option("--out", sheared.out, "output grid file")->required();
  fixture->add_option("--n", sheared.n, "nodes per axis");
  fixture->add_option("--half-width", sheared.half_width, "grid half-width");
  fixture->add_option("--shear", sheared.shear, "shear factor");
  fixture->add_option("--amplitude", sheared.amplitude, "bump amplitude");
  fixture->add_option("--radius", sheared.radius, "bump radius before shearing");
  fixture->add_option("--smoothness", sheared.smoothness, "bump exponent p");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  ctx.config_path = config;
  if (!out.empty()) ctx.out_dir = out;
  Log log(ctx.quiet);
  try {
    if (*build) return cmd_build(ctx, log);
    if (*simulate) return cmd_simulate(ctx, log);
    if (*analyze) return cmd_analyze(ctx, log);
    if (*sweep) return cmd_sweep(ctx, params, log);
    if (*fixture) return write_sheared(sheared);
  } catch (const InvalidInput &e) {
    log.error(e.what());
    return kExitUsage;
  } catch (const std::exception &e) {
    log.error(e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
