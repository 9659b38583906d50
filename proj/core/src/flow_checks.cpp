#include "rotflow/flow_checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "rotflow/error.hpp"

namespace rotflow {

ResidualReport residual_rotating(const Field &field, const GridSpec &grid) {
  if (grid.size() == 0) throw InvalidInput("residual_rotating: empty grid");
  ResidualReport rep;
  rep.residual.spec = grid;
  rep.residual.name = "residual";
  rep.residual.values.resize(grid.size());
  double sum2 = 0.0;
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const FieldSample s = field.sample(grid.point(i, j));
      const double res = dot(perp(s.grad), s.grad_laplacian);
      rep.residual.values[grid.index(i, j)] = res;
      rep.max_abs = std::max(rep.max_abs, std::fabs(res));
      sum2 += res * res;
      rep.max_grad = std::max(rep.max_grad, norm(s.grad));
      rep.max_grad_lap = std::max(rep.max_grad_lap, norm(s.grad_laplacian));
    }
  rep.rms = std::sqrt(sum2 / static_cast<double>(grid.size()));

  const double half_x = 0.5 * (grid.x_max() - grid.x0);
  const double half_y = 0.5 * (grid.y_max() - grid.y0);
  const double ell2 = std::max(half_x * half_x + half_y * half_y, 1e-300);
  const bool lap_is_zero = rep.max_grad_lap <= 1e-8 * rep.max_grad / ell2;
  const double denom = rep.max_grad * rep.max_grad_lap;
  if (denom > 0.0 && !lap_is_zero) {
    rep.normalized_max = rep.max_abs / denom;
    rep.normalized_rms = rep.rms / denom;
  }
  return rep;
}

std::string to_string(RadialityVerdict v) {
  switch (v) {
  case RadialityVerdict::radial:
    return "radial";
  case RadialityVerdict::locally_radial:
    return "locally radial, not radial";
  case RadialityVerdict::not_locally_radial:
    return "not locally radial (numerically)";
  }
  return "unknown";
}

namespace {

// Max over sampled circles of (max phi - min phi) on the circle.
double angular_variation(const Field &field, Vec2 center, double r_in, double r_out,
                         const LocalRadialityOptions &opts, double &global_min,
                         double &global_max) {
  double worst = 0.0;
  for (std::size_t ir = 0; ir < opts.n_radii; ++ir) {
    const double r =
        r_in + (r_out - r_in) * (static_cast<double>(ir) + 0.5) / static_cast<double>(opts.n_radii);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t ia = 0; ia < opts.n_angles; ++ia) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(ia) /
                        static_cast<double>(opts.n_angles);
      const double phi = field.sample(center + Vec2{r * std::cos(th), r * std::sin(th)}).phi;
      lo = std::min(lo, phi);
      hi = std::max(hi, phi);
    }
    global_min = std::min(global_min, lo);
    global_max = std::max(global_max, hi);
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

bool is_origin(Vec2 c) { return c.x == 0.0 && c.y == 0.0; }

} // namespace

LocalRadialityReport check_locally_radial(const FlowSpec &spec, const LocalRadialityOptions &opts) {
  spec.validate();
  const ComposedFlow flow(spec);
  const double big_r = spec.glue_radius;
  const double inf = std::numeric_limits<double>::infinity();
  // Where unbounded annuli are probed.
  const double probe_outer = 2.5 * big_r;

  LocalRadialityReport rep;
  std::vector<double> raw;
  double gmin = inf;
  double gmax = -inf;

  bool all_centered = true;
  for (std::size_t k = 0; k < spec.bumps.size(); ++k) {
    const Bump &b = spec.bumps[k];
    AnnulusReport a{b.center, 0.0, b.profile.support_radius(), fmt::format("bump {}", k)};
    raw.push_back(angular_variation(flow, a.center, a.r_inner, a.r_outer, opts, gmin, gmax));
    all_centered = all_centered && is_origin(b.center);
    rep.annuli.push_back(a);
  }
  if (spec.omega != 0.0) {
    AnnulusReport a{{0.0, 0.0}, big_r, inf, "exterior"};
    raw.push_back(angular_variation(flow, a.center, big_r, probe_outer, opts, gmin, gmax));
    rep.annuli.push_back(a);
  }

  // Candidate centers for an imported inner field: origin, grid centre, extremum.
  std::size_t imported_first = rep.annuli.size();
  if (spec.imported) {
    const Grid2D &g = spec.imported->grid();
    std::size_t arg = 0;
    for (std::size_t n = 1; n < g.values.size(); ++n)
      if (std::fabs(g.values[n]) > std::fabs(g.values[arg])) arg = n;
    const Vec2 extremum = g.spec.point(arg % g.spec.nx, arg / g.spec.nx);
    const Vec2 middle{0.5 * (g.spec.x0 + g.spec.x_max()), 0.5 * (g.spec.y0 + g.spec.y_max())};
    for (const Vec2 c : {Vec2{0.0, 0.0}, middle, extremum}) {
      double reach = 0.0;
      for (std::size_t j = 0; j < g.spec.ny; ++j)
        for (std::size_t i = 0; i < g.spec.nx; ++i)
          if (g.at(i, j) != 0.0) reach = std::max(reach, norm(g.spec.point(i, j) - c));
      AnnulusReport a{c, 0.0, reach, "imported candidate"};
      raw.push_back(angular_variation(flow, c, 0.0, reach, opts, gmin, gmax));
      rep.annuli.push_back(a);
    }
  }

  const double osc = gmax > gmin ? gmax - gmin : 0.0;
  for (std::size_t n = 0; n < rep.annuli.size(); ++n) {
    rep.annuli[n].angular_variation = osc > 0.0 ? raw[n] / osc : 0.0;
    rep.annuli[n].radial = rep.annuli[n].angular_variation <= opts.tolerance;
  }

  bool imported_ok = true;
  if (spec.imported) {
    imported_ok = false;
    for (std::size_t n = imported_first; n < rep.annuli.size(); ++n)
      imported_ok = imported_ok || rep.annuli[n].radial;
    // Keep only the candidates that verified.
    std::vector<AnnulusReport> kept(rep.annuli.begin(), rep.annuli.begin() + imported_first);
    for (std::size_t n = imported_first; n < rep.annuli.size(); ++n)
      if (rep.annuli[n].radial || !imported_ok) kept.push_back(rep.annuli[n]);
    rep.annuli = std::move(kept);
  }

  bool fixed_ok = true;
  for (std::size_t n = 0; n < imported_first && n < rep.annuli.size(); ++n)
    fixed_ok = fixed_ok && rep.annuli[n].radial;

  if (!imported_ok || !fixed_ok) {
    rep.verdict = RadialityVerdict::not_locally_radial;
  } else if (all_centered && !spec.imported) {
    // One annulus about the origin covers the plane; verify it directly.
    AnnulusReport whole{{0.0, 0.0}, 0.0, inf, "whole plane"};
    double lo = inf;
    double hi = -inf;
    const double v = angular_variation(flow, whole.center, 0.0, probe_outer, opts, lo, hi);
    const double o = hi > lo ? hi - lo : 0.0;
    whole.angular_variation = o > 0.0 ? v / o : 0.0;
    whole.radial = whole.angular_variation <= opts.tolerance;
    rep.annuli = {whole};
    rep.verdict = whole.radial ? RadialityVerdict::radial : RadialityVerdict::not_locally_radial;
  } else {
    rep.verdict = RadialityVerdict::locally_radial;
  }

  std::size_t n_radial = 0;
  for (const auto &a : rep.annuli) n_radial += a.radial ? 1 : 0;
  rep.summary = fmt::format("{} ({} of {} annuli verified radial; gaps assigned to the critical set)",
                            to_string(rep.verdict), n_radial, rep.annuli.size());
  return rep;
}

OmegaBoundsReport omega_bounds_check(const Field &field, double glue_radius,
                                     const GridSpec &grid) {
  if (grid.size() == 0) throw InvalidInput("omega_bounds_check: empty grid");
  OmegaBoundsReport rep;
  rep.omega = field.angular_velocity();
  const double inf = std::numeric_limits<double>::infinity();
  rep.inf_all = rep.inf_inner = inf;
  rep.sup_all = rep.sup_inner = -inf;
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const Vec2 x = grid.point(i, j);
      const double w = field.sample(x).vorticity;
      rep.inf_all = std::min(rep.inf_all, w);
      rep.sup_all = std::max(rep.sup_all, w);
      if (norm(x) < glue_radius) {
        rep.inf_inner = std::min(rep.inf_inner, w);
        rep.sup_inner = std::max(rep.sup_inner, w);
      }
    }
  rep.stationary = rep.omega == 0.0;
  rep.strict_inclusion = 0.5 * rep.inf_inner < rep.omega && rep.omega < 0.5 * rep.sup_inner;
  rep.chain_holds = rep.strict_inclusion && rep.inf_all <= 0.5 * rep.inf_inner &&
                    0.5 * rep.sup_inner <= rep.sup_all;
  return rep;
}

Grid2D sample_grid(const Field &field, const GridSpec &grid, Quantity q) {
  Grid2D g;
  g.spec = grid;
  switch (q) {
  case Quantity::phi:
    g.name = "phi";
    break;
  case Quantity::velocity_x:
    g.name = "v0_x";
    break;
  case Quantity::velocity_y:
    g.name = "v0_y";
    break;
  case Quantity::vorticity:
    g.name = "omega0";
    break;
  }
  g.values.resize(grid.size());
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const FieldSample s = field.sample(grid.point(i, j));
      double v = 0.0;
      switch (q) {
      case Quantity::phi:
        v = s.phi;
        break;
      case Quantity::velocity_x:
        v = s.velocity.x;
        break;
      case Quantity::velocity_y:
        v = s.velocity.y;
        break;
      case Quantity::vorticity:
        v = s.vorticity;
        break;
      }
      g.values[grid.index(i, j)] = v;
    }
  return g;
}

} // namespace rotflow
