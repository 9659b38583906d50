#include "rotflow/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "rotflow/error.hpp"
#include "rotflow/interpolation.hpp"

namespace rotflow {

namespace {

constexpr std::size_t kReferenceAngles = 64;

Vec2 on_circle(Vec2 center, double r, std::size_t k, std::size_t n) {
  const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  return center + Vec2{r * std::cos(th), r * std::sin(th)};
}

struct MinMax {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
};

MinMax circle_range(const Field &field, double r, std::size_t n) {
  MinMax m;
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = field.sample(on_circle({}, r, k, n)).phi;
    m.lo = std::min(m.lo, phi);
    m.hi = std::max(m.hi, phi);
  }
  return m;
}

} // namespace

bool SymmetrySetEstimate::contains(double r) const {
  return std::any_of(intervals.begin(), intervals.end(),
                     [r](const RadiusInterval &iv) { return iv.lo <= r && r <= iv.hi; });
}

SymmetrySetEstimate estimate_symmetry_set(const Field &field, const SymmetrySetOptions &opts) {
  if (!(opts.dr > 0.0) || !(opts.r_max > 0.0))
    throw InvalidInput("symmetry set: dr and r_max must be positive");
  if (opts.r_max > field.extent())
    throw InvalidInput(fmt::format("symmetry set: r_max = {:.6g} exceeds the field extent {:.6g}",
                                   opts.r_max, field.extent()));
  if (opts.n_angles < kReferenceAngles)
    throw InvalidInput("symmetry set: at least 64 angles per circle are required");

  SymmetrySetEstimate est;
  est.options = opts;
  const auto n_r = static_cast<std::size_t>(std::floor(opts.r_max / opts.dr * (1.0 + 1e-12))) + 1;

  MinMax global;
  std::vector<double> raw(n_r, 0.0);
  for (std::size_t i = 0; i < n_r; ++i) {
    const double r = static_cast<double>(i) * opts.dr;
    const MinMax ref = circle_range(field, r, kReferenceAngles);
    global.lo = std::min(global.lo, ref.lo);
    global.hi = std::max(global.hi, ref.hi);
    if (i == 0) continue; // a circle of radius 0 is a point
    const MinMax m = circle_range(field, r, opts.n_angles);
    raw[i] = m.hi - m.lo;
  }
  est.oscillation = global.hi > global.lo ? global.hi - global.lo : 0.0;
  const double osc = est.oscillation;
  auto sigma_at = [&](double r) {
    if (r == 0.0 || osc == 0.0) return 0.0;
    const MinMax m = circle_range(field, r, opts.n_angles);
    return (m.hi - m.lo) / osc;
  };

  est.samples.resize(n_r);
  for (std::size_t i = 0; i < n_r; ++i) {
    const double s = osc > 0.0 ? raw[i] / osc : 0.0;
    est.samples[i] = {static_cast<double>(i) * opts.dr, s, s <= opts.tau};
  }

  // Move a sampled endpoint to where sigma reaches the roundoff floor.
  // `inward` is +1 for a lower end (interval extends to larger r), -1 otherwise.
  // The floor is raised to twice the median sigma of the run, so interpolation
  // noise of gridded fields does not push the endpoint through the interval.
  auto refine = [&](double r_member, double r_outside, double r_far_end, double inward,
                    double floor) {
    double pass = r_member;
    double fail = r_outside;
    while (sigma_at(pass) > floor) {
      fail = pass;
      pass += inward * opts.dr;
      if (inward * (pass - r_far_end) > 1e-12 * opts.dr) return r_member;
    }
    for (std::size_t it = 0; it < opts.refine_iterations; ++it) {
      const double mid = 0.5 * (pass + fail);
      if (mid == pass || mid == fail) break;
      (sigma_at(mid) <= floor ? pass : fail) = mid;
    }
    return pass;
  };

  const std::size_t last = n_r - 1;
  std::size_t i = 0;
  while (i < n_r) {
    if (!est.samples[i].member) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n_r && est.samples[j + 1].member) ++j;
    const bool non_isolated = j > i;
    std::vector<double> run;
    for (std::size_t k = i; k <= j; ++k)
      if (est.samples[k].r > 0.0) run.push_back(est.samples[k].sigma);
    double floor = opts.refine_floor;
    if (!run.empty()) {
      std::nth_element(run.begin(), run.begin() + run.size() / 2, run.end());
      floor = std::max(floor, 2.0 * run[run.size() / 2]);
    }
    RadiusInterval iv{est.samples[i].r, est.samples[j].r};
    if (i > 0) {
      BoundaryRadius b{iv.lo, iv.lo, non_isolated};
      if (non_isolated) b.r = refine(iv.lo, est.samples[i - 1].r, iv.hi, +1.0, floor);
      iv.lo = b.r;
      est.boundary.push_back(b);
    }
    if (j < last && est.samples[j].r > 0.0) {
      BoundaryRadius b{iv.hi, iv.hi, non_isolated};
      if (non_isolated) b.r = refine(iv.hi, est.samples[j + 1].r, iv.lo, -1.0, floor);
      iv.hi = b.r;
      est.boundary.push_back(b);
    }
    est.intervals.push_back(iv);
    i = j + 1;
  }
  std::sort(est.boundary.begin(), est.boundary.end(),
            [](const BoundaryRadius &a, const BoundaryRadius &b) { return a.r < b.r; });
  return est;
}

BoundaryGradientReport boundary_gradient_check(const Field &field,
                                               const SymmetrySetEstimate &estimate,
                                               double tolerance) {
  BoundaryGradientReport rep;
  rep.tolerance = tolerance;
  const std::size_t n = estimate.options.n_angles;
  for (const CircleSample &c : estimate.samples)
    for (std::size_t k = 0; k < n; ++k)
      rep.field_scale = std::max(rep.field_scale, norm(field.sample(on_circle({}, c.r, k, n)).grad));

  for (const BoundaryRadius &b : estimate.boundary) {
    BoundaryGradient g;
    g.r = b.r;
    g.non_isolated = b.non_isolated;
    for (std::size_t k = 0; k < n; ++k)
      g.max_grad = std::max(g.max_grad, norm(field.sample(on_circle({}, b.r, k, n)).grad));
    g.relative = rep.field_scale > 0.0 ? g.max_grad / rep.field_scale : 0.0;
    g.violation = b.non_isolated && g.relative > tolerance;
    rep.any_violation = rep.any_violation || g.violation;
    rep.radii.push_back(g);
  }
  return rep;
}

RadialConsistencyReport radial_consistency(const Field &field, double r_lo, double r_hi,
                                           Vec2 center, double dr, std::size_t n_angles) {
  if (!(dr > 0.0) || !(r_hi - r_lo >= 4.0 * dr) || r_lo < 0.0)
    throw InvalidInput(fmt::format(
        "radial consistency: interval [{:.6g}, {:.6g}] is thinner than 4 dr = {:.6g}", r_lo, r_hi,
        4.0 * dr));

  // Profile extracted along the ray theta = 0 at spacing dr/16.
  const double hs = dr / 16.0;
  const auto m = static_cast<std::size_t>(std::floor((r_hi - r_lo) / hs)) + 1;
  std::vector<double> rs(m);
  std::vector<double> phis(m);
  for (std::size_t i = 0; i < m; ++i) {
    rs[i] = r_lo + static_cast<double>(i) * hs;
    phis[i] = field.sample(center + Vec2{rs[i], 0.0}).phi;
  }

  constexpr std::size_t width = 9;
  RadialConsistencyReport rep;
  double lap_scale = 0.0;
  // Stay one stencil half-width away from the ends and from r = 0.
  for (std::size_t i = width / 2; i + width / 2 < m; ++i) {
    const double r = rs[i];
    if (r < 4.0 * hs) continue;
    const std::size_t start = i - width / 2;
    StencilWeights w{};
    fornberg_weights3(r, std::span<const double>(rs.data() + start, width), w);
    double d1 = 0.0;
    double d2 = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      d1 += w[1][k] * phis[start + k];
      d2 += w[2][k] * phis[start + k];
    }
    const double lap_1d = d2 + d1 / r;
    for (std::size_t a = 0; a < n_angles; ++a) {
      const double lap_2d = field.sample(on_circle(center, r, a, n_angles)).laplacian;
      lap_scale = std::max(lap_scale, std::fabs(lap_2d));
      rep.max_discrepancy = std::max(rep.max_discrepancy, std::fabs(lap_2d - lap_1d));
      ++rep.n_points;
    }
  }
  if (rep.n_points == 0) throw InvalidInput("radial consistency: no interior radii to test");
  rep.relative = lap_scale > 0.0 ? rep.max_discrepancy / lap_scale : rep.max_discrepancy;
  return rep;
}

FunctionalRelationReport functional_relation_test(const Field &field, const Region &region,
                                                  const FunctionalRelationOptions &opts) {
  if (opts.bins == 0 || opts.n_radial == 0 || opts.n_angular == 0)
    throw InvalidInput("functional relation: sampling counts must be positive");
  if (!(region.r_outer > region.r_inner) || region.r_inner < 0.0)
    throw InvalidInput("functional relation: empty region");

  std::vector<FieldSample> pts;
  pts.reserve(opts.n_radial * opts.n_angular);
  double max_grad = 0.0;
  for (std::size_t i = 0; i < opts.n_radial; ++i) {
    const double r = region.r_inner + (region.r_outer - region.r_inner) *
                                          (static_cast<double>(i) + 0.5) /
                                          static_cast<double>(opts.n_radial);
    for (std::size_t k = 0; k < opts.n_angular; ++k) {
      pts.push_back(field.sample(on_circle(region.center, r, k, opts.n_angular)));
      max_grad = std::max(max_grad, norm(pts.back().grad));
    }
  }
  const double grad_cut = opts.gradient_threshold * max_grad;
  std::erase_if(pts, [&](const FieldSample &s) { return !(norm(s.grad) > grad_cut); });
  if (pts.empty())
    throw InvalidInput("functional relation: region is empty after gradient filtering");

  FunctionalRelationReport rep;
  double phi_lo = std::numeric_limits<double>::infinity();
  double phi_hi = -phi_lo;
  double lap_lo = phi_lo;
  double lap_hi = -phi_lo;
  rep.scatter.reserve(pts.size());
  for (const FieldSample &s : pts) {
    rep.scatter.push_back({s.phi, s.laplacian});
    phi_lo = std::min(phi_lo, s.phi);
    phi_hi = std::max(phi_hi, s.phi);
    lap_lo = std::min(lap_lo, s.laplacian);
    lap_hi = std::max(lap_hi, s.laplacian);
  }
  rep.lap_range = lap_hi - lap_lo;
  const double phi_range = phi_hi - phi_lo;
  if (!(phi_range > 0.0)) {
    rep.single_valued = true;
    return rep;
  }

  const double bin_w = phi_range / static_cast<double>(opts.bins);
  const double tol = 1e-13 * phi_range;
  std::vector<MinMax> bins(opts.bins);
  for (const FieldSample &s0 : pts) {
    const auto b = std::min<std::size_t>(
        opts.bins - 1, static_cast<std::size_t>(std::floor((s0.phi - phi_lo) / bin_w)));
    const double target = phi_lo + (static_cast<double>(b) + 0.5) * bin_w;
    FieldSample s = s0;
    bool ok = false;
    for (int it = 0; it < 40; ++it) {
      const double g2 = dot(s.grad, s.grad);
      if (!(std::sqrt(g2) > grad_cut)) break;
      const double err = target - s.phi;
      if (std::fabs(err) <= tol) {
        ok = true;
        break;
      }
      s = field.sample(s.x + (err / g2) * s.grad);
    }
    const double rr = norm(s.x - region.center);
    if (!ok || rr < region.r_inner || rr > region.r_outer) continue;
    ++rep.projected;
    bins[b].lo = std::min(bins[b].lo, s.laplacian);
    bins[b].hi = std::max(bins[b].hi, s.laplacian);
  }
  for (const MinMax &m : bins)
    if (m.hi >= m.lo) rep.width = std::max(rep.width, m.hi - m.lo);
  rep.relative_width = rep.lap_range > 0.0 ? rep.width / rep.lap_range : 0.0;
  rep.single_valued = rep.width <= opts.tau_f * rep.lap_range;
  return rep;
}

} // namespace rotflow
