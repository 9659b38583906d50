#include "rotflow/flow_spec.hpp"

#include <cmath>
#include <fmt/format.h>

#include "rotflow/error.hpp"

namespace rotflow {

void FlowSpec::validate() const {
  if (!(glue_radius > 0.0) || !std::isfinite(glue_radius))
    throw InvalidSpec("gluing radius R must be positive and finite");
  if (!std::isfinite(omega)) throw InvalidSpec("angular velocity must be finite");

  for (std::size_t k = 0; k < bumps.size(); ++k) {
    const Bump &b = bumps[k];
    if (b.profile.support() != RadialProfile::Support::compact)
      throw InvalidSpec(fmt::format("bump {}: profile is not compactly supported", k));
    const double reach = norm(b.center) + b.profile.support_radius();
    if (!(reach < glue_radius))
      throw InvalidSpec(fmt::format(
          "bump {}: support disk reaches |x| = {:.6g}, not strictly inside B_R with R = {:.6g}", k,
          reach, glue_radius));
    for (std::size_t m = 0; m < k; ++m) {
      const double gap = norm(b.center - bumps[m].center);
      if (!(gap > b.profile.support_radius() + bumps[m].profile.support_radius()))
        throw InvalidSpec(fmt::format(
            "disjointness violated: support disks of bumps {} and {} overlap (center distance "
            "{:.6g}, radii {:.6g} + {:.6g})",
            m, k, gap, bumps[m].profile.support_radius(), b.profile.support_radius()));
    }
  }

  if (imported) {
    if (!imported->frame_vanishes())
      throw InvalidSpec("imported field does not vanish on its outermost grid frame");
    const double reach = imported->support_radius();
    if (!(reach < glue_radius))
      throw InvalidSpec(fmt::format(
          "imported field support reaches |x| = {:.6g}, not strictly inside B_R with R = {:.6g}",
          reach, glue_radius));
    const Grid2D &g = imported->grid();
    for (std::size_t j = 0; j < g.spec.ny; ++j)
      for (std::size_t i = 0; i < g.spec.nx; ++i) {
        if (g.at(i, j) == 0.0) continue;
        const Vec2 p = g.spec.point(i, j);
        for (std::size_t k = 0; k < bumps.size(); ++k)
          if (norm(p - bumps[k].center) <= bumps[k].profile.support_radius())
            throw InvalidSpec(
                fmt::format("disjointness violated: imported field overlaps bump {}", k));
      }
  }
}

ComposedFlow::ComposedFlow(FlowSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

void add_radial(FieldSample &s, Vec2 center, const RadialJet &jet) {
  const Vec2 u = s.x - center;
  const double r2 = dot(u, u);
  s.phi += jet.value;
  s.grad += jet.d1_over_r * u;
  Sym2 h{jet.d1_over_r, 0.0, jet.d1_over_r};
  if (r2 > 0.0) {
    const double c = (jet.d2 - jet.d1_over_r) / r2;
    h.xx += c * u.x * u.x;
    h.xy += c * u.x * u.y;
    h.yy += c * u.y * u.y;
  }
  s.hessian += h;
  s.grad_laplacian += jet.dlap_over_r * u;
}

RadialJet ComposedFlow::glue_jet(double r) const {
  const double big_r = spec_.glue_radius;
  const double om = spec_.omega;
  const Jet1 chi = cutoff_eval(r / big_r);
  // c = 1 - chi(r/R) and its r-derivatives.
  const double c0 = 1.0 - chi.value;
  const double c1 = -chi.d1 / big_r;
  const double c2 = -chi.d2 / (big_r * big_r);
  const double c3 = -chi.d3 / (big_r * big_r * big_r);
  const double k = -0.5 * om;

  RadialJet j;
  j.value = k * c0 * r * r;
  j.d1_over_r = k * (c1 * r + 2.0 * c0);
  j.d1 = j.d1_over_r * r;
  j.d2 = k * (c2 * r * r + 4.0 * c1 * r + 2.0 * c0);
  j.d3 = k * (c3 * r * r + 6.0 * c2 * r + 6.0 * c1);
  j.dlap_over_r = r > 0.0 ? k * (c3 * r * r + 7.0 * c2 * r + 9.0 * c1) / r : 0.0;
  return j;
}

FieldSample ComposedFlow::sample(Vec2 x) const {
  FieldSample s;
  s.x = x;
  const double om = spec_.omega;
  const double r = norm(x);
  const double big_r = spec_.glue_radius;

  if (r >= 2.0 * big_r) {
    // Pure rigid-rotation exterior, written so that v and omega cancel exactly.
    s.phi = -0.5 * om * dot(x, x);
    s.grad = -om * x;
    s.hessian = {-om, 0.0, -om};
    s.grad_laplacian = {0.0, 0.0};
    assemble_flow(s, om);
    return s;
  }

  if (r > big_r) {
    add_radial(s, {0.0, 0.0}, glue_jet(r));
  } else {
    for (const Bump &b : spec_.bumps) {
      const double rb = norm(x - b.center);
      if (rb < b.profile.support_radius()) add_radial(s, b.center, b.profile.jet(rb));
    }
    if (spec_.imported && spec_.imported->contains(x)) {
      const FieldSample inner = spec_.imported->jet(x);
      s.phi += inner.phi;
      s.grad += inner.grad;
      s.hessian += inner.hessian;
      s.grad_laplacian += inner.grad_laplacian;
      s.provenance = Provenance::imported_grid;
    }
  }
  assemble_flow(s, om);
  return s;
}

} // namespace rotflow
