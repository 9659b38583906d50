#include <cmath>
#include <numbers>

#include <doctest.h>

#include "rotflow/error.hpp"
#include "rotflow/flow_spec.hpp"
#include "rotflow/spectral.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace rotflow;
using doctest::Approx;

namespace {

VorticityState sample_state(const SpectralGrid &g, const std::function<double(Vec2)> &f) {
  VorticityState s{std::vector<double>(g.size()), 0.0};
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) s.omega[j * g.n + i] = f(g.point(i, j));
  return s;
}

double rms(const std::vector<double> &v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

} // namespace

TEST_CASE("spectral grid validation") {
  CHECK_THROWS_AS(SpectralGrid::make(100, 5.0), InvalidInput);
  CHECK_THROWS_AS(SpectralGrid::make(8, 5.0), InvalidInput);
  CHECK_THROWS_AS(SpectralGrid::make(64, -1.0), InvalidInput);
  const SpectralGrid g = SpectralGrid::make(64, 7.0);
  CHECK(g.spacing() == Approx(14.0 / 64.0));
  CHECK_NOTHROW(g.check_support(3.0));
  CHECK_THROWS_AS(g.check_support(3.2), InvalidSpec);
  CHECK_THROWS_AS(initial_state(ComposedFlow(fixtures::spec("two_bump")), SpectralGrid::make(64, 6.5)),
                  InvalidSpec);
}

TEST_CASE("zero vorticity gives zero velocity, zero tendency and stays zero") {
  const SpectralGrid g = SpectralGrid::make(32, 3.0);
  SpectralSolver solver(g);
  const VorticityState z{std::vector<double>(g.size(), 0.0), 0.0};
  const VelocityGrids v = solver.velocity_from_vorticity(z);
  CHECK(oracle::max_abs(v.vx) == 0.0);
  CHECK(oracle::max_abs(v.vy) == 0.0);
  CHECK(oracle::max_abs(solver.rhs(z)) == 0.0);
  CHECK(oracle::max_abs(solver.step(z, 0.1).omega) == 0.0);
}

TEST_CASE("single Fourier mode: inversion and sign convention") {
  const double L = 2.5;
  const SpectralGrid g = SpectralGrid::make(64, L);
  SpectralSolver solver(g);
  const double k = std::numbers::pi / L;
  const auto s = sample_state(g, [&](Vec2 x) { return std::sin(k * x.x); });
  const VelocityGrids v = solver.velocity_from_vorticity(s);
  double ex = 0.0, ey = 0.0;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) {
      const Vec2 x = g.point(i, j);
      ex = std::max(ex, std::fabs(v.vx[j * g.n + i]));
      ey = std::max(ey, std::fabs(v.vy[j * g.n + i] + std::cos(k * x.x) / k));
    }
  CHECK(ex <= 1e-13);
  CHECK(ey <= 1e-13);
  // Stream function -(L/pi)^2 sin: the inverse Laplacian of the mode.
  const auto psi = solver.inverse_laplacian(s.omega);
  double ep = 0.0;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i)
      ep = std::max(ep, std::fabs(psi[j * g.n + i] + std::sin(k * g.coordinate(i)) / (k * k)));
  CHECK(ep <= 1e-13);
  CHECK(solver.enstrophy(s) == Approx(2.0 * L * L).epsilon(1e-12));
  CHECK(solver.energy(s) == Approx(std::pow(L, 4) / (std::numbers::pi * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("single Fourier mode is a stationary solution") {
  const double L = 2.5;
  const SpectralGrid g = SpectralGrid::make(64, L);
  SpectralSolver solver(g);
  const double k = std::numbers::pi / L;
  const auto s = sample_state(g, [&](Vec2 x) { return std::sin(k * x.x); });
  CHECK(oracle::max_abs(solver.rhs(s)) <= 1e-13);
  const auto later = solver.advance(s, 0.05, 40);
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::fabs(later.omega[i] - s.omega[i]));
  CHECK(e <= 1e-12);
  CHECK(later.time == Approx(2.0));
}

TEST_CASE("nonzero mean is rejected") {
  const SpectralGrid g = SpectralGrid::make(32, 3.0);
  SpectralSolver solver(g);
  const VorticityState c{std::vector<double>(g.size(), 1.0), 0.0};
  CHECK_THROWS_AS(solver.velocity_from_vorticity(c), InvalidInput);
}

TEST_CASE("non-finite values abort the integration") {
  const SpectralGrid g = SpectralGrid::make(32, 3.0);
  SpectralSolver solver(g);
  VorticityState s{std::vector<double>(g.size(), 0.0), 0.0};
  s.omega[17] = std::nan("");
  CHECK_THROWS_AS(solver.step(s, 0.01), InstabilityError);
}

TEST_CASE("explicit time step violating the CFL bound is rejected") {
  const auto cfg = fixtures::config("two_bump");
  SolverConfig sc;
  sc.dt = 1.0;
  CHECK_THROWS_AS(run(ComposedFlow(cfg.flow), SpectralGrid::make(64, 7.0), sc, 1.0), InstabilityError);
}

TEST_CASE("spectral inversion round trip on a zero-mean field") {
  const auto cfg = fixtures::config("two_bump");
  const SpectralGrid g = SpectralGrid::make(256, 7.0);
  SpectralSolver solver(g);
  const VorticityState s = initial_state(ComposedFlow(cfg.flow), g);
  CHECK(std::fabs(solver.mean(s)) <= 1e-12 * oracle::max_abs(s.omega));
  const auto back = solver.laplacian(solver.inverse_laplacian(s.omega));
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::fabs(back[i] - s.omega[i]));
  CHECK(e <= 1e-10 * oracle::max_abs(s.omega));
}

TEST_CASE("spectral velocity of the constructed vorticity matches the analytic velocity") {
  const FlowSpec spec = fixtures::spec("two_bump");
  const ComposedFlow flow(spec);
  const SpectralGrid g = SpectralGrid::make(512, 7.0);
  SpectralSolver solver(g);
  const VelocityGrids v = solver.velocity_from_vorticity(initial_state(flow, g));
  double err = 0.0, vmax = 0.0;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) {
      const Vec2 a = flow.velocity(g.point(i, j));
      vmax = std::max(vmax, norm(a));
      err = std::max(err, norm(a - Vec2{v.vx[j * g.n + i], v.vy[j * g.n + i]}));
    }
  CHECK(err <= 1e-8 * vmax);
}

TEST_CASE("tendency of a radial vorticity vanishes") {
  const ComposedFlow flow(fixtures::spec("radial"));
  const SpectralGrid g = SpectralGrid::make(256, 7.0);
  SpectralSolver solver(g);
  const VorticityState s = initial_state(flow, g);
  double gmax = 0.0;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i)
      gmax = std::max(gmax, norm(flow.sample(g.point(i, j)).grad_laplacian));
  const double scale = solver.max_speed(s) * gmax;
  CHECK(rms(solver.rhs(s)) <= 1e-10 * scale);
}

TEST_CASE("tendency of the two-bump flow matches the analytic advection term") {
  const ComposedFlow flow(fixtures::spec("two_bump"));
  const SpectralGrid g = SpectralGrid::make(512, 7.0);
  SpectralSolver solver(g);
  const auto t = solver.rhs(initial_state(flow, g));
  double err = 0.0, ref = 0.0;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) {
      const FieldSample s = flow.sample(g.point(i, j));
      // v0 . grad omega0 with grad omega0 = grad lap phi
      const double a = -dot(s.velocity, s.grad_laplacian);
      ref = std::max(ref, std::fabs(a));
      err = std::max(err, std::fabs(a - t[j * g.n + i]));
    }
  MESSAGE("tendency relative error " << err / ref);
  CHECK(err <= 1e-6 * ref);
}

TEST_CASE("rotated reference: full turn, radial invariance, half turn, group property") {
  const FlowSpec two = fixtures::spec("two_bump");
  const ComposedFlow flow(two);
  const SpectralGrid g = SpectralGrid::make(128, 7.0);
  const auto w0 = rotate_reference(flow, g, 0.0);
  const double wmax = oracle::max_abs(w0);
  auto maxdiff = [](const std::vector<double> &a, const std::vector<double> &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
  };
  CHECK(maxdiff(rotate_reference(flow, g, 2.0 * std::numbers::pi / two.omega), w0) <= 1e-12 * wmax);

  const ComposedFlow radial(fixtures::spec("radial", {"flow.omega=0.7"}));
  const auto r0 = rotate_reference(radial, g, 0.0);
  for (double t : {0.3, 1.7, 5.0})
    CHECK(maxdiff(rotate_reference(radial, g, t), r0) <= 1e-12 * oracle::max_abs(r0));

  const auto half = rotate_reference(flow, g, std::numbers::pi / two.omega);
  std::vector<double> flipped(g.size());
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) flipped[j * g.n + i] = flow.vorticity(-1.0 * g.point(i, j));
  CHECK(maxdiff(half, flipped) <= 1e-12 * wmax);
  const auto angles = track_bumps(flow, g, half, std::numbers::pi / two.omega);
  REQUIRE(angles.size() == 2);
  CHECK(std::fabs(std::remainder(angles[0] - 0.0, 2.0 * std::numbers::pi)) <= 1e-3);
  CHECK(std::fabs(std::remainder(angles[1] - std::numbers::pi, 2.0 * std::numbers::pi)) <= 1e-3);

  const double t1 = 0.37, t2 = 1.21;
  const auto composed = rotate_reference(flow, g, t1 + t2);
  std::vector<double> direct(g.size());
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) {
      const Vec2 x = g.point(i, j);
      direct[j * g.n + i] = flow.vorticity(
          rotate_clockwise(rotate_clockwise(x, two.omega * t2), two.omega * t1));
    }
  CHECK(maxdiff(composed, direct) <= 1e-12 * wmax);
}

TEST_CASE("radial flow is stationary over one time unit") {
  const auto cfg = fixtures::config("radial");
  const RunResult r = run(ComposedFlow(cfg.flow), SpectralGrid::make(256, 7.0), cfg.simulate.solver, 1.0);
  CHECK(r.max_error() <= 1e-8);
  CHECK(r.energy_drift() <= 1e-8);
  CHECK(r.enstrophy_drift() <= 1e-8);
}

TEST_CASE("rotating radial flow is stationary at N = 512") {
  const auto cfg = fixtures::config("radial", {"flow.omega=1.0"});
  const RunResult r = run(ComposedFlow(cfg.flow), SpectralGrid::make(512, 7.0), cfg.simulate.solver, 1.0);
  MESSAGE("rotating radial e(1) = " << r.max_error());
  CHECK(r.max_error() <= 1e-8);
}

TEST_CASE("two-bump flow without rotation is stationary") {
  const auto cfg = fixtures::config("two_bump", {"flow.omega=0"});
  const RunResult r = run(ComposedFlow(cfg.flow), SpectralGrid::make(256, 7.0), cfg.simulate.solver, 1.0);
  CHECK(r.max_error() <= 1e-6);
}

TEST_CASE("two-bump flow rotates rigidly for one revolution") {
  const auto cfg = fixtures::config("two_bump");
  SolverConfig sc = cfg.simulate.solver;
  const ComposedFlow flow(cfg.flow);
  const RunResult r = run(flow, SpectralGrid::make(256, 7.0), sc, cfg.horizon());
  MESSAGE("e(T) = " << r.final_error() << ", steps " << r.steps);
  CHECK(r.final_error() <= 1e-2);
  CHECK(r.energy_drift() <= 1e-6);
  CHECK(r.enstrophy_drift() <= 1e-6);
  CHECK(r.steps >= 1000);
  for (const DiagnosticsRow &row : r.series)
    CHECK(std::fabs(row.mean_w) <= 1e-12 * std::max(std::fabs(row.min_w), std::fabs(row.max_w)));
  REQUIRE(r.series.back().bump_angles.size() == 2);
  CHECK(std::fabs(std::remainder(r.series.back().bump_angles[0] - std::numbers::pi, 2 * std::numbers::pi)) <= 1e-2);
}

TEST_CASE("time-step halving shows fourth-order self-convergence") {
  const ComposedFlow flow(fixtures::spec("two_bump"));
  const SpectralGrid g = SpectralGrid::make(256, 7.0);
  SpectralSolver solver(g);
  const VorticityState s0 = initial_state(flow, g);
  const double T = 0.1;
  // base step is the one the run itself would take
  const auto n0 = static_cast<std::size_t>(std::ceil(T / solver.stable_dt(s0, 1.0)));
  auto solve = [&](std::size_t steps) { return solver.advance(s0, T / steps, steps).omega; };
  const auto a = solve(n0), b = solve(2 * n0), c = solve(4 * n0);
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e1 += (a[i] - b[i]) * (a[i] - b[i]);
    e2 += (b[i] - c[i]) * (b[i] - c[i]);
  }
  const double ratio = std::sqrt(e1 / e2);
  MESSAGE("self-convergence ratio " << ratio);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}
