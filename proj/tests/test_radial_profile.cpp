#include <cmath>
#include <fstream>
#include <random>

#include <doctest.h>

#include "rotflow/cutoff.hpp"
#include "rotflow/error.hpp"
#include "rotflow/radial_ivp.hpp"
#include "rotflow/radial_profile.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace rotflow;
using doctest::Approx;

TEST_CASE("cutoff plateau, support and midpoint") {
  CHECK(cutoff_eval(0.5).value == 1.0);
  CHECK(cutoff_eval(3.0).value == 0.0);
  CHECK(cutoff_eval(1.5).value == Approx(0.5).epsilon(1e-15));
  CHECK(cutoff_eval(-1.5).value == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cutoff matches the exponential partition formula") {
  for (double t = -2.5; t <= 2.5; t += 0.01) {
    const double ref = static_cast<double>(oracle::cutoff(t));
    CHECK(cutoff_eval(t).value == Approx(ref).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("cutoff derivatives agree with differences of the formula") {
  const oracle::ld h = 1e-4L;
  for (double t = 1.05; t < 1.96; t += 0.03) {
    auto f = [](oracle::ld x) { return oracle::cutoff(x); };
    const oracle::ld d1 = (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
    const oracle::ld d2 =
        (-f(t - 2 * h) + 16 * f(t - h) - 30 * f(t) + 16 * f(t + h) - f(t + 2 * h)) / (12 * h * h);
    const Jet1 j = cutoff_eval(t);
    CHECK(j.d1 == Approx(static_cast<double>(d1)).epsilon(1e-6).scale(1.0));
    CHECK(j.d2 == Approx(static_cast<double>(d2)).epsilon(1e-5).scale(1.0));
    // third derivative from differences of the returned second derivative
    const double d3 = (cutoff_eval(t + 1e-5).d2 - cutoff_eval(t - 1e-5).d2) / 2e-5;
    CHECK(j.d3 == Approx(d3).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("cutoff invariants over a million random points") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  std::size_t bad = 0;
  for (int i = 0; i < 1'000'000; ++i) {
    const double t = U(rng);
    const Jet1 j = cutoff_eval(t);
    const Jet1 m = cutoff_eval(-t);
    if (!(j.value >= 0.0 && j.value <= 1.0)) ++bad;
    if (std::fabs(t) <= 1.0 && (j.value != 1.0 || j.d1 != 0.0)) ++bad;
    if (std::fabs(t) >= 2.0 && (j.value != 0.0 || j.d1 != 0.0)) ++bad;
    if (j.value != m.value) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("bump profile values at the origin, the edge and inside") {
  const auto b = RadialProfile::bump(1.0, 1.0, 4);
  const ProfileValues v0 = b.eval(0.0);
  CHECK(v0.beta == 1.0);
  CHECK(v0.beta_prime == 0.0);
  CHECK(v0.beta_double_prime == Approx(-8.0).epsilon(1e-15));
  const ProfileValues ve = b.eval(1.0);
  CHECK(ve.beta == 0.0);
  CHECK(ve.beta_prime == 0.0);
  CHECK(ve.beta_double_prime == 0.0);
  CHECK(b.eval(0.5).beta == Approx(0.31640625).epsilon(1e-15));
  CHECK(b.eval(7.0).beta == 0.0);
}

TEST_CASE("bump profile matches the hand-expanded closed form") {
  for (int p : {3, 4, 7, 12}) {
    const oracle::Bump ref{0.7L, 1.3L, p};
    const auto b = RadialProfile::bump(0.7, 1.3, p);
    for (double r = 0.0; r < 1.5; r += 0.0137) {
      const ProfileValues v = b.eval(r);
      CHECK(v.beta == Approx(static_cast<double>(ref.value(r))).epsilon(1e-13).scale(1.0));
      CHECK(v.beta_prime == Approx(static_cast<double>(ref.d1(r))).epsilon(1e-13).scale(1.0));
      CHECK(v.beta_double_prime == Approx(static_cast<double>(ref.d2(r))).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("radial laplacian limit, support and interior value") {
  const auto b = RadialProfile::bump(1.0, 1.0, 4);
  CHECK(b.laplacian(0.0) == Approx(-16.0).epsilon(1e-15));
  CHECK(b.laplacian(1e-9) == Approx(-16.0).epsilon(1e-12));
  CHECK(b.laplacian(1.0) == 0.0);
  CHECK(b.laplacian(2.0) == 0.0);
  const oracle::Bump ref{1.0L, 1.0L, 4};
  CHECK(b.laplacian(0.5) == Approx(static_cast<double>(ref.d2(0.5L) + ref.d1(0.5L) / 0.5L)).epsilon(1e-14));
}

TEST_CASE("profile derivatives agree with central differences") {
  const double h = 1e-4;
  for (int p : {3, 5, 9}) {
    const auto b = RadialProfile::bump(1.4, 0.9, p);
    for (double r = 0.05; r < 0.85; r += 0.04) {
      const double d1 = (b.eval(r + h).beta - b.eval(r - h).beta) / (2 * h);
      const double d2 = (b.eval(r + h).beta - 2 * b.eval(r).beta + b.eval(r - h).beta) / (h * h);
      const ProfileValues v = b.eval(r);
      CHECK(std::fabs(d1 - v.beta_prime) <= 1e-6 * std::max(1.0, std::fabs(v.beta_prime)));
      CHECK(std::fabs(d2 - v.beta_double_prime) <= 1e-6 * std::max(1.0, std::fabs(v.beta_double_prime)));
    }
  }
}

TEST_CASE("profile jet third derivative and derived combinations") {
  const auto b = RadialProfile::bump(0.8, 1.1, 6);
  for (double r = 0.05; r < 1.05; r += 0.05) {
    const RadialJet j = b.jet(r);
    const double h = 1e-5;
    CHECK(j.d3 == Approx((b.jet(r + h).d2 - b.jet(r - h).d2) / (2 * h)).epsilon(1e-6).scale(1.0));
    CHECK(j.d1_over_r == Approx(j.d1 / r).epsilon(1e-13).scale(1.0));
    const double lap_prime = (b.laplacian(r + h) - b.laplacian(r - h)) / (2 * h);
    CHECK(j.dlap_over_r * r == Approx(lap_prime).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("profile argument and parameter validation") {
  CHECK_THROWS_AS(RadialProfile::bump(1.0, 1.0, 2), InvalidInput);
  CHECK_THROWS_AS(RadialProfile::bump(1.0, 0.0, 4), InvalidInput);
  CHECK_THROWS_AS(RadialProfile::bump(1.0, 1.0, 4).eval(-0.1), InvalidInput);
  CHECK_THROWS_AS(RadialProfile::tabulated({0.0, 0.1, 0.05}, {1.0, 1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(RadialProfile::tabulated({0.0, 0.1, 0.2, 0.3, 0.4, 0.5}, {1, 1, 1, 1, 1, 1}, 3),
                  InvalidInput);
}

TEST_CASE("tabulated compact profile reproduces a sampled bump") {
  const double rho = 1.0;
  const std::size_t n = 2048;
  std::vector<double> r(n + 1), beta(n + 1);
  const oracle::Bump ref{1.0L, 1.0L, 8};
  for (std::size_t i = 0; i <= n; ++i) {
    r[i] = rho * static_cast<double>(i) / n;
    beta[i] = static_cast<double>(ref.value(r[i]));
  }
  const auto t = RadialProfile::tabulated(r, beta, 6);
  CHECK(t.kind() == ProfileKind::tabulated);
  CHECK(t.support_radius() == Approx(1.0));
  for (double x = 0.0; x < 1.2; x += 0.0173) {
    const ProfileValues v = t.eval(x);
    CHECK(v.beta == Approx(static_cast<double>(ref.value(x))).epsilon(1e-10).scale(1.0));
    CHECK(v.beta_prime == Approx(static_cast<double>(ref.d1(x))).epsilon(1e-8).scale(1.0));
    CHECK(v.beta_double_prime == Approx(static_cast<double>(ref.d2(x))).epsilon(1e-6).scale(1.0));
  }
  CHECK(t.laplacian(0.0) == Approx(static_cast<double>(ref.laplacian(0))).epsilon(1e-6));
}

TEST_CASE("tabulated profile loads from a two-column text table") {
  const auto dir = fixtures::scratch("profile_table");
  {
    std::ofstream out(dir / "beta.txt");
    out.precision(17);
    out << "# r beta\n";
    for (int i = 0; i <= 400; ++i) {
      const double r = 0.5 * i / 400.0;
      out << r << ' ' << std::pow(1.0 - 4.0 * r * r, 6) << '\n';
    }
  }
  const auto t = RadialProfile::load_table(dir / "beta.txt");
  CHECK(t.eval(0.25).beta == Approx(std::pow(0.75, 6)).epsilon(1e-8));
  CHECK(t.eval(0.6).beta == 0.0);
  {
    std::ofstream out(dir / "bad.txt");
    out << "0 1\n0.1 oops\n";
  }
  CHECK_THROWS_AS(RadialProfile::load_table(dir / "bad.txt"), InvalidInput);
}

TEST_CASE("ivp: zero nonlinearity with zero slope stays constant") {
  auto pr = RadialIvpProblem::symmetric([](double) { return 0.0; }, 1.0, 2.5, 0.0, 0.5);
  const auto sol = solve_radial_ivp(pr);
  for (double v : sol.phi) CHECK(v == Approx(2.5).epsilon(1e-14));
  CHECK(sol.r[sol.origin_index] == 1.0);
  CHECK(sol.phi[sol.origin_index] == 2.5);
  CHECK(sol.slope[sol.origin_index] == 0.0);
}

TEST_CASE("ivp: zero nonlinearity reproduces the logarithmic solution") {
  const double c = 0.3, b = -1.2, r0 = 1.0;
  auto pr = RadialIvpProblem::symmetric([](double) { return 0.0; }, r0, c, b, 0.6);
  const auto sol = solve_radial_ivp(pr);
  double err = 0.0;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    const double exact = c + b * r0 * std::log(sol.r[i] / r0);
    err = std::max(err, std::fabs(sol.phi[i] - exact));
  }
  CHECK(err <= 1e-8);
  const double x = 0.777;
  CHECK(sol.profile.eval(x).beta == Approx(c + b * r0 * std::log(x / r0)).epsilon(1e-8));
  CHECK(sol.profile.eval(x).beta_prime == Approx(b * r0 / x).epsilon(1e-7));
}

TEST_CASE("ivp: linear nonlinearity gives the order-zero Bessel function") {
  RadialIvpProblem pr;
  pr.nonlinearity = [](double p) { return p; };
  pr.r0 = 0.01;
  pr.value = static_cast<double>(oracle::bessel_j0(0.01L));
  pr.slope = -static_cast<double>(oracle::bessel_j1(0.01L));
  pr.r_min = 0.005;
  pr.r_max = 8.0;
  const auto sol = solve_radial_ivp(pr);
  double err = 0.0;
  for (std::size_t i = 0; i < sol.r.size(); ++i)
    err = std::max(err, std::fabs(sol.phi[i] - static_cast<double>(oracle::bessel_j0(sol.r[i]))));
  CHECK(err <= 1e-8);
}

TEST_CASE("ivp: fixed-step error decreases at the declared order") {
  auto err_for = [](double step) {
    auto pr = RadialIvpProblem::symmetric([](double) { return 0.0; }, 1.0, 0.0, 1.0, 0.5);
    pr.control.fixed_step = step;
    pr.control.table_spacing = 0.05;
    const auto sol = solve_radial_ivp(pr);
    double e = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i)
      e = std::max(e, std::fabs(sol.phi[i] - std::log(sol.r[i])));
    return e;
  };
  const double ratio = err_for(0.05) / err_for(0.025);
  const double theory = std::pow(2.0, kIvpOrder);
  CHECK(ratio >= 0.7 * theory);
  CHECK(ratio <= 1.3 * theory);
}

TEST_CASE("ivp: invalid problems and failures are reported") {
  auto pr = RadialIvpProblem::symmetric([](double) { return 0.0; }, 1.0, 0.0, 0.0, 0.5);
  CHECK_THROWS_AS(RadialIvpProblem::symmetric([](double) { return 0.0; }, 0.5, 0.0, 0.0, 0.5),
                  InvalidInput);
  auto blow = RadialIvpProblem::symmetric([](double p) { return -p * p * p; }, 1.0, 10.0, 0.0, 0.9);
  CHECK_THROWS_AS(solve_radial_ivp(blow), IvpError);
  auto nan = RadialIvpProblem::symmetric([](double) { return std::nan(""); }, 1.0, 0.0, 0.0, 0.5);
  CHECK_THROWS_AS(solve_radial_ivp(nan), IvpError);
}
