#include "rotflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

#include "rotflow/error.hpp"

namespace rotflow {

namespace {

// FFTW's planner is not thread-safe; execution of existing plans is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T> struct FftwBuffer {
  T *ptr = nullptr;
  std::size_t size = 0;
  explicit FftwBuffer(std::size_t n) : ptr(static_cast<T *>(fftw_malloc(sizeof(T) * n))), size(n) {
    if (!ptr) throw std::bad_alloc();
    std::memset(static_cast<void *>(ptr), 0, sizeof(T) * n);
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer &) = delete;
  FftwBuffer &operator=(const FftwBuffer &) = delete;
  T &operator[](std::size_t i) { return ptr[i]; }
  const T &operator[](std::size_t i) const { return ptr[i]; }
  T *data() { return ptr; }
};

using Cplx = std::complex<double>;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

SpectralGrid SpectralGrid::make(std::size_t n, double half_width) {
  if (n < 16 || !is_power_of_two(n))
    throw InvalidInput(fmt::format("spectral grid: N = {} must be a power of two >= 16", n));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw InvalidInput("spectral grid: half-width L must be positive");
  return {n, half_width};
}

GridSpec SpectralGrid::grid_spec() const {
  return {n, n, -half_width, -half_width, spacing(), spacing()};
}

void SpectralGrid::check_support(double glue_radius) const {
  if (!(2.0 * glue_radius < 0.9 * half_width))
    throw InvalidSpec(fmt::format(
        "flow support radius 2R = {:.6g} must be below 0.9 L = {:.6g} for periodic embedding",
        2.0 * glue_radius, 0.9 * half_width));
}

struct SpectralSolver::Impl {
  std::size_t n;
  std::size_t nc;
  std::vector<double> kx;
  std::vector<double> ky;
  std::vector<double> kx_deriv; // zero at the Nyquist column
  std::vector<double> ky_deriv; // zero at the Nyquist row
  std::vector<double> inv_k2;   // 1/|k|^2, zero at k = 0
  std::vector<double> keep;     // dealiasing mask for the product
  std::vector<double> filter;   // post-step filter, 1 when disabled

  FftwBuffer<double> real_in;
  FftwBuffer<fftw_complex> spec_out;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  FftwBuffer<fftw_complex> work;
  FftwBuffer<fftw_complex> w_hat;
  FftwBuffer<fftw_complex> stage;
  FftwBuffer<fftw_complex> acc;
  FftwBuffer<fftw_complex> k_cur;
  FftwBuffer<double> ux, uy, wx, wy;

  Impl(const SpectralGrid &g, const SolverConfig &cfg)
      : n(g.n), nc(g.n / 2 + 1), real_in(g.n * g.n), spec_out(g.n * (g.n / 2 + 1)),
        work(g.n * (g.n / 2 + 1)), w_hat(g.n * (g.n / 2 + 1)), stage(g.n * (g.n / 2 + 1)),
        acc(g.n * (g.n / 2 + 1)), k_cur(g.n * (g.n / 2 + 1)), ux(g.n * g.n), uy(g.n * g.n),
        wx(g.n * g.n), wy(g.n * g.n) {
    const double base = std::numbers::pi / g.half_width;
    const auto ni = static_cast<std::ptrdiff_t>(n);
    kx.resize(nc);
    kx_deriv.resize(nc);
    for (std::size_t m = 0; m < nc; ++m) {
      kx[m] = base * static_cast<double>(m);
      kx_deriv[m] = m == n / 2 ? 0.0 : kx[m];
    }
    ky.resize(n);
    ky_deriv.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto js = static_cast<std::ptrdiff_t>(j) <= ni / 2 ? static_cast<std::ptrdiff_t>(j)
                                                              : static_cast<std::ptrdiff_t>(j) - ni;
      ky[j] = base * static_cast<double>(js);
      ky_deriv[j] = j == n / 2 ? 0.0 : ky[j];
    }
    const auto cut = static_cast<std::ptrdiff_t>(n / 3);
    const double kmax = base * static_cast<double>(n / 2);
    inv_k2.resize(n * nc);
    keep.resize(n * nc);
    filter.resize(n * nc);
    for (std::size_t j = 0; j < n; ++j) {
      const auto js = static_cast<std::ptrdiff_t>(j) <= ni / 2 ? static_cast<std::ptrdiff_t>(j)
                                                              : static_cast<std::ptrdiff_t>(j) - ni;
      for (std::size_t m = 0; m < nc; ++m) {
        const std::size_t idx = j * nc + m;
        const double k2 = kx[m] * kx[m] + ky[j] * ky[j];
        inv_k2[idx] = k2 > 0.0 ? 1.0 / k2 : 0.0;
        const bool inside = std::abs(js) <= cut && static_cast<std::ptrdiff_t>(m) <= cut;
        keep[idx] = cfg.dealiasing == Dealiasing::none || inside ? 1.0 : 0.0;
        if (cfg.filter) {
          const double kn = std::sqrt(k2) / kmax;
          filter[idx] = std::exp(-cfg.filter_strength * std::pow(kn, cfg.filter_order));
        } else {
          filter[idx] = 1.0;
        }
      }
    }
    const int dim = static_cast<int>(n);
    std::lock_guard lock(planner_mutex());
    r2c = fftw_plan_dft_r2c_2d(dim, dim, real_in.data(), spec_out.data(), FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_2d(dim, dim, work.data(), real_in.data(), FFTW_ESTIMATE);
    if (!r2c || !c2r) throw Error("FFTW plan creation failed");
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }

  static Cplx &c(fftw_complex *p, std::size_t i) { return reinterpret_cast<Cplx *>(p)[i]; }
  static const Cplx &cc(const fftw_complex *p, std::size_t i) {
    return reinterpret_cast<const Cplx *>(p)[i];
  }

  void forward(const double *in, fftw_complex *out) {
    std::copy(in, in + n * n, real_in.data());
    fftw_execute_dft_r2c(r2c, real_in.data(), out);
  }

  // c2r overwrites its input, so the coefficients are staged in `work`.
  void inverse(const fftw_complex *in, double *out) {
    std::memcpy(work.data(), in, sizeof(fftw_complex) * n * nc);
    fftw_execute_dft_c2r(c2r, work.data(), out);
    const double scale = 1.0 / static_cast<double>(n * n);
    for (std::size_t i = 0; i < n * n; ++i) out[i] *= scale;
  }

  template <typename F> void fill_work_and_inverse(F &&coef, double *out) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t m = 0; m < nc; ++m) {
        const std::size_t idx = j * nc + m;
        c(work.data(), idx) = coef(j, m, idx);
      }
    fftw_execute_dft_c2r(c2r, work.data(), out);
    const double scale = 1.0 / static_cast<double>(n * n);
    for (std::size_t i = 0; i < n * n; ++i) out[i] *= scale;
  }

  void velocity(const fftw_complex *w, double *vx, double *vy) {
    const Cplx I(0.0, 1.0);
    fill_work_and_inverse(
        [&](std::size_t j, std::size_t, std::size_t idx) {
          return -I * ky_deriv[j] * (-cc(w, idx) * inv_k2[idx]);
        },
        vx);
    fill_work_and_inverse(
        [&](std::size_t, std::size_t m, std::size_t idx) {
          return I * kx_deriv[m] * (-cc(w, idx) * inv_k2[idx]);
        },
        vy);
  }

  // out = -(v . grad omega)^, dealiased, zero mean.
  void tendency(const fftw_complex *w, fftw_complex *out) {
    const Cplx I(0.0, 1.0);
    velocity(w, ux.data(), uy.data());
    fill_work_and_inverse(
        [&](std::size_t, std::size_t m, std::size_t idx) {
          return I * kx_deriv[m] * cc(w, idx);
        },
        wx.data());
    fill_work_and_inverse(
        [&](std::size_t j, std::size_t, std::size_t idx) {
          return I * ky_deriv[j] * cc(w, idx);
        },
        wy.data());
    for (std::size_t i = 0; i < n * n; ++i) real_in[i] = ux[i] * wx[i] + uy[i] * wy[i];
    fftw_execute_dft_r2c(r2c, real_in.data(), out);
    for (std::size_t i = 0; i < n * nc; ++i) c(out, i) *= -keep[i];
    c(out, 0) = 0.0;
  }

  void rk4(double dt) {
    const std::size_t m = n * nc;
    // acc accumulates w + dt/6 (k1 + 2k2 + 2k3 + k4).
    tendency(w_hat.data(), k_cur.data());
    for (std::size_t i = 0; i < m; ++i) {
      c(acc.data(), i) = c(w_hat.data(), i) + dt / 6.0 * c(k_cur.data(), i);
      c(stage.data(), i) = c(w_hat.data(), i) + 0.5 * dt * c(k_cur.data(), i);
    }
    tendency(stage.data(), k_cur.data());
    for (std::size_t i = 0; i < m; ++i) {
      c(acc.data(), i) += dt / 3.0 * c(k_cur.data(), i);
      c(stage.data(), i) = c(w_hat.data(), i) + 0.5 * dt * c(k_cur.data(), i);
    }
    tendency(stage.data(), k_cur.data());
    for (std::size_t i = 0; i < m; ++i) {
      c(acc.data(), i) += dt / 3.0 * c(k_cur.data(), i);
      c(stage.data(), i) = c(w_hat.data(), i) + dt * c(k_cur.data(), i);
    }
    tendency(stage.data(), k_cur.data());
    for (std::size_t i = 0; i < m; ++i)
      c(w_hat.data(), i) = (c(acc.data(), i) + dt / 6.0 * c(k_cur.data(), i)) * filter[i];
  }
};

SpectralSolver::SpectralSolver(SpectralGrid grid, SolverConfig config)
    : grid_(SpectralGrid::make(grid.n, grid.half_width)), config_(config),
      impl_(std::make_unique<Impl>(grid_, config_)) {
  if (!(config_.cfl > 0.0)) throw InvalidInput("solver: CFL number must be positive");
  if (config_.dt && !(*config_.dt > 0.0)) throw InvalidInput("solver: dt must be positive");
}

SpectralSolver::~SpectralSolver() = default;

namespace {

void check_size(const SpectralGrid &g, const std::vector<double> &f) {
  if (f.size() != g.size())
    throw InvalidInput(fmt::format("field has {} samples, grid expects {}", f.size(), g.size()));
}

double max_abs(const std::vector<double> &f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::fabs(v));
  return m;
}

} // namespace

double SpectralSolver::mean(const VorticityState &state) const {
  double s = 0.0;
  for (double v : state.omega) s += v;
  return s / static_cast<double>(state.omega.size());
}

VelocityGrids SpectralSolver::velocity_from_vorticity(const VorticityState &state) {
  check_size(grid_, state.omega);
  const double m = mean(state);
  if (std::fabs(m) > 1e-12 * max_abs(state.omega))
    throw InvalidInput(fmt::format(
        "vorticity mean {:.3e} exceeds 1e-12 x max|omega|; Laplacian not invertible on the torus",
        m));
  impl_->forward(state.omega.data(), impl_->w_hat.data());
  VelocityGrids v{std::vector<double>(grid_.size()), std::vector<double>(grid_.size())};
  impl_->velocity(impl_->w_hat.data(), v.vx.data(), v.vy.data());
  return v;
}

std::vector<double> SpectralSolver::rhs(const VorticityState &state) {
  check_size(grid_, state.omega);
  impl_->forward(state.omega.data(), impl_->w_hat.data());
  impl_->tendency(impl_->w_hat.data(), impl_->k_cur.data());
  std::vector<double> out(grid_.size());
  impl_->inverse(impl_->k_cur.data(), out.data());
  return out;
}

VorticityState SpectralSolver::advance(const VorticityState &state, double dt, std::size_t steps) {
  check_size(grid_, state.omega);
  impl_->forward(state.omega.data(), impl_->w_hat.data());
  for (std::size_t s = 0; s < steps; ++s) impl_->rk4(dt);
  VorticityState out{std::vector<double>(grid_.size()),
                     state.time + dt * static_cast<double>(steps)};
  impl_->inverse(impl_->w_hat.data(), out.omega.data());
  for (double v : out.omega)
    if (!std::isfinite(v))
      throw InstabilityError(fmt::format("non-finite vorticity at t = {:.6g}", out.time));
  return out;
}

VorticityState SpectralSolver::step(const VorticityState &state, double dt) {
  return advance(state, dt, 1);
}

std::vector<double> SpectralSolver::laplacian(const std::vector<double> &field) {
  check_size(grid_, field);
  impl_->forward(field.data(), impl_->w_hat.data());
  const std::size_t m = grid_.n * impl_->nc;
  for (std::size_t i = 0; i < m; ++i) {
    const double k2 = impl_->inv_k2[i] > 0.0 ? 1.0 / impl_->inv_k2[i] : 0.0;
    Impl::c(impl_->w_hat.data(), i) *= -k2;
  }
  std::vector<double> out(grid_.size());
  impl_->inverse(impl_->w_hat.data(), out.data());
  return out;
}

std::vector<double> SpectralSolver::inverse_laplacian(const std::vector<double> &field) {
  check_size(grid_, field);
  impl_->forward(field.data(), impl_->w_hat.data());
  const std::size_t m = grid_.n * impl_->nc;
  for (std::size_t i = 0; i < m; ++i) Impl::c(impl_->w_hat.data(), i) *= -impl_->inv_k2[i];
  std::vector<double> out(grid_.size());
  impl_->inverse(impl_->w_hat.data(), out.data());
  return out;
}

double SpectralSolver::max_speed(const VorticityState &state) {
  impl_->forward(state.omega.data(), impl_->w_hat.data());
  impl_->velocity(impl_->w_hat.data(), impl_->ux.data(), impl_->uy.data());
  double m = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i)
    m = std::max(m, std::hypot(impl_->ux[i], impl_->uy[i]));
  return m;
}

double SpectralSolver::energy(const VorticityState &state) {
  impl_->forward(state.omega.data(), impl_->w_hat.data());
  impl_->velocity(impl_->w_hat.data(), impl_->ux.data(), impl_->uy.data());
  double s = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i)
    s += impl_->ux[i] * impl_->ux[i] + impl_->uy[i] * impl_->uy[i];
  const double h = grid_.spacing();
  return 0.5 * h * h * s;
}

double SpectralSolver::enstrophy(const VorticityState &state) const {
  double s = 0.0;
  for (double v : state.omega) s += v * v;
  const double h = grid_.spacing();
  return h * h * s;
}

double SpectralSolver::stable_dt(const VorticityState &state, double omega) {
  const double vmax = max_speed(state);
  const double h = grid_.spacing();
  double dt = vmax > 0.0 ? config_.cfl * h / vmax : config_.cfl * h;
  if (omega != 0.0)
    dt = std::min(dt, 2.0 * std::numbers::pi / (std::fabs(omega) * config_.steps_per_revolution));
  return dt;
}

std::vector<double> rotate_reference(const ComposedFlow &flow, const SpectralGrid &grid, double t) {
  const double angle = flow.angular_velocity() * t;
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.n; ++j)
    for (std::size_t i = 0; i < grid.n; ++i)
      out[j * grid.n + i] = flow.vorticity(rotate_clockwise(grid.point(i, j), angle));
  return out;
}

VorticityState initial_state(const ComposedFlow &flow, const SpectralGrid &grid) {
  grid.check_support(flow.spec().glue_radius);
  VorticityState s{rotate_reference(flow, grid, 0.0), 0.0};
  // The sampled field integrates to zero only up to quadrature error.
  double sum = 0.0;
  for (double v : s.omega) sum += v;
  const double m = sum / static_cast<double>(s.omega.size());
  for (double &v : s.omega) v -= m;
  return s;
}

std::vector<double> track_bumps(const ComposedFlow &flow, const SpectralGrid &grid,
                                const std::vector<double> &omega, double t) {
  const FlowSpec &spec = flow.spec();
  const double two_om = 2.0 * spec.omega;
  const double h = grid.spacing();
  std::vector<double> angles;
  angles.reserve(spec.bumps.size());
  for (const Bump &b : spec.bumps) {
    if (b.center.x == 0.0 && b.center.y == 0.0) {
      angles.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const Vec2 p = rotate_clockwise(b.center, -spec.omega * t);
    const double rho = b.profile.support_radius();
    auto lo = [&](double c) {
      return static_cast<std::size_t>(std::clamp(std::floor((c - rho + grid.half_width) / h), 0.0,
                                                 static_cast<double>(grid.n - 1)));
    };
    auto hi = [&](double c) {
      return static_cast<std::size_t>(std::clamp(std::ceil((c + rho + grid.half_width) / h), 0.0,
                                                 static_cast<double>(grid.n - 1)));
    };
    Vec2 moment{};
    double mass = 0.0;
    for (std::size_t j = lo(p.y); j <= hi(p.y); ++j)
      for (std::size_t i = lo(p.x); i <= hi(p.x); ++i) {
        const Vec2 x = grid.point(i, j);
        if (norm(x - p) >= rho) continue;
        const double w = std::fabs(omega[j * grid.n + i] - two_om);
        moment += w * x;
        mass += w;
      }
    angles.push_back(mass > 0.0 ? std::atan2(moment.y, moment.x)
                                : std::numeric_limits<double>::quiet_NaN());
  }
  return angles;
}

double RunResult::max_error() const {
  double m = 0.0;
  for (const auto &r : series) m = std::max(m, r.e_rot);
  return m;
}

double RunResult::energy_drift() const {
  if (series.empty() || series.front().energy == 0.0) return 0.0;
  double m = 0.0;
  for (const auto &r : series)
    m = std::max(m, std::fabs(r.energy - series.front().energy) / std::fabs(series.front().energy));
  return m;
}

double RunResult::enstrophy_drift() const {
  if (series.empty() || series.front().enstrophy == 0.0) return 0.0;
  double m = 0.0;
  for (const auto &r : series)
    m = std::max(m, std::fabs(r.enstrophy - series.front().enstrophy) /
                        std::fabs(series.front().enstrophy));
  return m;
}

RunResult run(const ComposedFlow &flow, const SpectralGrid &grid, const SolverConfig &config,
              double horizon, const RunOptions &options) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw InvalidInput("run: horizon must be finite and non-negative");
  VorticityState state = initial_state(flow, grid);
  SpectralSolver solver(grid, config);
  const double omega = flow.angular_velocity();

  double dt = 0.0;
  if (config.dt) {
    dt = *config.dt;
    const double courant = dt * solver.max_speed(state) / grid.spacing();
    if (courant > 1.0)
      throw InstabilityError(
          fmt::format("CFL violated: dt = {:.4g} gives Courant number {:.3f} > 1", dt, courant));
  } else {
    dt = solver.stable_dt(state, omega);
  }
  RunResult result;
  result.steps = horizon > 0.0 ? static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9)) : 0;
  result.dt = result.steps > 0 ? horizon / static_cast<double>(result.steps) : dt;

  double ref_norm2 = 0.0;
  for (double v : state.omega) ref_norm2 += v * v;
  const double ref_norm = std::sqrt(ref_norm2);

  auto record = [&](const VorticityState &s, std::size_t step) {
    DiagnosticsRow row;
    row.t = s.time;
    row.energy = solver.energy(s);
    row.enstrophy = solver.enstrophy(s);
    row.min_w = *std::min_element(s.omega.begin(), s.omega.end());
    row.max_w = *std::max_element(s.omega.begin(), s.omega.end());
    row.mean_w = solver.mean(s);
    const std::vector<double> ref = rotate_reference(flow, grid, s.time);
    double d2 = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) d2 += (s.omega[i] - ref[i]) * (s.omega[i] - ref[i]);
    row.e_rot = ref_norm > 0.0 ? std::sqrt(d2) / ref_norm : std::sqrt(d2);
    row.bump_angles = track_bumps(flow, grid, s.omega, s.time);
    result.series.push_back(std::move(row));
    if (options.on_diagnostic) options.on_diagnostic(s, step);
  };

  record(state, 0);
  const std::size_t every = std::max<std::size_t>(1, config.diagnostic_every);
  std::size_t done = 0;
  while (done < result.steps) {
    const std::size_t chunk = std::min(every, result.steps - done);
    const double t_end = static_cast<double>(done + chunk) * result.dt;
    state = solver.advance(state, result.dt, chunk);
    state.time = t_end;
    done += chunk;
    record(state, done);
  }
  result.final_state = std::move(state);
  return result;
}

} // namespace rotflow
