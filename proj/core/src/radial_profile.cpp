#include "rotflow/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rotflow/error.hpp"
#include "rotflow/interpolation.hpp"

namespace rotflow {

struct RadialProfile::Table {
  std::vector<double> r;
  std::vector<double> beta;
  // Node array used for stencils; compact tables carry mirrored nodes -r_i.
  std::vector<double> nodes;
  std::vector<double> values;
  int order = 5;
  Support support = Support::compact;
  double min_spacing = 0.0;
};

namespace {

double ipow(double x, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= x;
  return out;
}

} // namespace

RadialProfile RadialProfile::bump(double amplitude, double support_radius, int smoothness) {
  if (!(support_radius > 0.0) || !std::isfinite(support_radius))
    throw InvalidInput("bump profile: support radius must be positive");
  if (smoothness < 3) throw InvalidInput("bump profile: smoothness exponent p must be >= 3");
  if (!std::isfinite(amplitude)) throw InvalidInput("bump profile: amplitude must be finite");
  RadialProfile p;
  p.kind_ = ProfileKind::closed_form;
  p.amplitude_ = amplitude;
  p.support_radius_ = support_radius;
  p.smoothness_ = smoothness;
  return p;
}

RadialProfile RadialProfile::tabulated(std::vector<double> r, std::vector<double> beta, int order,
                                       Support support) {
  if (r.size() != beta.size()) throw InvalidInput("tabulated profile: column length mismatch");
  if (order < 4) throw InvalidInput("tabulated profile: interpolation order must be >= 4");
  if (r.size() < static_cast<std::size_t>(order) + 1)
    throw InvalidInput("tabulated profile: table shorter than the interpolation stencil");
  if (static_cast<std::size_t>(order) + 1 > kMaxStencil)
    throw InvalidInput("tabulated profile: interpolation order too large");
  double min_spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(beta[i]))
      throw InvalidInput("tabulated profile: non-finite entry");
    if (i > 0) {
      if (!(r[i] > r[i - 1])) throw InvalidInput("tabulated profile: r must be strictly increasing");
      min_spacing = std::min(min_spacing, r[i] - r[i - 1]);
    }
  }
  if (support == Support::compact && r.front() != 0.0)
    throw InvalidInput("tabulated profile: compact tables must start at r = 0");
  if (support == Support::segment && !(r.front() > 0.0))
    throw InvalidInput("tabulated profile: segment tables must stay away from r = 0");

  auto table = std::make_shared<Table>();
  table->order = order;
  table->support = support;
  table->min_spacing = min_spacing;
  if (support == Support::compact) {
    const std::size_t n = r.size();
    table->nodes.reserve(2 * n - 1);
    table->values.reserve(2 * n - 1);
    for (std::size_t i = n - 1; i >= 1; --i) {
      table->nodes.push_back(-r[i]);
      table->values.push_back(beta[i]);
    }
    table->nodes.insert(table->nodes.end(), r.begin(), r.end());
    table->values.insert(table->values.end(), beta.begin(), beta.end());
  } else {
    table->nodes = r;
    table->values = beta;
  }
  table->r = std::move(r);
  table->beta = std::move(beta);

  RadialProfile p;
  p.kind_ = ProfileKind::tabulated;
  p.amplitude_ = table->beta.front();
  p.support_radius_ = support == Support::compact ? table->r.back()
                                                  : std::numeric_limits<double>::infinity();
  p.smoothness_ = 0;
  p.table_ = std::move(table);
  return p;
}

RadialProfile RadialProfile::load_table(const std::filesystem::path &path, int order) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open profile table " + path.string());
  std::vector<double> r;
  std::vector<double> beta;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double a = 0.0;
    double b = 0.0;
    if (!(ls >> a)) continue;
    if (!(ls >> b))
      throw InvalidInput(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    r.push_back(a);
    beta.push_back(b);
  }
  return tabulated(std::move(r), std::move(beta), order, Support::compact);
}

RadialProfile::Support RadialProfile::support() const {
  return table_ ? table_->support : Support::compact;
}

double RadialProfile::support_radius() const { return support_radius_; }

int RadialProfile::interpolation_order() const { return table_ ? table_->order : 0; }

const std::vector<double> &RadialProfile::table_r() const {
  static const std::vector<double> empty;
  return table_ ? table_->r : empty;
}

const std::vector<double> &RadialProfile::table_beta() const {
  static const std::vector<double> empty;
  return table_ ? table_->beta : empty;
}

double RadialProfile::domain_min() const {
  return table_ && table_->support == Support::segment ? table_->r.front() : 0.0;
}

double RadialProfile::domain_max() const {
  return table_ && table_->support == Support::segment ? table_->r.back()
                                                       : std::numeric_limits<double>::infinity();
}

RadialJet RadialProfile::jet(double r) const {
  if (!(r >= 0.0)) throw InvalidInput("profile evaluation at negative or NaN radius");
  if (kind_ == ProfileKind::closed_form) return closed_form_jet(r);
  return table_jet(r);
}

RadialJet RadialProfile::closed_form_jet(double r) const {
  const double rho = support_radius_;
  if (r >= rho) return {};
  const int p = smoothness_;
  const double a = amplitude_;
  const double rho2 = rho * rho;
  const double s = (r / rho) * (r / rho);
  const double w = 1.0 - s;
  const double wp3 = ipow(w, p - 3);
  const double wp2 = wp3 * w;
  const double wp1 = wp2 * w;

  RadialJet j;
  j.value = a * wp1 * w;
  j.d1_over_r = -2.0 * a * p * wp1 / rho2;
  j.d1 = j.d1_over_r * r;
  j.d2 = a * (4.0 * p * (p - 1) * wp2 * r * r / (rho2 * rho2) - 2.0 * p * wp1 / rho2);
  j.d3 = a * (-8.0 * p * (p - 1) * (p - 2) * wp3 * r * r * r / (rho2 * rho2 * rho2) +
              12.0 * p * (p - 1) * wp2 * r / (rho2 * rho2));
  j.dlap_over_r = 8.0 * a * p * (p - 1) / (rho2 * rho2) * (2.0 * wp2 - (p - 2) * s * wp3);
  return j;
}

RadialJet RadialProfile::table_jet(double r) const {
  const Table &t = *table_;
  if (t.support == Support::compact && r >= t.r.back()) return {};
  if (t.support == Support::segment && (r < t.r.front() || r > t.r.back()))
    throw InvalidInput("tabulated segment evaluated outside [" + std::to_string(t.r.front()) +
                       ", " + std::to_string(t.r.back()) + "]");

  const std::size_t width = static_cast<std::size_t>(t.order) + 1;
  const std::span<const double> nodes(t.nodes);
  const std::size_t start = stencil_start(nodes, r, width);
  StencilWeights w{};
  fornberg_weights3(r, nodes.subspan(start, width), w);

  double d[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < width; ++i) d[k] += w[k][i] * t.values[start + i];

  RadialJet j;
  j.value = d[0];
  j.d1 = d[1];
  j.d2 = d[2];
  j.d3 = d[3];
  // The /r combinations are resolved at half a table spacing near the origin.
  const double r_floor = 0.5 * t.min_spacing;
  if (r == 0.0) {
    j.d1_over_r = d[2];
  } else {
    j.d1_over_r = d[1] / r;
  }
  if (r >= r_floor) {
    j.dlap_over_r = (d[3] + (d[2] - d[1] / r) / r) / r;
  } else {
    const RadialJet ref = table_jet(r_floor);
    j.dlap_over_r = ref.dlap_over_r;
  }
  return j;
}

ProfileValues RadialProfile::eval(double r) const {
  const RadialJet j = jet(r);
  return {j.value, j.d1, j.d2};
}

double RadialProfile::laplacian(double r) const {
  const RadialJet j = jet(r);
  return j.d2 + j.d1_over_r;
}

} // namespace rotflow
