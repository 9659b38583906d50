#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace rotflow {

/// Radial function g(r) with the derivative combinations needed for the
/// Cartesian chain rule. The `_over_r` entries are smooth at r = 0.
struct RadialJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double d1_over_r = 0.0;   ///< g'(r)/r, limit g''(0) at the origin
  double dlap_over_r = 0.0; ///< (g'' + g'/r)'(r) / r
};

struct ProfileValues {
  double beta = 0.0;
  double beta_prime = 0.0;
  double beta_double_prime = 0.0;
};

enum class ProfileKind { closed_form, tabulated };

/// 1D stream-function building block.
///
/// Closed-form kind: beta(r) = A (1 - (r/rho)^2)^p on [0, rho], zero beyond;
/// this is C^{p-1} across r = rho.
///
/// Tabulated kind: local polynomial interpolation (Fornberg weights) of a
/// strictly increasing (r, beta) table. A compact table starts at r = 0, is
/// mirrored evenly across the origin and vanishes beyond its last node; a
/// segment table (IVP output) is only defined on [r_front, r_back].
///
/// Instances are immutable and cheap to copy.
class RadialProfile {
public:
  enum class Support { compact, segment };

  static RadialProfile bump(double amplitude, double support_radius, int smoothness);
  static RadialProfile tabulated(std::vector<double> r, std::vector<double> beta, int order = 5,
                                 Support support = Support::compact);
  /// Two-column text table (r, beta); '#' starts a comment.
  static RadialProfile load_table(const std::filesystem::path &path, int order = 5);

  ProfileKind kind() const { return kind_; }
  Support support() const;
  /// rho: beta and beta' vanish for r >= rho. Infinite for segment tables.
  double support_radius() const;
  double amplitude() const { return amplitude_; }
  int smoothness() const { return smoothness_; }
  int interpolation_order() const;
  const std::vector<double> &table_r() const;
  const std::vector<double> &table_beta() const;
  /// Domain of definition; [0, inf) for compact profiles.
  double domain_min() const;
  double domain_max() const;

  /// Full jet up to the third derivative; r must be >= 0 and inside the domain.
  RadialJet jet(double r) const;
  ProfileValues eval(double r) const;
  /// beta'' + beta'/r; the r -> 0 limit 2 beta''(0) at the origin.
  double laplacian(double r) const;

private:
  struct Table;

  RadialJet closed_form_jet(double r) const;
  RadialJet table_jet(double r) const;

  ProfileKind kind_ = ProfileKind::closed_form;
  double amplitude_ = 0.0;
  double support_radius_ = 1.0;
  int smoothness_ = 3;
  std::shared_ptr<const Table> table_;
};

} // namespace rotflow
