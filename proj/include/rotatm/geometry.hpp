#pragma once

#include "rotatm/atmosphere.hpp"

#include <optional>
#include <string>
#include <utility>

namespace rotatm {

/// Topology of {F > lambda} for F(X^2, Z^2; kappa) = 1/sqrt(X^2+Z^2) + kappa X^2.
enum class LevelSetCase { L, M, H, H_degenerate_kappa0 };

std::string to_string(LevelSetCase c);

/// Value and derivative of g(Q) = 1 - lambda^2 Q + 2 lambda kappa Q^2 - kappa^2 Q^3.
struct CubicValue {
  double value;
  double derivative;
};

CubicValue cubic_g(double q, double kappa, double lambda);

LevelSetCase classify_case(double kappa, double lambda);

struct CubicRoots {
  double q_minus;
  double q_plus;  ///< +inf when kappa = 0
  double q_inf;   ///< +inf when kappa = 0
};

/// Roots of g bracketing the bounded component. Throws UnboundedDomainError in case L.
CubicRoots cubic_roots(double kappa, double lambda);

/// Non-dimensional level-set record for one (kappa, lambda).
struct LevelSetAnalysis {
  double kappa = 0.0;
  double lambda = 0.0;
  LevelSetCase case_label = LevelSetCase::H;
  std::optional<CubicRoots> roots;  ///< absent in case L

  bool bounded() const { return roots.has_value(); }
  /// 4 lambda^3 / 27 - kappa; positive in case H.
  double margin() const { return 4.0 * lambda * lambda * lambda / 27.0 - kappa; }
};

LevelSetAnalysis analyze_level_set(double kappa, double lambda);
LevelSetAnalysis analyze_level_set(const PhysicalParams& p);

/// sqrt(Q-) < 3/(2 lambda) < sqrt(Q+). Case H (kappa = 0 included) only.
bool root_estimates_check(const LevelSetAnalysis& a);

/// Z = f(X) = sqrt(g(X^2)) / (lambda - kappa X^2) on [0, sqrt(Q-)].
double boundary_curve(double x, const LevelSetAnalysis& a);
/// Analytic Df(X) on the open interval (0, sqrt(Q-)).
double boundary_curve_slope(double x, const LevelSetAnalysis& a);

/// H(zeta^2): outer radius along the ray z/r = zeta divided by R.
double shape_map(double zeta_sq, const LevelSetAnalysis& a);

/// Outer radius along the ray z/r = zeta in units of R0, with its first two
/// zeta-derivatives (implicit differentiation of F = lambda).
struct RadiusJet {
  double rho;
  double d1;
  double d2;
};
RadiusJet outer_radius_jet(double zeta, const LevelSetAnalysis& a);

/// Physical boundary surface: analysis plus the radii converting to (varpi, z).
struct BoundarySurface {
  LevelSetAnalysis analysis;
  double r0;
  double r_cap;

  static BoundarySurface from_params(const PhysicalParams& p);
  double outer_radius(double zeta) const { return r_cap * shape_map(zeta * zeta, analysis); }
};

/// r > R0, varpi < 3R/2 and Upsilon > 0.
bool domain_contains(const Eigen::Vector3d& x, const StationaryState& state);
bool domain_contains(CylPoint x, const StationaryState& state);

/// (grad Upsilon | n) at a boundary point (physical coordinates), with n the
/// outer unit normal built from the boundary curve slope.
double vacuum_normal_sign(CylPoint boundary_point, const StationaryState& state,
                          double tol = 1e-8);

}  // namespace rotatm
