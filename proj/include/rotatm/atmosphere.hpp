#pragma once

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <optional>

namespace rotatm {

/// Constants of one model instance. Units are the caller's choice.
struct PhysicalParams {
  double gm0 = 1.0;      ///< gravitational parameter G*M0
  double r0 = 1.0;       ///< planet radius
  double r_cap = 2.0;    ///< stratosphere height at the poles
  double a_const = 2.0 / 7.0;  ///< pressure law P = A rho^gamma
  double gamma = 1.4;
  double omega = 0.0;    ///< angular velocity of the frame

  /// gm0, r0, A > 0 and 1 < gamma < 2. Throws DomainError otherwise.
  void validate() const;
  /// validate() plus r_cap > r0.
  void validate_with_cap() const;

  /// gm0 = 1, r0 = 1, R = 2, gamma = 1.4, A = 2/7, Omega^2 = 0.02.
  static PhysicalParams reference();
};

/// Differential rotation omega(varpi) added to the frame rate Omega.
class RotationProfile {
 public:
  using Fn = std::function<double(double)>;

  RotationProfile() = default;
  RotationProfile(Fn omega_of_varpi, bool continuously_differentiable = true);

  static RotationProfile none();
  static RotationProfile constant(double c);

  double operator()(double varpi) const { return fn_ ? fn_(varpi) : 0.0; }
  bool is_zero() const { return !fn_; }
  bool continuously_differentiable() const { return c1_; }

  /// sup |omega + Omega| sampled on [0, 3R/2]. Approximate: the supremum is
  /// taken over a uniform grid, not certified.
  double sup_norm(const PhysicalParams& p, int samples = 4096) const;

 private:
  Fn fn_;
  bool c1_ = true;
};

struct CylPoint {
  double varpi = 0.0;
  double z = 0.0;
  double r() const;
};

CylPoint to_cyl(const Eigen::Vector3d& x);

double upsilon_of_rho(double rho, const PhysicalParams& p);
double rho_of_upsilon(double upsilon, const PhysicalParams& p);

/// -GM/r - Omega^2 varpi^2 / 2, valid for r > R0 only.
double geopotential(const Eigen::Vector3d& x, const PhysicalParams& p);

double static_upsilon(const Eigen::Vector3d& x, const PhysicalParams& p);
double static_upsilon(CylPoint x, const PhysicalParams& p);

/// B(varpi) = int_0^varpi (omega + Omega)^2 s ds by adaptive Gauss-Kronrod.
double profile_integral(double varpi, const PhysicalParams& p, const RotationProfile& prof,
                        double abs_tol = 1e-10);

double rotating_upsilon(const Eigen::Vector3d& x, const PhysicalParams& p,
                        const RotationProfile& prof);

double kappa_of(const PhysicalParams& p);
double kappa_tilde(double x_sq, const PhysicalParams& p, const RotationProfile& prof);

struct AdmissibilityReport {
  bool condition_k = false;
  double value = 0.0;   ///< (R/R0)^3 kappa, or R^3 ||omega+Omega||^2 / (2GM) with a profile
  double margin = 0.0;  ///< 4/27 - value
  double r1 = std::numeric_limits<double>::infinity();
  double omega_max_sq = 0.0;
};

AdmissibilityReport check_admissibility(const PhysicalParams& p,
                                        const RotationProfile* prof = nullptr);

double pole_density(const PhysicalParams& p);

/// Background fields of a stationary atmosphere. The uniformly rotating
/// (static) state uses the closed-form B; a profile switches to quadrature.
class StationaryState {
 public:
  explicit StationaryState(PhysicalParams p, RotationProfile prof = RotationProfile::none());

  const PhysicalParams& params() const { return p_; }
  const RotationProfile& profile() const { return prof_; }
  double kappa() const { return kappa_; }
  double lambda() const { return p_.r0 / p_.r_cap; }

  double upsilon(CylPoint x) const;
  /// (dUpsilon/dvarpi, dUpsilon/dz).
  Eigen::Vector2d grad_upsilon(CylPoint x) const;
  /// Density truncated to the bounded component varpi < 3R/2.
  double rho(CylPoint x) const;
  Eigen::Vector2d grad_rho(CylPoint x) const;
  /// dUpsilon/drho = A gamma rho^(gamma-2); +inf where rho = 0.
  double sigma_bar(CylPoint x) const;

  double upsilon(const Eigen::Vector3d& x) const { return upsilon(to_cyl(x)); }
  double rho(const Eigen::Vector3d& x) const { return rho(to_cyl(x)); }

 private:
  PhysicalParams p_;
  RotationProfile prof_;
  double kappa_;
};

}  // namespace rotatm
