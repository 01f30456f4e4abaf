#include "rotatm/atmosphere.hpp"

#include "rotatm/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

namespace rotatm {

namespace {

void require_outside_planet(double r, const PhysicalParams& p) {
  if (!(r > p.r0)) {
    std::ostringstream os;
    os << "point at r = " << r << " is not outside the planet radius " << p.r0;
    throw DomainError(os.str());
  }
}

}  // namespace

void PhysicalParams::validate() const {
  if (!(gm0 > 0.0)) throw DomainError("gm0 must be positive");
  if (!(r0 > 0.0)) throw DomainError("r0 must be positive");
  if (!(a_const > 0.0)) throw DomainError("a_const must be positive");
  if (!(gamma > 1.0 && gamma < 2.0)) throw DomainError("gamma must satisfy 1 < gamma < 2");
  if (!std::isfinite(omega)) throw DomainError("omega must be finite");
}

void PhysicalParams::validate_with_cap() const {
  validate();
  if (!(r_cap > r0)) throw DomainError("stationary solutions need r_cap > r0");
}

PhysicalParams PhysicalParams::reference() {
  PhysicalParams p;
  p.gm0 = 1.0;
  p.r0 = 1.0;
  p.r_cap = 2.0;
  p.gamma = 1.4;
  p.a_const = 2.0 / 7.0;
  p.omega = std::sqrt(0.02);
  return p;
}

RotationProfile::RotationProfile(Fn omega_of_varpi, bool continuously_differentiable)
    : fn_(std::move(omega_of_varpi)), c1_(continuously_differentiable) {}

RotationProfile RotationProfile::none() { return RotationProfile(); }

RotationProfile RotationProfile::constant(double c) {
  return RotationProfile([c](double) { return c; });
}

double RotationProfile::sup_norm(const PhysicalParams& p, int samples) const {
  const double hi = 1.5 * p.r_cap;
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double w = hi * static_cast<double>(i) / static_cast<double>(samples - 1);
    best = std::max(best, std::abs((*this)(w) + p.omega));
  }
  return best;
}

double CylPoint::r() const { return std::hypot(varpi, z); }

CylPoint to_cyl(const Eigen::Vector3d& x) { return {std::hypot(x.x(), x.y()), x.z()}; }

double upsilon_of_rho(double rho, const PhysicalParams& p) {
  if (rho < 0.0) throw DomainError("density must be nonnegative");
  return p.a_const * p.gamma / (p.gamma - 1.0) * std::pow(rho, p.gamma - 1.0);
}

double rho_of_upsilon(double upsilon, const PhysicalParams& p) {
  if (!(upsilon > 0.0)) return 0.0;
  return std::pow((p.gamma - 1.0) / (p.a_const * p.gamma) * upsilon, 1.0 / (p.gamma - 1.0));
}

double geopotential(const Eigen::Vector3d& x, const PhysicalParams& p) {
  const CylPoint c = to_cyl(x);
  const double r = c.r();
  require_outside_planet(r, p);
  return -p.gm0 / r - 0.5 * p.omega * p.omega * c.varpi * c.varpi;
}

double static_upsilon(CylPoint x, const PhysicalParams& p) {
  const double r = x.r();
  require_outside_planet(r, p);
  return p.gm0 * (1.0 / r - 1.0 / p.r_cap) + 0.5 * p.omega * p.omega * x.varpi * x.varpi;
}

double static_upsilon(const Eigen::Vector3d& x, const PhysicalParams& p) {
  return static_upsilon(to_cyl(x), p);
}

double profile_integral(double varpi, const PhysicalParams& p, const RotationProfile& prof,
                        double abs_tol) {
  if (varpi < 0.0) throw DomainError("profile integral needs varpi >= 0");
  if (varpi == 0.0) return 0.0;
  if (prof.is_zero()) return 0.5 * p.omega * p.omega * varpi * varpi;
  auto integrand = [&](double s) {
    const double w = prof(s) + p.omega;
    return w * w * s;
  };
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, varpi, 12, 1e-13, &err);
  if (!(err <= abs_tol) || !std::isfinite(value)) {
    std::ostringstream os;
    os << "profile quadrature did not reach " << abs_tol << " (estimate " << err << ")";
    throw NumericError(os.str(), err);
  }
  return value;
}

double rotating_upsilon(const Eigen::Vector3d& x, const PhysicalParams& p,
                        const RotationProfile& prof) {
  const CylPoint c = to_cyl(x);
  const double r = c.r();
  require_outside_planet(r, p);
  return p.gm0 * (1.0 / r - 1.0 / p.r_cap) + profile_integral(c.varpi, p, prof);
}

double kappa_of(const PhysicalParams& p) {
  return p.omega * p.omega * p.r0 * p.r0 * p.r0 / (2.0 * p.gm0);
}

double kappa_tilde(double x_sq, const PhysicalParams& p, const RotationProfile& prof) {
  if (!(x_sq > 0.0)) throw DomainError("kappa_tilde needs X^2 > 0");
  const double varpi = p.r0 * std::sqrt(x_sq);
  return p.r0 / p.gm0 * profile_integral(varpi, p, prof) / x_sq;
}

AdmissibilityReport check_admissibility(const PhysicalParams& p, const RotationProfile* prof) {
  if (!(p.r_cap > p.r0)) throw DomainError("admissibility needs r_cap > r0");
  AdmissibilityReport rep;
  const double ratio = p.r_cap / p.r0;
  if (prof != nullptr && !prof->is_zero()) {
    const double s = prof->sup_norm(p);
    rep.value = p.r_cap * p.r_cap * p.r_cap * s * s / (2.0 * p.gm0);
  } else {
    rep.value = ratio * ratio * ratio * kappa_of(p);
  }
  rep.margin = 4.0 / 27.0 - rep.value;
  rep.condition_k = rep.value < 4.0 / 27.0;
  const double om2 = p.omega * p.omega;
  rep.r1 = om2 == 0.0 ? std::numeric_limits<double>::infinity()
                      : (2.0 / 3.0) * std::cbrt(p.gm0 / om2);
  rep.omega_max_sq = 4.0 / 9.0 * p.gm0 / (p.r0 * p.r0 * p.r0);
  return rep;
}

double pole_density(const PhysicalParams& p) {
  if (p.r_cap < p.r0) throw DomainError("pole density needs r_cap >= r0");
  const double up = p.gm0 * (1.0 / p.r0 - 1.0 / p.r_cap);
  return rho_of_upsilon(up, p);
}

StationaryState::StationaryState(PhysicalParams p, RotationProfile prof)
    : p_(p), prof_(std::move(prof)), kappa_(kappa_of(p)) {
  p_.validate_with_cap();
}

double StationaryState::upsilon(CylPoint x) const {
  const double r = x.r();
  require_outside_planet(r, p_);
  return p_.gm0 * (1.0 / r - 1.0 / p_.r_cap) + profile_integral(x.varpi, p_, prof_);
}

Eigen::Vector2d StationaryState::grad_upsilon(CylPoint x) const {
  const double r = x.r();
  require_outside_planet(r, p_);
  const double w = prof_(x.varpi) + p_.omega;
  const double r3 = r * r * r;
  return {-p_.gm0 * x.varpi / r3 + w * w * x.varpi, -p_.gm0 * x.z / r3};
}

double StationaryState::rho(CylPoint x) const {
  if (x.varpi >= 1.5 * p_.r_cap) return 0.0;
  return rho_of_upsilon(upsilon(x), p_);
}

Eigen::Vector2d StationaryState::grad_rho(CylPoint x) const {
  if (x.varpi >= 1.5 * p_.r_cap) return Eigen::Vector2d::Zero();
  const double u = upsilon(x);
  if (!(u > 0.0)) return Eigen::Vector2d::Zero();
  // d rho / d Upsilon = rho / ((gamma - 1) Upsilon)
  const double drho = rho_of_upsilon(u, p_) / ((p_.gamma - 1.0) * u);
  return drho * grad_upsilon(x);
}

double StationaryState::sigma_bar(CylPoint x) const {
  const double r = rho(x);
  if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
  return p_.a_const * p_.gamma * std::pow(r, p_.gamma - 2.0);
}

}  // namespace rotatm
