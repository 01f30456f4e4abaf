#include "rotatm/geometry.hpp"

#include "rotatm/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rotatm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bisection on a sign change of f over [lo, hi] down to rel_tol * |hi|.
template <class F>
double bisect(F&& f, double lo, double hi, double rel_tol = 1e-12) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream os;
    os << "no sign change on [" << lo << ", " << hi << "]";
    throw NumericError(os.str());
  }
  for (int it = 0; it < 200 && (hi - lo) > rel_tol * std::max(std::abs(lo), std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// One Newton step, kept only if it stays inside [lo, hi] and reduces |g|.
double polish(double q, double kappa, double lambda, double lo, double hi) {
  const CubicValue v = cubic_g(q, kappa, lambda);
  if (v.derivative == 0.0) return q;
  const double next = q - v.value / v.derivative;
  if (!(next >= lo && next <= hi)) return q;
  return std::abs(cubic_g(next, kappa, lambda).value) < std::abs(v.value) ? next : q;
}

double root_in(double kappa, double lambda, double lo, double hi) {
  auto g = [&](double q) { return cubic_g(q, kappa, lambda).value; };
  const double q = bisect(g, lo, hi);
  return polish(q, kappa, lambda, lo, hi);
}

double q_infinity(double kappa, double lambda) {
  const double lo = lambda / kappa;
  double hi = 2.0 * lo;
  while (cubic_g(hi, kappa, lambda).value > 0.0) hi *= 2.0;
  return root_in(kappa, lambda, lo, hi);
}

void require_case_h(const LevelSetAnalysis& a, const char* what) {
  if (!a.bounded()) throw UnboundedDomainError(std::string(what) + ": level set is unbounded (case L)");
  if (a.case_label == LevelSetCase::M)
    throw GeometryError(std::string(what) + ": case M boundary has an equatorial corner");
}

}  // namespace

std::string to_string(LevelSetCase c) {
  switch (c) {
    case LevelSetCase::L: return "L";
    case LevelSetCase::M: return "M";
    case LevelSetCase::H: return "H";
    case LevelSetCase::H_degenerate_kappa0: return "H_degenerate_kappa0";
  }
  return "?";
}

CubicValue cubic_g(double q, double kappa, double lambda) {
  const double value = 1.0 - lambda * lambda * q + 2.0 * lambda * kappa * q * q -
                       kappa * kappa * q * q * q;
  const double derivative = (lambda - kappa * q) * (3.0 * kappa * q - lambda);
  return {value, derivative};
}

LevelSetCase classify_case(double kappa, double lambda) {
  if (!(kappa >= 0.0)) throw DomainError("kappa must be nonnegative");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
  if (kappa == 0.0) return LevelSetCase::H_degenerate_kappa0;
  // 4 lambda^3 against 27 kappa; equality up to a few ulps of the operands.
  const double lhs = 4.0 * lambda * lambda * lambda;
  const double rhs = 27.0 * kappa;
  const double tol = 16.0 * std::numeric_limits<double>::epsilon() * std::max(lhs, rhs);
  if (std::abs(lhs - rhs) <= tol) return LevelSetCase::M;
  return lhs > rhs ? LevelSetCase::H : LevelSetCase::L;
}

CubicRoots cubic_roots(double kappa, double lambda) {
  const LevelSetCase c = classify_case(kappa, lambda);
  switch (c) {
    case LevelSetCase::H_degenerate_kappa0:
      return {1.0 / (lambda * lambda), kInf, kInf};
    case LevelSetCase::L:
      throw UnboundedDomainError("case L: {F > lambda} is unbounded, no bounded roots");
    case LevelSetCase::M: {
      const double mid = lambda / (3.0 * kappa);
      return {mid, mid, q_infinity(kappa, lambda)};
    }
    case LevelSetCase::H: {
      const double mid = lambda / (3.0 * kappa);
      const double top = lambda / kappa;
      return {root_in(kappa, lambda, 0.0, mid), root_in(kappa, lambda, mid, top),
              q_infinity(kappa, lambda)};
    }
  }
  throw DomainError("unreachable");
}

LevelSetAnalysis analyze_level_set(double kappa, double lambda) {
  LevelSetAnalysis a;
  a.kappa = kappa;
  a.lambda = lambda;
  a.case_label = classify_case(kappa, lambda);
  if (a.case_label != LevelSetCase::L) a.roots = cubic_roots(kappa, lambda);
  return a;
}

LevelSetAnalysis analyze_level_set(const PhysicalParams& p) {
  p.validate_with_cap();
  return analyze_level_set(kappa_of(p), p.r0 / p.r_cap);
}

bool root_estimates_check(const LevelSetAnalysis& a) {
  require_case_h(a, "root_estimates_check");
  const double target = 1.5 / a.lambda;
  return std::sqrt(a.roots->q_minus) < target && target < std::sqrt(a.roots->q_plus);
}

double boundary_curve(double x, const LevelSetAnalysis& a) {
  require_case_h(a, "boundary_curve");
  const double xmax = std::sqrt(a.roots->q_minus);
  if (x < 0.0 || x > xmax * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "X = " << x << " outside [0, " << xmax << "]";
    throw DomainError(os.str());
  }
  const double q = std::min(x * x, a.roots->q_minus);
  const double g = std::max(cubic_g(q, a.kappa, a.lambda).value, 0.0);
  return std::sqrt(g) / (a.lambda - a.kappa * q);
}

double boundary_curve_slope(double x, const LevelSetAnalysis& a) {
  require_case_h(a, "boundary_curve_slope");
  const double q = x * x;
  const CubicValue g = cubic_g(q, a.kappa, a.lambda);
  if (!(g.value > 0.0)) return -kInf;
  const double den = a.lambda - a.kappa * q;
  const double sg = std::sqrt(g.value);
  return 2.0 * x * (g.derivative / (2.0 * sg * den) + a.kappa * sg / (den * den));
}

RadiusJet outer_radius_jet(double zeta, const LevelSetAnalysis& a) {
  require_case_h(a, "shape_map");
  if (zeta < -1.0 || zeta > 1.0) throw DomainError("zeta must lie in [-1, 1]");
  const double lam = a.lambda;
  const double k = a.kappa;
  const double c = 1.0 - zeta * zeta;
  if (k == 0.0) return {1.0 / lam, 0.0, 0.0};
  // At the poles (c = 0) the root is exactly 1/lambda.
  double rho = 1.0 / lam;
  if (c > 0.0) {
    auto F = [&](double r) { return 1.0 / r + k * r * r * c - lam; };
    const double lo = 1.0 / lam;
    const double hi = std::cbrt(1.0 / (2.0 * k * c));
    if (!(F(hi) < 0.0)) throw NumericError("shape map: no bracketing root along the ray");
    rho = bisect(F, lo, hi, 1e-14);
    const double fr = -1.0 / (rho * rho) + 2.0 * k * rho * c;
    if (fr != 0.0) {
      const double next = rho - F(rho) / fr;
      if (next >= lo && next <= hi && std::abs(F(next)) <= std::abs(F(rho))) rho = next;
    }
  }
  const double f_r = -1.0 / (rho * rho) + 2.0 * k * rho * c;
  const double f_z = -2.0 * k * rho * rho * zeta;
  const double f_rr = 2.0 / (rho * rho * rho) + 2.0 * k * c;
  const double f_rz = -4.0 * k * rho * zeta;
  const double f_zz = -2.0 * k * rho * rho;
  const double d1 = -f_z / f_r;
  const double d2 = -(f_rr * d1 * d1 + 2.0 * f_rz * d1 + f_zz) / f_r;
  return {rho, d1, d2};
}

double shape_map(double zeta_sq, const LevelSetAnalysis& a) {
  if (zeta_sq < 0.0 || zeta_sq > 1.0) throw DomainError("zeta^2 must lie in [0, 1]");
  return outer_radius_jet(std::sqrt(zeta_sq), a).rho * a.lambda;
}

BoundarySurface BoundarySurface::from_params(const PhysicalParams& p) {
  return {analyze_level_set(p), p.r0, p.r_cap};
}

bool domain_contains(CylPoint x, const StationaryState& state) {
  const PhysicalParams& p = state.params();
  if (!(x.r() > p.r0)) return false;
  if (!(x.varpi < 1.5 * p.r_cap)) return false;
  return state.upsilon(x) > 0.0;
}

bool domain_contains(const Eigen::Vector3d& x, const StationaryState& state) {
  return domain_contains(to_cyl(x), state);
}

double vacuum_normal_sign(CylPoint pt, const StationaryState& state, double tol) {
  const PhysicalParams& p = state.params();
  const LevelSetAnalysis a = analyze_level_set(state.kappa(), state.lambda());
  require_case_h(a, "vacuum_normal_sign");
  const double x = pt.varpi / p.r0;
  const double zabs = std::abs(pt.z) / p.r0;
  const double level = 1.0 / std::hypot(x, zabs) + a.kappa * x * x;
  if (std::abs(level - a.lambda) > tol) {
    std::ostringstream os;
    os << "point is not on the vacuum boundary (|F - lambda| = " << std::abs(level - a.lambda) << ")";
    throw DomainError(os.str());
  }
  // Outer normal of the upper half from the curve Z = f(X); mirrored below the equator.
  double nx = 0.0;
  double nz = 1.0;
  const double slope = x > 0.0 ? boundary_curve_slope(x, a) : 0.0;
  if (std::isfinite(slope) && zabs > 1e-10) {
    const double norm = std::sqrt(1.0 + slope * slope);
    nx = -slope / norm;
    nz = 1.0 / norm;
  } else if (x > 0.0) {
    nx = 1.0;
    nz = 0.0;
  }
  if (pt.z < 0.0) nz = -nz;
  const Eigen::Vector2d grad = state.grad_upsilon(pt);
  return grad.x() * nx + grad.y() * nz;
}

}  // namespace rotatm
