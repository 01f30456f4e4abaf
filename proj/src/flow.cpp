#include "rotatm/flow.hpp"

#include "rotatm/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace rotatm {

namespace {

struct FlowStateVec {
  Eigen::Vector3d x;
  Eigen::Matrix3d m;
};

FlowStateVec rhs(const VelocityField& v, double t, const FlowStateVec& s) {
  return {v.velocity(t, s.x), v.jacobian(t, s.x) * s.m};
}

FlowStateVec axpy(const FlowStateVec& s, double h, const FlowStateVec& k) {
  return {s.x + h * k.x, s.m + h * k.m};
}

void check_evaluable(const VelocityField& v, const Eigen::Vector3d& x, double t) {
  if (v.evaluable && !v.evaluable(x)) {
    std::ostringstream os;
    os << "trajectory left the evaluable region of field '" << v.name << "' at t = " << t;
    throw FlowError("escape", os.str(), t);
  }
}

}  // namespace

VelocityField rigid_rotation(double w0) {
  VelocityField f;
  f.name = "rigid";
  f.velocity = [w0](double, const Eigen::Vector3d& x) {
    return Eigen::Vector3d(-w0 * x.y(), w0 * x.x(), 0.0);
  };
  f.jacobian = [w0](double, const Eigen::Vector3d&) {
    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
    j(0, 1) = -w0;
    j(1, 0) = w0;
    return j;
  };
  return f;
}

VelocityField radial_field() {
  VelocityField f;
  f.name = "radial";
  f.velocity = [](double, const Eigen::Vector3d& x) { return x; };
  f.jacobian = [](double, const Eigen::Vector3d&) { return Eigen::Matrix3d::Identity().eval(); };
  return f;
}

VelocityField tangential_profile(std::function<double(double)> w, std::function<double(double)> dw) {
  VelocityField f;
  f.name = "custom-profile";
  f.velocity = [w](double, const Eigen::Vector3d& x) {
    const double s = w(std::hypot(x.x(), x.y()));
    return Eigen::Vector3d(-s * x.y(), s * x.x(), 0.0);
  };
  f.jacobian = [w, dw](double, const Eigen::Vector3d& x) {
    const double varpi = std::hypot(x.x(), x.y());
    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
    const double s = w(varpi);
    j(0, 1) = -s;
    j(1, 0) = s;
    if (varpi > 0.0) {
      const Eigen::Vector3d dir(-x.y(), x.x(), 0.0);
      const Eigen::Vector3d grad_varpi(x.x() / varpi, x.y() / varpi, 0.0);
      j += dw(varpi) * dir * grad_varpi.transpose();
    }
    return j;
  };
  return f;
}

VelocityField field_by_name(const std::string& name, double w0) {
  if (name == "rigid") return rigid_rotation(w0);
  if (name == "radial") return radial_field();
  if (name == "zero") {
    VelocityField f;
    f.name = "zero";
    f.velocity = [](double, const Eigen::Vector3d&) { return Eigen::Vector3d::Zero().eval(); };
    f.jacobian = [](double, const Eigen::Vector3d&) { return Eigen::Matrix3d::Zero().eval(); };
    return f;
  }
  throw DomainError("unknown velocity field '" + name + "'");
}

FlowResult integrate_flow(const VelocityField& v, const Eigen::Vector3d& seed, double t_final,
                          double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(t_final >= 0.0)) throw DomainError("t_final must be nonnegative");
  FlowResult out;
  out.dt = dt;
  FlowStateVec s{seed, Eigen::Matrix3d::Identity()};
  double t = 0.0;
  check_evaluable(v, s.x, t);
  out.times.push_back(t);
  out.positions.push_back(s.x);
  out.jacobians.push_back(s.m);
  out.determinants.push_back(1.0);

  const long steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  for (long k = 0; k < steps; ++k) {
    const double h = std::min(dt, t_final - t);
    if (h <= 0.0) break;
    const FlowStateVec k1 = rhs(v, t, s);
    const FlowStateVec k2 = rhs(v, t + 0.5 * h, axpy(s, 0.5 * h, k1));
    const FlowStateVec k3 = rhs(v, t + 0.5 * h, axpy(s, 0.5 * h, k2));
    const FlowStateVec k4 = rhs(v, t + h, axpy(s, h, k3));
    s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.m += h / 6.0 * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
    t = (k + 1 == steps) ? t_final : t + h;
    check_evaluable(v, s.x, t);
    const double det = s.m.determinant();
    if (!(det > 0.0)) {
      std::ostringstream os;
      os << "flow Jacobian lost positivity at t = " << t;
      throw FlowError("singular-flow", os.str(), t);
    }
    out.times.push_back(t);
    out.positions.push_back(s.x);
    out.jacobians.push_back(s.m);
    out.determinants.push_back(det);
  }
  return out;
}

double lagrangian_upsilon(double upsilon0, double det_dphi, double gamma) {
  if (!(det_dphi > 0.0)) throw FlowError("singular-flow", "flow Jacobian determinant must be positive");
  return upsilon0 * std::pow(det_dphi, -(gamma - 1.0));
}

double spectral_norm_estimate(const Eigen::Matrix3d& m, int iterations) {
  const Eigen::Matrix3d mtm = m.transpose() * m;
  Eigen::Vector3d x(1.0, 0.7, 0.3);
  double lambda = 0.0;
  for (int i = 0; i < iterations; ++i) {
    const Eigen::Vector3d y = mtm * x;
    const double n = y.norm();
    if (n == 0.0) return 0.0;
    lambda = x.dot(y) / x.squaredNorm();
    x = y / n;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

InverseFlowResult inverse_flow(const VelocityField& v, double t, const Eigen::Vector3d& x,
                               double dt, double tol, int max_iter, double contraction_limit) {
  InverseFlowResult res;
  res.preimage = x;
  if (t == 0.0) return res;
  Eigen::Vector3d xb = x;
  for (int it = 0; it <= max_iter; ++it) {
    const FlowResult fr = integrate_flow(v, xb, t, dt);
    const double lip = spectral_norm_estimate(Eigen::Matrix3d::Identity() - fr.final_jacobian());
    res.lipschitz = std::max(res.lipschitz, lip);
    if (lip > contraction_limit) {
      std::ostringstream os;
      os << "inverse flow is not a contraction (|I - Dphi| ~ " << lip << ")";
      throw FlowError("no-contraction", os.str(), t);
    }
    const Eigen::Vector3d defect = fr.final_position() - x;
    res.residual = defect.norm();
    res.preimage = xb;
    res.iterations = it;
    if (res.residual <= tol) return res;
    xb -= defect;
  }
  throw NumericError("inverse flow did not converge within the iteration cap", res.residual);
}

double boundary_invariance_check(const VelocityField& v,
                                 const std::vector<Eigen::Vector3d>& seeds, double r0,
                                 double t_final, double dt) {
  double worst = 0.0;
  for (const auto& seed : seeds) {
    const FlowResult fr = integrate_flow(v, seed, t_final, dt);
    for (const auto& p : fr.positions) worst = std::max(worst, std::abs(p.norm() - r0));
  }
  return worst;
}

}  // namespace rotatm
