#pragma once

#include "rotatm/atmosphere.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace rotatm {

/// Time-dependent velocity field with its spatial Jacobian D_x v.
struct VelocityField {
  std::string name;
  std::function<Eigen::Vector3d(double, const Eigen::Vector3d&)> velocity;
  std::function<Eigen::Matrix3d(double, const Eigen::Vector3d&)> jacobian;
  /// Where the field may be evaluated; empty means everywhere.
  std::function<bool(const Eigen::Vector3d&)> evaluable;

  double divergence(double t, const Eigen::Vector3d& x) const { return jacobian(t, x).trace(); }
};

/// v = w0 (-y, x, 0).
VelocityField rigid_rotation(double w0);
/// v = x.
VelocityField radial_field();
/// v = varpi w(varpi) e_phi for a smooth angular profile w with derivative dw.
VelocityField tangential_profile(std::function<double(double)> w, std::function<double(double)> dw);
/// Looks up "rigid", "radial" or "zero" (with rate w0 for rigid).
VelocityField field_by_name(const std::string& name, double w0 = 1.0);

struct FlowResult {
  std::vector<double> times;
  std::vector<Eigen::Vector3d> positions;
  std::vector<Eigen::Matrix3d> jacobians;
  std::vector<double> determinants;
  double dt = 0.0;
  std::string integrator = "rk4";

  const Eigen::Vector3d& final_position() const { return positions.back(); }
  const Eigen::Matrix3d& final_jacobian() const { return jacobians.back(); }
};

/// Classical RK4 on dx/dt = v(t,x) together with d(Dphi)/dt = (D_x v o phi) Dphi.
/// The last step is shortened to land exactly on t_final.
FlowResult integrate_flow(const VelocityField& v, const Eigen::Vector3d& seed, double t_final,
                          double dt);

/// Upsilon carried along a trajectory: Upsilon0 * det(Dphi)^-(gamma-1).
double lagrangian_upsilon(double upsilon0, double det_dphi, double gamma);

struct InverseFlowResult {
  Eigen::Vector3d preimage;
  int iterations = 0;
  double residual = 0.0;     ///< |phi(t, x_bar) - x|
  double lipschitz = 0.0;    ///< largest estimated |I - Dphi| seen
};

/// Solves phi(t, x_bar) = x by the fixed-point map x_bar <- x + x_bar - phi(t, x_bar).
/// Requires the estimated spectral norm of I - Dphi to stay <= contraction_limit.
InverseFlowResult inverse_flow(const VelocityField& v, double t, const Eigen::Vector3d& x,
                               double dt, double tol = 1e-10, int max_iter = 200,
                               double contraction_limit = 0.5);

/// Largest singular value of M by power iteration on M^T M.
double spectral_norm_estimate(const Eigen::Matrix3d& m, int iterations = 50);

/// max over seeds and steps of | |phi(t, x_bar)| - R0 |.
double boundary_invariance_check(const VelocityField& v,
                                 const std::vector<Eigen::Vector3d>& seeds, double r0,
                                 double t_final, double dt);

}  // namespace rotatm
