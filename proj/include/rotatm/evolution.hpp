#pragma once

#include "rotatm/assembly.hpp"
#include "rotatm/spectrum.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <functional>
#include <limits>
#include <vector>

namespace rotatm {

/// Discrete first-order system for A xi'' - i B xi' + C xi = F, so that
/// xi = e^{i sigma t} X solves it exactly when X is a pencil eigenvector.
struct EvolutionState {
  Eigen::VectorXcd xi;
  Eigen::VectorXcd xi_dot;
  double t = 0.0;
};

/// Load vector F(t) in the Galerkin (dual) space of the basis.
using Forcing = std::function<Eigen::VectorXcd(double)>;

struct EnergyPair {
  double e = 0.0;       ///< xi^H (A + C) xi + xi_dot^H A xi_dot
  double e_phys = 0.0;  ///< xi^H C xi + xi_dot^H A xi_dot
};

EnergyPair energy(const EvolutionState& s, const PencilMatrices& pm);

/// Implicit midpoint on U' = -AU + F in A-orthonormal coordinates with a prefactorized matrix.
/// A negative dt runs backward in time.
class MidpointStepper {
 public:
  MidpointStepper(const PencilMatrices& pm, double dt);

  double dt() const { return dt_; }
  const OrthoPencil& ortho() const { return op_; }

  /// State (y, v) = (L^H xi, L^H xi_dot).
  Eigen::VectorXcd pack(const EvolutionState& s) const;
  EvolutionState unpack(const Eigen::VectorXcd& u, double t) const;

  /// One step of the packed state from time t; forcing evaluated at the midpoint.
  Eigen::VectorXcd advance(const Eigen::VectorXcd& u, double t, const Forcing& f = {}) const;
  EvolutionState step(const EvolutionState& s, const Forcing& f = {}) const;

  /// E and E_phys of a packed state.
  EnergyPair packed_energy(const Eigen::VectorXcd& u) const;
  /// Energy norm of the forcing, |L^-1 F(t)|.
  double forcing_norm(const Forcing& f, double t) const;

 private:
  OrthoPencil op_;
  double dt_;
  int n_;
  Eigen::MatrixXcd plus_;  ///< I - dt/2 A
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;  ///< I + dt/2 A
};

EvolutionState step(const EvolutionState& s, double dt, const PencilMatrices& pm,
                    const Forcing& f = {});

struct EnergySample {
  double t = 0.0;
  double e = 0.0;
  double e_phys = 0.0;
  double bound = 0.0;  ///< e^{Lambda t}(sqrt E(0) + int e^{-Lambda s}|f| ds), compared to sqrt E
};

struct EvolutionReport {
  EvolutionState final_state;
  std::vector<EnergySample> log;
  std::vector<EvolutionState> trajectory;  ///< only when requested
  double lambda = 1.0;   ///< max(1, beta_d)
  double beta_d = 0.0;
  double two_omega = 0.0;
  bool bound_ok = true;
  double first_violation = std::numeric_limits<double>::quiet_NaN();
  double max_phys_drift = 0.0;  ///< max |E_phys(t) - E_phys(0)| / E_phys(0)
  long steps = 0;
};

struct EvolveOptions {
  int log_every = 1;
  bool keep_trajectory = false;
  double bound_slack = 1e-12;  ///< relative slack for rounding in the bound comparison
};

EvolutionReport evolve(const EvolutionState& u0, double t_final, double dt,
                       const PencilMatrices& pm, const Forcing& f = {},
                       const EvolveOptions& opts = {});

}  // namespace rotatm
