#include "rotatm/evolution.hpp"

#include "rotatm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rotatm {

namespace {

void check_state(const EvolutionState& s, int n) {
  if (s.xi.size() != n || s.xi_dot.size() != n)
    throw DomainError("state size does not match the pencil");
}

}  // namespace

EnergyPair energy(const EvolutionState& s, const PencilMatrices& pm) {
  check_state(s, pm.size());
  const double xa = s.xi.dot(pm.a * s.xi).real();
  const double xc = s.xi.dot(pm.c * s.xi).real();
  const double va = s.xi_dot.dot(pm.a * s.xi_dot).real();
  return {xa + xc + va, xc + va};
}

MidpointStepper::MidpointStepper(const PencilMatrices& pm, double dt)
    : op_(pm), dt_(dt), n_(pm.size()) {
  if (!std::isfinite(dt) || dt == 0.0) throw DomainError("time step must be nonzero and finite");
  const int n = n_;
  // A = [[0, -I], [Ch, -i Bh]]
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  big.topRightCorner(n, n) = -Eigen::MatrixXcd::Identity(n, n);
  big.bottomLeftCorner(n, n) = op_.c_hat();
  big.bottomRightCorner(n, n) = cplx(0.0, -1.0) * op_.b_hat();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
  plus_ = id - 0.5 * dt * big;
  lu_.compute(id + 0.5 * dt * big);
  const Eigen::VectorXcd diag = lu_.matrixLU().diagonal();
  if (!diag.allFinite() || diag.cwiseAbs().minCoeff() == 0.0)
    throw NumericError("midpoint matrix factorization failed");
}

Eigen::VectorXcd MidpointStepper::pack(const EvolutionState& s) const {
  check_state(s, n_);
  Eigen::VectorXcd u(2 * n_);
  u.head(n_) = op_.to_y(s.xi);
  u.tail(n_) = op_.to_y(s.xi_dot);
  return u;
}

EvolutionState MidpointStepper::unpack(const Eigen::VectorXcd& u, double t) const {
  return {op_.from_y(u.head(n_)), op_.from_y(u.tail(n_)), t};
}

Eigen::VectorXcd MidpointStepper::advance(const Eigen::VectorXcd& u, double t,
                                          const Forcing& f) const {
  Eigen::VectorXcd rhs = plus_ * u;
  if (f) {
    const Eigen::VectorXcd fm = f(t + 0.5 * dt_);
    if (fm.size() != n_) throw DomainError("forcing size does not match the pencil");
    rhs.tail(n_) += dt_ * op_.load_to_y(fm);
  }
  Eigen::VectorXcd out = lu_.solve(rhs);
  if (!out.allFinite()) throw NumericError("non-finite state after a step", t + dt_);
  return out;
}

EvolutionState MidpointStepper::step(const EvolutionState& s, const Forcing& f) const {
  return unpack(advance(pack(s), s.t, f), s.t + dt_);
}

EnergyPair MidpointStepper::packed_energy(const Eigen::VectorXcd& u) const {
  const auto y = u.head(n_);
  const auto v = u.tail(n_);
  const double yy = y.squaredNorm();
  const double yc = y.dot(op_.c_hat() * y).real();
  const double vv = v.squaredNorm();
  return {yy + yc + vv, yc + vv};
}

double MidpointStepper::forcing_norm(const Forcing& f, double t) const {
  if (!f) return 0.0;
  return op_.load_to_y(f(t)).norm();
}

EvolutionState step(const EvolutionState& s, double dt, const PencilMatrices& pm,
                    const Forcing& f) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  return MidpointStepper(pm, dt).step(s, f);
}

EvolutionReport evolve(const EvolutionState& u0, double t_final, double dt,
                       const PencilMatrices& pm, const Forcing& f, const EvolveOptions& opts) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!(t_final >= u0.t)) throw DomainError("final time precedes the initial time");
  const MidpointStepper st(pm, dt);
  EvolutionReport rep;
  rep.beta_d = st.ortho().beta();
  rep.lambda = std::max(1.0, rep.beta_d);
  rep.two_omega = 2.0 * std::abs(pm.omega);

  const long nsteps = std::lround(std::ceil((t_final - u0.t) / dt - 1e-9));
  Eigen::VectorXcd u = st.pack(u0);
  const EnergyPair e0 = st.packed_energy(u);
  const double sqrt_e0 = std::sqrt(std::max(e0.e, 0.0));
  double integral = 0.0;
  double fprev = st.forcing_norm(f, u0.t);
  const double lam = rep.lambda;

  auto record = [&](double t, const EnergyPair& e, double bound) {
    rep.log.push_back({t, e.e, e.e_phys, bound});
  };
  record(u0.t, e0, sqrt_e0);
  if (opts.keep_trajectory) rep.trajectory.push_back(u0);

  double t = u0.t;
  for (long k = 1; k <= nsteps; ++k) {
    u = st.advance(u, t, f);
    const double tn = u0.t + k * dt;
    const double fn = st.forcing_norm(f, tn);
    integral += 0.5 * dt * (std::exp(-lam * (t - u0.t)) * fprev + std::exp(-lam * (tn - u0.t)) * fn);
    fprev = fn;
    t = tn;
    const EnergyPair e = st.packed_energy(u);
    const double bound = std::exp(lam * (t - u0.t)) * (sqrt_e0 + integral);
    if (e.e < 0.0 || e.e_phys < -1e-12 * std::max(e.e, 1.0) ||
        std::sqrt(std::max(e.e, 0.0)) > bound * (1.0 + opts.bound_slack) + 1e-300) {
      if (rep.bound_ok) rep.first_violation = t;
      rep.bound_ok = false;
    }
    if (e0.e_phys > 0.0)
      rep.max_phys_drift = std::max(rep.max_phys_drift, std::abs(e.e_phys - e0.e_phys) / e0.e_phys);
    if (k % std::max(1, opts.log_every) == 0 || k == nsteps) record(t, e, bound);
    if (opts.keep_trajectory) rep.trajectory.push_back(st.unpack(u, t));
  }
  rep.steps = nsteps;
  rep.final_state = st.unpack(u, t);
  return rep;
}

}  // namespace rotatm
