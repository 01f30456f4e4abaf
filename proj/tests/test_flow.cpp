#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rotatm/errors.hpp"
#include "rotatm/flow.hpp"

#include <cmath>

using namespace rotatm;

namespace {

Eigen::Matrix3d rotation_z(double angle) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 0) = std::cos(angle);
  m(0, 1) = -std::sin(angle);
  m(1, 0) = std::sin(angle);
  m(1, 1) = std::cos(angle);
  return m;
}

// v = (y z, x^2, -z): polynomial, non-uniform Jacobian.
VelocityField polynomial_field() {
  VelocityField f;
  f.name = "poly";
  f.velocity = [](double, const Eigen::Vector3d& x) {
    return Eigen::Vector3d(0.3 * x.y() * x.z(), 0.2 * x.x() * x.x(), -0.5 * x.z());
  };
  f.jacobian = [](double, const Eigen::Vector3d& x) {
    Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
    j(0, 1) = 0.3 * x.z();
    j(0, 2) = 0.3 * x.y();
    j(1, 0) = 0.4 * x.x();
    j(2, 2) = -0.5;
    return j;
  };
  return f;
}

}  // namespace

TEST_CASE("rigid rotation flow") {
  const double w0 = 0.7;
  const Eigen::Vector3d seed(1.2, -0.4, 0.5);
  const FlowResult fr = integrate_flow(rigid_rotation(w0), seed, 1.0, 1e-3);
  CHECK(fr.times.front() == 0.0);
  CHECK(fr.positions.front() == seed);
  CHECK(fr.jacobians.front() == Eigen::Matrix3d::Identity());
  CHECK(fr.times.back() == 1.0);
  CHECK((fr.final_position() - rotation_z(w0) * seed).norm() <= 1e-10);
  CHECK(std::abs(fr.determinants.back() - 1.0) <= 1e-10);
  CHECK(std::abs(fr.final_position().norm() - seed.norm()) <= 1e-10);
}

TEST_CASE("radial field flow") {
  const Eigen::Vector3d seed(0.3, 0.2, -0.1);
  const FlowResult fr = integrate_flow(radial_field(), seed, 1.0, 1e-3);
  CHECK((fr.final_position() - std::exp(1.0) * seed).norm() <= 1e-8);
  CHECK(std::abs(fr.determinants.back() - std::exp(3.0)) <= 1e-8 * std::exp(3.0));
}

TEST_CASE("zero field is exact") {
  const Eigen::Vector3d seed(0.3, 0.2, -0.1);
  const FlowResult fr = integrate_flow(field_by_name("zero"), seed, 2.0, 0.1);
  CHECK(fr.final_position() == seed);
  CHECK(fr.final_jacobian() == Eigen::Matrix3d::Identity());
}

TEST_CASE("escape and argument errors") {
  VelocityField v = radial_field();
  v.evaluable = [](const Eigen::Vector3d& x) { return x.norm() < 2.0; };
  try {
    integrate_flow(v, Eigen::Vector3d(1.0, 0.0, 0.0), 2.0, 1e-2);
    FAIL("expected escape");
  } catch (const FlowError& e) {
    CHECK(e.kind() == "escape");
    CHECK(e.time() == doctest::Approx(std::log(2.0)).epsilon(0.02));
  }
  CHECK_THROWS_AS(integrate_flow(v, Eigen::Vector3d::Zero(), 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(field_by_name("nope"), DomainError);
}

TEST_CASE("Jacobian matches finite differences of the flow map") {
  for (const VelocityField& v : {rigid_rotation(1.3), polynomial_field()}) {
    const Eigen::Vector3d seed(0.4, -0.3, 0.6);
    const double t = 0.8;
    const double dt = 1e-3;
    const Eigen::Matrix3d jac = integrate_flow(v, seed, t, dt).final_jacobian();
    Eigen::Matrix3d fd;
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(k) = h;
      fd.col(k) = (integrate_flow(v, seed + e, t, dt).final_position() -
                   integrate_flow(v, seed - e, t, dt).final_position()) / (2 * h);
    }
    CHECK((jac - fd).norm() <= 1e-6 * jac.norm());
  }
}

TEST_CASE("log det equals the integrated divergence") {
  const VelocityField v = polynomial_field();
  const FlowResult fr = integrate_flow(v, Eigen::Vector3d(0.4, -0.3, 0.6), 1.0, 1e-3);
  // trapezoid on the div samples is second order; use Simpson on the fine grid
  double integral = 0.0;
  const std::size_t n = fr.times.size() - 1;
  REQUIRE(n % 2 == 0);
  for (std::size_t k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    integral += w * v.divergence(fr.times[k], fr.positions[k]);
  }
  integral *= fr.dt / 3.0;
  CHECK(std::abs(std::log(fr.determinants.back()) - integral) <= 1e-8);
}

TEST_CASE("lagrangian upsilon") {
  CHECK(lagrangian_upsilon(0.7, 1.0, 1.4) == 0.7);
  CHECK(lagrangian_upsilon(0.0, 5.0, 1.4) == 0.0);
  const FlowResult fr = integrate_flow(radial_field(), Eigen::Vector3d(0.1, 0.2, 0.3), 1.0, 1e-3);
  const double ul = lagrangian_upsilon(1.0, fr.determinants.back(), 1.4);
  CHECK(std::abs(ul - std::exp(-1.2)) <= 1e-7);
  CHECK(ul == doctest::Approx(0.301194).epsilon(1e-6));
  CHECK_THROWS_AS(lagrangian_upsilon(1.0, 0.0, 1.4), FlowError);
}

TEST_CASE("lagrangian continuity on a manufactured solution") {
  // Under v = a(t) x the density rho(t, x) = rho0(x / s(t)) / s(t)^3 with
  // s' = a s solves the continuity equation; Upsilon is carried with det^-(gamma-1).
  const double gamma = 1.4;
  VelocityField v;
  v.name = "dilation";
  v.velocity = [](double t, const Eigen::Vector3d& x) { return (0.5 * std::cos(t)) * x; };
  v.jacobian = [](double t, const Eigen::Vector3d&) {
    return (0.5 * std::cos(t) * Eigen::Matrix3d::Identity()).eval();
  };
  auto upsilon0 = [](const Eigen::Vector3d& x) { return 1.0 - 0.2 * x.squaredNorm(); };
  for (double t : {0.3, 1.0, 2.0}) {
    const Eigen::Vector3d seed(0.4, 0.1, -0.5);
    const FlowResult fr = integrate_flow(v, seed, t, 1e-3);
    const double s = std::exp(0.5 * std::sin(t));
    const double exact = upsilon0(fr.final_position() / s) * std::pow(s, -3.0 * (gamma - 1.0));
    CHECK(std::abs(lagrangian_upsilon(upsilon0(seed), fr.determinants.back(), gamma) - exact) <= 1e-7);
  }
}

TEST_CASE("inverse flow") {
  const double w0 = 0.9;
  const Eigen::Vector3d x(1.1, 0.3, -0.2);
  const auto inv0 = inverse_flow(rigid_rotation(w0), 0.0, x, 1e-3);
  CHECK(inv0.iterations == 0);
  CHECK(inv0.preimage == x);

  const double t = 0.2;
  const auto inv = inverse_flow(rigid_rotation(w0), t, x, 1e-3);
  CHECK((inv.preimage - rotation_z(-w0 * t) * x).norm() <= 1e-9);
  CHECK(inv.residual <= 1e-10);

  const auto rad = inverse_flow(radial_field(), 0.01, x, 1e-3);
  CHECK((rad.preimage - std::exp(-0.01) * x).norm() <= 1e-9);

  try {
    inverse_flow(rigid_rotation(w0), 2.0, x, 1e-3);
    FAIL("expected no-contraction");
  } catch (const FlowError& e) {
    CHECK(e.kind() == "no-contraction");
  }
}

TEST_CASE("inverse flow round trip on a seed set") {
  const VelocityField v = polynomial_field();
  const double t = 0.3;
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector3d seed(0.1 * i - 0.4, 0.3 - 0.05 * i, 0.2 + 0.03 * i);
    const Eigen::Vector3d x = integrate_flow(v, seed, t, 1e-3).final_position();
    const auto inv = inverse_flow(v, t, x, 1e-3);
    CHECK((inv.preimage - seed).norm() <= 1e-9);
  }
}

TEST_CASE("boundary invariance") {
  std::vector<Eigen::Vector3d> seeds;
  for (int i = 0; i < 12; ++i) {
    const double th = M_PI * (i + 0.5) / 12.0;
    const double ph = 2.0 * M_PI * i / 12.0;
    seeds.emplace_back(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  }
  CHECK(boundary_invariance_check(rigid_rotation(1.0), seeds, 1.0, 10.0, 1e-3) <= 1e-10);
  const VelocityField tang = tangential_profile([](double w) { return 0.5 + 0.3 * std::sin(w); },
                                                [](double w) { return 0.3 * std::cos(w); });
  CHECK(boundary_invariance_check(tang, seeds, 1.0, 5.0, 1e-3) <= 1e-8);
  const double t = 0.5;
  const double dev = boundary_invariance_check(radial_field(), seeds, 1.0, t, 1e-3);
  CHECK(dev == doctest::Approx(std::exp(t) - 1.0).epsilon(1e-8));
}
