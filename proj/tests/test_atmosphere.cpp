#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rotatm/atmosphere.hpp"
#include "rotatm/errors.hpp"
#include "rotatm/geometry.hpp"

#include <cmath>

using namespace rotatm;

namespace {
PhysicalParams ref() { return PhysicalParams::reference(); }
}

TEST_CASE("upsilon_of_rho examples") {
  const PhysicalParams p = ref();
  CHECK(upsilon_of_rho(0.0, p) == 0.0);
  CHECK(upsilon_of_rho(1.0, p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(upsilon_of_rho(-1.0, p), DomainError);
  for (int i = 1; i <= 1000; ++i) {
    const double rho = 0.01 * i;
    const double back = rho_of_upsilon(upsilon_of_rho(rho, p), p);
    CHECK(std::abs(back - rho) <= 1e-12 * rho);
  }
  // strictly increasing
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double u = upsilon_of_rho(0.1 * i, p);
    CHECK(u > prev);
    prev = u;
  }
}

TEST_CASE("rho_of_upsilon examples") {
  const PhysicalParams p = ref();
  CHECK(rho_of_upsilon(-3.0, p) == 0.0);
  CHECK(rho_of_upsilon(0.0, p) == 0.0);
  CHECK(rho_of_upsilon(0.5, p) == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-14));
  CHECK(rho_of_upsilon(0.5, p) == doctest::Approx(0.176777).epsilon(1e-6));
}

TEST_CASE("geopotential examples") {
  PhysicalParams p = ref();
  p.omega = 0.0;
  CHECK(geopotential({2.0, 0.0, 0.0}, p) == doctest::Approx(-0.5));
  const Eigen::Vector3d axis(0.0, 0.0, 1.7);
  const double v0 = geopotential(axis, p);
  p.omega = 3.0;
  CHECK(geopotential(axis, p) == v0);
  p = ref();
  CHECK(geopotential({1.5, 0.0, 0.0}, p) == doctest::Approx(-1.0 / 1.5 - 0.01 * 2.25).epsilon(1e-14));
  CHECK(geopotential({1.5, 0.0, 0.0}, p) == doctest::Approx(-0.689167).epsilon(1e-6));
  CHECK_THROWS_AS(geopotential({0.5, 0.0, 0.0}, p), DomainError);
  CHECK_THROWS_AS(geopotential({1.0, 0.0, 0.0}, p), DomainError);
}

TEST_CASE("static_upsilon examples") {
  const PhysicalParams p = ref();
  CHECK(std::abs(static_upsilon(CylPoint{0.0, 2.0}, p)) <= 1e-15);
  CHECK(static_upsilon(CylPoint{0.0, 1.0 + 1e-15}, p) ==
        doctest::Approx(p.gm0 * (1.0 / p.r0 - 1.0 / p.r_cap)).epsilon(1e-12));
  CHECK(static_upsilon(CylPoint{1.2, 0.0}, p) == doctest::Approx(0.347733).epsilon(1e-6));
  CHECK_THROWS_AS(static_upsilon(CylPoint{0.0, 1.0}, p), DomainError);
}

TEST_CASE("rotating_upsilon matches closed forms") {
  const PhysicalParams p = ref();
  const std::vector<Eigen::Vector3d> pts = {{1.2, 0.3, 0.1}, {0.2, 0.1, 1.5}, {1.9, 0.4, -0.2}};
  const RotationProfile zero_like([](double) { return 0.0; });
  const RotationProfile cancel([&](double) { return -p.omega; });
  const double c = 0.3;
  const RotationProfile constant = RotationProfile::constant(c);
  for (const auto& x : pts) {
    CHECK(std::abs(rotating_upsilon(x, p, zero_like) - static_upsilon(x, p)) <= 1e-10);
    CHECK(std::abs(rotating_upsilon(x, p, RotationProfile::none()) - static_upsilon(x, p)) <= 1e-15);
    const double r = x.norm();
    CHECK(std::abs(rotating_upsilon(x, p, cancel) - p.gm0 * (1.0 / r - 1.0 / p.r_cap)) <= 1e-10);
    const double w2 = x.x() * x.x() + x.y() * x.y();
    CHECK(std::abs(profile_integral(std::sqrt(w2), p, constant) -
                   0.5 * (c + p.omega) * (c + p.omega) * w2) <= 1e-10);
  }
}

TEST_CASE("kappa examples") {
  PhysicalParams p = ref();
  CHECK(kappa_of(p) == doctest::Approx(0.01).epsilon(1e-14));
  p.omega = 0.0;
  CHECK(kappa_of(p) == 0.0);
  p.omega = std::sqrt(check_admissibility(ref()).omega_max_sq);
  CHECK(kappa_of(p) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("kappa_tilde") {
  const PhysicalParams p = ref();
  const RotationProfile zero_like([](double) { return 0.0; });
  for (double x2 : {0.1, 1.0, 2.5, 4.0}) {
    CHECK(kappa_tilde(x2, p, zero_like) == doctest::Approx(kappa_of(p)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(kappa_tilde(0.0, p, zero_like), DomainError);
  const double c = 0.2;
  const RotationProfile constant = RotationProfile::constant(c);
  double sup = 0.0;
  for (int i = 1; i <= 50; ++i) sup = std::max(sup, kappa_tilde(0.1 * i, p, constant));
  CHECK(sup == doctest::Approx(p.r0 * p.r0 * p.r0 * (c + p.omega) * (c + p.omega) / (2.0 * p.gm0))
                   .epsilon(1e-10));
  // smooth cutoff omega = -Omega for varpi beyond 1: kappa_tilde nonincreasing, X^2 kappa_tilde nondecreasing
  const RotationProfile cutoff(
      [&](double w) { return -p.omega * 0.5 * (1.0 + std::tanh(8.0 * (w - 1.0))); });
  double prev_kt = 1e300;
  double prev_prod = -1.0;
  for (int i = 1; i <= 60; ++i) {
    const double x2 = 0.05 * i;
    const double kt = kappa_tilde(x2, p, cutoff);
    CHECK(kt <= prev_kt + 1e-12);
    CHECK(kt * x2 >= prev_prod - 1e-12);
    prev_kt = kt;
    prev_prod = kt * x2;
  }
  CHECK(kappa_tilde(1e-4, p, cutoff) >= prev_kt);
}

TEST_CASE("check_admissibility examples") {
  const auto rep = check_admissibility(ref());
  CHECK(rep.condition_k);
  CHECK(rep.value == doctest::Approx(0.08).epsilon(1e-14));
  CHECK(rep.margin == doctest::Approx(0.068148).epsilon(1e-5));
  CHECK(rep.r1 == doctest::Approx(2.456020999093591).epsilon(1e-12));
  CHECK(rep.omega_max_sq == doctest::Approx(4.0 / 9.0));
  PhysicalParams p = ref();
  p.omega = 0.0;
  const auto still = check_admissibility(p);
  CHECK(still.condition_k);
  CHECK(std::isinf(still.r1));
  p.r_cap = p.r0;
  CHECK_THROWS_AS(check_admissibility(p), DomainError);
}

TEST_CASE("admissibility is monotone in Omega") {
  PhysicalParams p = ref();
  bool seen_bad = false;
  for (int i = 0; i <= 200; ++i) {
    p.omega = 0.005 * i;
    const bool ok = check_admissibility(p).condition_k;
    if (seen_bad) CHECK_FALSE(ok);
    if (!ok) seen_bad = true;
  }
  CHECK(seen_bad);
}

TEST_CASE("pole density") {
  PhysicalParams p = ref();
  CHECK(pole_density(p) == doctest::Approx(0.176777).epsilon(1e-6));
  CHECK(pole_density(p) == rho_of_upsilon(p.gm0 * (1.0 / p.r0 - 1.0 / p.r_cap), p));
  p.r_cap = p.r0;
  CHECK(pole_density(p) == 0.0);
  p.r_cap = 0.5;
  CHECK_THROWS_AS(pole_density(p), DomainError);
}

TEST_CASE("parameter validation") {
  PhysicalParams p = ref();
  p.gamma = 2.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = ref();
  p.r_cap = 0.9;
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS(p.validate_with_cap(), DomainError);
}

TEST_CASE("stationary state: positivity on the inner sphere and symmetry") {
  const StationaryState st(ref());
  for (int i = 0; i <= 64; ++i) {
    const double th = M_PI * i / 64.0;
    const double r = 1.0 + 1e-12;
    const CylPoint x{r * std::sin(th), r * std::cos(th)};
    CHECK(st.upsilon(x) > 0.0);
    CHECK(st.rho(x) > 0.0);
    const CylPoint mirrored{x.varpi, -x.z};
    CHECK(st.upsilon(x) == st.upsilon(mirrored));
  }
  for (int i = 0; i < 200; ++i) {
    const CylPoint x{0.02 * i, 1.1 + 0.01 * i};
    CHECK(st.rho(x) >= 0.0);
  }
}

TEST_CASE("static upsilon vanishes on the traced vacuum boundary") {
  const PhysicalParams p = ref();
  const LevelSetAnalysis a = analyze_level_set(p);
  const double xmax = std::sqrt(a.roots->q_minus);
  for (int i = 0; i < 100; ++i) {
    const double x = xmax * i / 99.0;
    const double z = boundary_curve(x, a);
    const double u = static_upsilon(CylPoint{p.r0 * x, p.r0 * z}, p);
    CHECK(std::abs(u) <= 1e-10);
  }
}
