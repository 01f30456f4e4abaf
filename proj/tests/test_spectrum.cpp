#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rotatm/assembly.hpp"
#include "rotatm/errors.hpp"
#include "rotatm/geometry.hpp"
#include "rotatm/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

using namespace rotatm;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

PencilMatrices pencil(const MatrixXcd& a, const MatrixXcd& b, const MatrixXcd& c, double omega = 0.0) {
  PencilMatrices pm;
  pm.a = a;
  pm.b = b;
  pm.c = c;
  pm.omega = omega;
  return pm;
}

PencilMatrices scalar(double a, double b, double c) {
  return pencil(MatrixXcd::Constant(1, 1, a), MatrixXcd::Constant(1, 1, b), MatrixXcd::Constant(1, 1, c));
}

MatrixXcd random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

PencilMatrices random_pencil(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  const MatrixXcd x = random_matrix(n, rng);
  const MatrixXcd y = random_matrix(n, rng);
  const MatrixXcd z = random_matrix(n, rng);
  return pencil(x * x.adjoint() + MatrixXcd::Identity(n, n), 0.5 * (y + y.adjoint()), z * z.adjoint());
}

PencilMatrices reference_pencil(int m, double omega, int cs = 8, int cz = 16) {
  PhysicalParams p = PhysicalParams::reference();
  p.omega = omega;
  const StationaryState st(p);
  const MeridionalMesh mesh(st, m, cs, cz);
  return assemble_pencil(mesh, basis_fields(mesh), omega);
}

double min_singular(const MatrixXcd& m) {
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  return svd.singularValues().minCoeff();
}

std::vector<double> sorted_real(const VectorXcd& v) {
  std::vector<double> out;
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i).real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("scalar companion examples") {
  {
    const auto ev = sorted_real(companion_eigenvalues(companion_linearize(scalar(1, 0, 4))));
    REQUIRE(ev.size() == 2);
    CHECK(ev[0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-14));
  }
  {
    const auto ev = sorted_real(companion_eigenvalues(companion_linearize(scalar(1, 0.2, 0))));
    CHECK(std::abs(ev[0]) <= 1e-15);
    CHECK(ev[1] == doctest::Approx(0.2).epsilon(1e-14));
  }
  const SpectrumResult r = solve_pencil(scalar(1, 0, 4));
  CHECK(r.size() == 2);
  CHECK(r.sigma(0).real() == doctest::Approx(-2.0));
  CHECK(r.sigma(1).real() == doctest::Approx(2.0));
}

TEST_CASE("companion eigenvalues annihilate the determinant") {
  const PencilMatrices pm = random_pencil(5, 11);
  const VectorXcd ev = companion_eigenvalues(companion_linearize(pm));
  REQUIRE(ev.size() == 10);
  const double scale = pm.a.norm() + pm.b.norm() + pm.c.norm();
  for (int k = 0; k < ev.size(); ++k) {
    const cplx s = ev(k);
    const MatrixXcd p = -s * s * pm.a + s * pm.b + pm.c;
    CHECK(min_singular(p) <= 1e-8 * scale * (1.0 + std::norm(s)));
    CHECK(std::abs(s.imag()) <= 1e-8 * (1.0 + std::abs(s)));
  }
  const SpectrumResult r = solve_pencil(pm);
  const auto a = sorted_real(ev);
  const auto b = sorted_real(r.sigma);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-9 * (1.0 + std::abs(a[k])));
  CHECK(r.residuals.maxCoeff() <= 1e-8);
}

TEST_CASE("indefinite A is rejected") {
  const PencilMatrices pm = scalar(-1, 0, 1);
  try {
    companion_linearize(pm);
    FAIL("expected assembly-order");
  } catch (const Error& e) {
    CHECK(e.kind() == "assembly-order");
  }
  CHECK_THROWS_AS(OrthoPencil{pm}, Error);
}

TEST_CASE("non-rotating frequencies are square roots of the definite pair") {
  const PencilMatrices pm = reference_pencil(0, 0.0);
  CHECK(pm.b.cwiseAbs().maxCoeff() == 0.0);
  const SpectrumResult r = solve_pencil(pm);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> es(pm.c, pm.a, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd mu = es.eigenvalues();
  const double mumax = mu.maxCoeff();
  std::vector<double> expect;
  int zeros = 0;
  for (int i = 0; i < mu.size(); ++i) {
    if (mu(i) <= 1e-10 * mumax) {
      zeros += 2;
      continue;
    }
    expect.push_back(std::sqrt(mu(i)));
    expect.push_back(-std::sqrt(mu(i)));
  }
  std::sort(expect.begin(), expect.end());
  std::vector<double> got;
  for (int k = 0; k < r.size(); ++k)
    if (std::find(r.zero_cluster.begin(), r.zero_cluster.end(), k) == r.zero_cluster.end())
      got.push_back(r.sigma(k).real());
  REQUIRE(got.size() == expect.size());
  CHECK(static_cast<int>(r.zero_cluster.size()) == zeros);
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - expect[k]) <= 1e-10 * r.scale);
  CHECK(r.max_imag == 0.0);
  CHECK(reality_check(r).pass);
}

TEST_CASE("kernel-only basis gives the zero cluster") {
  const StationaryState st(PhysicalParams::reference());
  const MeridionalMesh mesh(st, 1, 8, 16);
  const auto basis = basis_fields(mesh, {BasisChoice::Kernel});
  const PencilMatrices pm = assemble_pencil(mesh, basis, 0.0);
  const SpectrumResult r = solve_pencil(pm);
  CHECK(r.kernel_dim == pm.size());
  for (int k = 0; k < r.size(); ++k) CHECK(std::abs(r.sigma(k)) <= 1e-8);
}

TEST_CASE("reality check is sensitive to an indefinite stiffness") {
  MatrixXcd c = MatrixXcd::Zero(2, 2);
  c(0, 0) = 1.0;
  c(1, 1) = -0.1;
  const PencilMatrices pm = pencil(MatrixXcd::Identity(2, 2), MatrixXcd::Zero(2, 2), c);
  const SpectrumResult r = solve_pencil(pm);
  CHECK(r.max_imag == doctest::Approx(std::sqrt(0.1)).epsilon(1e-10));
  CHECK(r.paired);
  CHECK_FALSE(reality_check(r).pass);
}

TEST_CASE("rotating reference spectrum is real and paired") {
  const double omega = PhysicalParams::reference().omega;
  for (int m : {0, 1}) {
    const PencilMatrices pm = reference_pencil(m, omega);
    const SpectrumResult r = solve_pencil(pm);
    CHECK(reality_check(r, 1e-8).pass);
    CHECK(r.residuals.maxCoeff() <= 1e-8);
    for (int k = 0; k < r.size(); ++k) {
      const RayleighCoefficients rc = rayleigh_coefficients(r.vectors.col(k), pm);
      CHECK(rc.a == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs(rc.b) <= 2.0 * omega * rc.a + 1e-10);
      CHECK(rc.c >= -1e-10 * pm.c.norm());
      CHECK(rc.discriminant() >= 0.0);
    }
  }
}

TEST_CASE("Rayleigh coefficients") {
  const double omega = PhysicalParams::reference().omega;
  const PencilMatrices pm = reference_pencil(1, omega);
  CHECK_THROWS_AS(rayleigh_coefficients(VectorXcd::Zero(pm.size()), pm), DomainError);

  const SpectrumResult r = solve_pencil(pm);
  for (int k = 0; k < r.size(); k += 7) {
    const RayleighCoefficients rc = rayleigh_coefficients(r.vectors.col(k), pm);
    const double s = r.sigma(k).real();
    const double v = -rc.a * s * s + rc.b * s + rc.c;
    CHECK(std::abs(v) <= 1e-8 * rc.a * (s * s + 2.0 * omega * std::abs(s) + pm.c.norm()));
  }

  const StationaryState st(PhysicalParams::reference());
  const MeridionalMesh mesh(st, 1, 8, 16);
  const auto basis = basis_fields(mesh);
  const auto it = std::find_if(basis.begin(), basis.end(),
                               [](const BasisField& f) { return f.family == BasisFamily::KernelPoloidal; });
  REQUIRE(it != basis.end());
  VectorXcd e = VectorXcd::Zero(pm.size());
  e(it - basis.begin()) = 1.0;
  const RayleighCoefficients kc = rayleigh_coefficients(e, pm);
  CHECK(std::abs(kc.c) <= 1e-10 * pm.c.norm());
  const double root = kc.b / kc.a;
  CHECK(std::abs(-kc.a * root * root + kc.b * root + kc.c) <= 1e-10 * pm.c.norm());

  const BasisField pol = custom_field(mesh, 2, 4, 3, 6, {cplx(1.0), cplx(0.0, 1.0), cplx(0.0)});
  const PencilMatrices pp = assemble_pencil(mesh, {pol}, omega);
  const RayleighCoefficients pc = rayleigh_coefficients(VectorXcd::Ones(1), pp);
  CHECK(pc.b == doctest::Approx(2.0 * omega * pc.a).epsilon(1e-13));
}

TEST_CASE("sigma functional") {
  RayleighCoefficients rc;
  rc.a = 1.0;
  rc.b = 0.0;
  rc.c = 4.0;
  CHECK(sigma_functional(rc, +1) == doctest::Approx(2.0));
  CHECK(sigma_functional(rc, -1) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(sigma_functional(rc, 0), DomainError);
  rc.c = -1.0;
  CHECK_THROWS_AS(sigma_functional(rc, +1), DomainError);

  const double omega = PhysicalParams::reference().omega;
  const PencilMatrices pm = reference_pencil(1, omega);
  const SpectrumResult r = solve_pencil(pm);
  for (int k = 0; k < r.size(); k += 5) {
    const VectorXcd xi = r.vectors.col(k);
    const RayleighCoefficients c = rayleigh_coefficients(xi, pm);
    const double s = r.sigma(k).real();
    const int br = branch_for(c, s);
    CHECK(std::abs(sigma_functional(xi, pm, br) - s) <= 1e-10 * std::max(1.0, r.scale));
    CHECK(sigma_functional(VectorXcd(3.0 * xi), pm, br) == doctest::Approx(sigma_functional(xi, pm, br)).epsilon(1e-12));
  }
}

TEST_CASE("stationarity of the functional") {
  const double omega = PhysicalParams::reference().omega;
  const PencilMatrices pm = reference_pencil(1, omega);
  const SpectrumResult r = solve_pencil(pm);
  int checked = 0;
  for (int k = 0; k < r.size() && checked < 5; ++k) {
    const double s = r.sigma(k).real();
    if (s <= 0.5) continue;
    const VectorXcd xi = r.vectors.col(k);
    const StationarityReport rep = stationarity_residual(xi, pm, branch_for(rayleigh_coefficients(xi, pm), s));
    CHECK(rep.normalized <= 1e-5);
    ++checked;
  }
  CHECK(checked == 5);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 5; ++t) {
    VectorXcd v(pm.size());
    for (int i = 0; i < v.size(); ++i) v(i) = cplx(nd(rng), nd(rng));
    CHECK(stationarity_residual(v, pm, +1).normalized >= 1e-2);
  }
}

TEST_CASE("secular determinant scan") {
  const PencilMatrices pm = scalar(1, 0, 4);
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(-3.05 + 0.1 * i);
  const auto br = secular_determinant_scan(pm, grid);
  REQUIRE(br.size() == 2);
  CHECK(br[0].root == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(br[1].root == doctest::Approx(2.0).epsilon(1e-9));

  const auto none = secular_determinant_scan(pm, {-1.5, -0.5, 0.5, 1.5});
  CHECK(none.empty());
  const OrthoPencil op(pm);
  for (double s : {-1.5, 0.5}) CHECK(pencil_determinant(op, s).sign != 0);

  CHECK_THROWS(secular_determinant_scan(pm, {1.0}));
  CHECK_THROWS(secular_determinant_scan(pm, {1.0, 0.0}));

  const PencilMatrices rp = random_pencil(6, 5);
  const SpectrumResult r = solve_pencil(rp);
  std::vector<double> g;
  const double lo = r.sigma(0).real() - 0.5, hi = r.sigma(r.size() - 1).real() + 0.5;
  for (int i = 0; i <= 4000; ++i) g.push_back(lo + (hi - lo) * i / 4000.0);
  const auto rb = secular_determinant_scan(rp, g);
  CHECK(static_cast<int>(rb.size()) == r.size());
  for (const SecularBracket& b : rb) {
    double best = 1e300;
    for (int k = 0; k < r.size(); ++k) best = std::min(best, std::abs(r.sigma(k).real() - b.root));
    CHECK(best <= 1e-6);
  }
}

TEST_CASE("resolvent bound") {
  const double omega = PhysicalParams::reference().omega;
  const PencilMatrices pm = reference_pencil(1, omega);
  const OrthoPencil op(pm);
  CHECK(op.beta() <= 2.0 * omega + 1e-10);

  const ResolventReport r0 = resolvent_bound_check(pm, 0.0, 0.5);
  CHECK(r0.pass);
  CHECK(r0.norm <= 1.0 / 0.5 + 1e-10);
  const ResolventReport r1 = resolvent_bound_check(pm, 1.0, 2.0 * op.beta());
  CHECK(r1.pass);
  CHECK_THROWS_AS(resolvent_bound_check(pm, 1.0, 0.5 * op.beta()), PreconditionError);

  const PencilMatrices p0 = reference_pencil(1, 0.0);
  const ResolventReport rz = resolvent_bound_check(p0, 1.0, 0.7);
  CHECK(rz.beta_d == 0.0);
  CHECK(rz.norm == doctest::Approx(1.0 / 0.7).epsilon(1e-8));
}

TEST_CASE("phase reality test") {
  const PencilMatrices id = pencil(MatrixXcd::Identity(2, 2), MatrixXcd::Zero(2, 2), MatrixXcd::Zero(2, 2));
  VectorXcd real(2);
  real << 0.3, -1.2;
  CHECK(phase_reality_test(real, id));
  CHECK(phase_reality_test(VectorXcd(real * std::polar(1.0, 0.7)), id));
  VectorXcd circ(2);
  circ << 1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0));
  CHECK_FALSE(phase_reality_test(circ, id));
  CHECK_THROWS_AS(phase_reality_test(VectorXcd::Zero(2), id), DomainError);
}
