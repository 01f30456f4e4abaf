#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rotatm/quadrature.hpp"

#include <cmath>

using namespace rotatm;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  for (int n : {1, 3, 6, 10}) {
    const QuadRule r = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += r.weights[k] * std::pow(r.nodes[k], d);
      const double exact = (d % 2) ? 0.0 : 2.0 / (d + 1);
      CHECK(std::abs(s - exact) <= 1e-14);
    }
  }
}

TEST_CASE("Gauss-Jacobi moments") {
  const double alpha = 1.5;
  const QuadRule r = gauss_jacobi(8, alpha, 0.0);
  // int_{-1}^{1} (1-x)^alpha (1+x)^d dx = 2^(alpha+d+1) B(alpha+1, d+1)
  for (int d = 0; d <= 15; ++d) {
    double s = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * std::pow(1.0 + r.nodes[k], d);
    const double exact = std::exp((alpha + d + 1) * std::log(2.0) + std::lgamma(alpha + 1) +
                                  std::lgamma(d + 1.0) - std::lgamma(alpha + d + 2));
    CHECK(std::abs(s - exact) <= 1e-12 * exact);
  }
  for (double w : r.weights) CHECK(w > 0.0);
}

TEST_CASE("clamped cubic splines: partition of unity and derivatives") {
  const UniformCubicSplines sp(-1.0, 1.0, 7);
  CHECK(sp.count() == 10);
  for (int k = 0; k <= 200; ++k) {
    const double x = -1.0 + 2.0 * k / 200.0;
    double sum = 0.0;
    double dsum = 0.0;
    double d2sum = 0.0;
    for (int i = 0; i < sp.count(); ++i) {
      const Jet1 j = sp.eval(i, x);
      CHECK(j.v >= -1e-15);
      sum += j.v;
      dsum += j.d1;
      d2sum += j.d2;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(dsum) <= 1e-12);
    CHECK(std::abs(d2sum) <= 1e-10);
  }
  const double h = 1e-6;
  for (int i = 0; i < sp.count(); ++i) {
    for (double x : {-0.93, -0.41, 0.05, 0.5, 0.97}) {
      const Jet1 j = sp.eval(i, x);
      const double fd1 = (sp.eval(i, x + h).v - sp.eval(i, x - h).v) / (2 * h);
      const double fd2 = (sp.eval(i, x + h).d1 - sp.eval(i, x - h).d1) / (2 * h);
      CHECK(std::abs(j.d1 - fd1) <= 1e-7);
      CHECK(std::abs(j.d2 - fd2) <= 1e-6);
    }
  }
  // clamped end: only B0 is nonzero, B0' + B1' = 0
  CHECK(sp.eval(0, -1.0).v == 1.0);
  CHECK(sp.eval(0, -1.0).d1 + sp.eval(1, -1.0).d1 == doctest::Approx(0.0));
  CHECK(sp.eval(sp.count() - 1, 1.0).v == doctest::Approx(1.0));
}
