#include "rotatm/oracle.hpp"

#include "rotatm/errors.hpp"
#include "rotatm/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rotatm {

RadialSpectrum radial_sturm_liouville(const PhysicalParams& p, int l, int n_r) {
  p.validate_with_cap();
  if (p.omega != 0.0) throw DomainError("the radial reduction needs Omega = 0");
  if (l < 0) throw DomainError("degree l must be nonnegative");
  if (n_r < 32) throw DomainError("radial grid needs at least 32 cells");

  RadialSpectrum out;
  out.l = l;
  out.radii.resize(n_r + 1);
  const double span = p.r_cap - p.r0;
  for (int i = 0; i <= n_r; ++i) {
    const double t = static_cast<double>(i) / n_r;
    out.radii[i] = p.r_cap - span * (1.0 - t) * (1.0 - t);
  }
  out.radii[0] = p.r0;
  out.radii[n_r] = p.r_cap;

  const double ll = static_cast<double>(l) * (l + 1);
  const double ag = p.a_const * p.gamma;
  auto rho = [&](double r) { return rho_of_upsilon(p.gm0 * (1.0 / r - 1.0 / p.r_cap), p); };

  const int n = n_r + 1;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const QuadRule gl = gauss_legendre(6);
  for (int e = 0; e < n_r; ++e) {
    const double a = out.radii[e];
    const double b = out.radii[e + 1];
    const double h = b - a;
    double kk[2][2] = {{0, 0}, {0, 0}};
    double mm[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double x = 0.5 * (gl.nodes[q] + 1.0);
      const double r = a + h * x;
      const double w = 0.5 * h * gl.weights[q];
      const double rh = rho(r);
      const double phi[2] = {1.0 - x, x};
      const double dphi[2] = {-1.0 / h, 1.0 / h};
      const double mass_w = rh > 0.0 ? r * r * std::pow(rh, 2.0 - p.gamma) / ag : 0.0;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          kk[i][j] += w * (r * r * rh * dphi[i] * dphi[j] + ll * rh * phi[i] * phi[j]);
          mm[i][j] += w * mass_w * phi[i] * phi[j];
        }
      }
    }
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        k(e + i, e + j) += kk[i][j];
        m(e + i, e + j) += mm[i][j];
      }
    }
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m);
  if (es.info() != Eigen::Success) throw NumericError("radial eigensolve did not converge");
  const Eigen::VectorXd& ev = es.eigenvalues();
  int first = 0;
  if (l == 0) {
    // the constant u has zero stiffness; it violates the zero-mean constraint
    first = 1;
    if (!(std::abs(ev(0)) <= 1e-8 * ev(n - 1)))
      throw NumericError("constant mode of the l = 0 problem not found", ev(0));
  }
  out.eigenvalues = ev.tail(n - first);
  out.modes = es.eigenvectors().rightCols(n - first);
  for (int i = 1; i < out.eigenvalues.size(); ++i) {
    if (!(out.eigenvalues(i) > out.eigenvalues(i - 1)))
      throw NumericError("radial spectrum is not simple");
  }
  return out;
}

std::vector<OracleMode> merged_oracle_spectrum(const PhysicalParams& p, int l_max, int n_r,
                                               int per_degree) {
  std::vector<OracleMode> all;
  for (int l = 0; l <= l_max; ++l) {
    const RadialSpectrum rs = radial_sturm_liouville(p, l, n_r);
    const int take = std::min<int>(per_degree, static_cast<int>(rs.eigenvalues.size()));
    for (int k = 0; k < take; ++k) all.push_back({rs.eigenvalues(k), l, k});
  }
  std::sort(all.begin(), all.end(),
            [](const OracleMode& a, const OracleMode& b) { return a.lambda < b.lambda; });
  return all;
}

}  // namespace rotatm
