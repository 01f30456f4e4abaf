#pragma once

#include "rotatm/atmosphere.hpp"

#include <Eigen/Core>

#include <vector>

namespace rotatm {

/// Radial problem for the non-rotating atmosphere in the variable u = sigma_bar h:
///   -(r^2 rho u')' + l(l+1) rho u = lambda (r^2 / sigma_bar) u   on R0 < r < R,
/// with u' = 0 at R0 and the natural condition at the vacuum radius R.
struct RadialSpectrum {
  int l = 0;
  std::vector<double> radii;   ///< grid, graded toward R
  Eigen::VectorXd eigenvalues; ///< ascending, constant mode removed for l = 0
  Eigen::MatrixXd modes;       ///< columns: u at the grid points, weighted-normalized
};

/// Linear finite elements on r = R - (R - R0)(1 - t)^2, t uniform; n_r cells.
RadialSpectrum radial_sturm_liouville(const PhysicalParams& p, int l, int n_r);

struct OracleMode {
  double lambda;
  int l;
  int n;  ///< radial order within degree l
};

/// Eigenvalues of all degrees 0..l_max merged and sorted ascending.
std::vector<OracleMode> merged_oracle_spectrum(const PhysicalParams& p, int l_max, int n_r,
                                               int per_degree = 8);

}  // namespace rotatm
