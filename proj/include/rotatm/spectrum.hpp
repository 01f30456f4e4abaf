#pragma once

#include "rotatm/assembly.hpp"

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include <vector>

namespace rotatm {

/// The pencil in A-orthonormal coordinates y = L^H xi, A = L L^H:
///   -sigma^2 y + sigma Bh y + Ch y = 0.
/// A is diagonally rescaled before the Cholesky factorization.
class OrthoPencil {
 public:
  explicit OrthoPencil(const PencilMatrices& pm);

  int size() const { return static_cast<int>(ch_.rows()); }
  const Eigen::MatrixXcd& c_hat() const { return ch_; }
  const Eigen::MatrixXcd& b_hat() const { return bh_; }
  /// Operator 2-norm of Bh (the discrete beta).
  double beta() const { return beta_; }
  /// log det A
  double log_det_a() const { return log_det_a_; }

  Eigen::VectorXcd to_y(const Eigen::VectorXcd& xi) const;
  Eigen::VectorXcd from_y(const Eigen::VectorXcd& y) const;
  /// L^-1 f for a load vector f (its norm is the energy norm of the force).
  Eigen::VectorXcd load_to_y(const Eigen::VectorXcd& f) const;

 private:
  Eigen::VectorXd d_;  ///< sqrt(diag A)
  Eigen::LLT<Eigen::MatrixXcd> llt_;
  Eigen::MatrixXcd ch_;
  Eigen::MatrixXcd bh_;
  double beta_ = 0.0;
  double log_det_a_ = 0.0;
};

/// First-order form: [[0, I], [C, B]] (xi, eta) = sigma diag(I, A) (xi, eta), eta = sigma xi.
struct CompanionPair {
  Eigen::MatrixXcd left;
  Eigen::MatrixXcd right;
};

CompanionPair companion_linearize(const PencilMatrices& pm);
/// Eigenvalues of the companion pair by a dense solve of right^-1 left (small N).
Eigen::VectorXcd companion_eigenvalues(const CompanionPair& pair);

struct SpectrumOptions {
  double kernel_tol = 1e-10;   ///< |mu| <= kernel_tol * max|mu| marks the null space of Ch
  double zero_tol = 1e-8;      ///< |sigma| <= zero_tol * scale joins the kernel cluster
  double cluster_tol = 1e-8;
};

struct SpectrumResult {
  Eigen::VectorXcd sigma;       ///< sorted by real part
  Eigen::MatrixXcd vectors;     ///< columns xi with xi^H A xi = 1
  Eigen::VectorXd residuals;    ///< relative pencil residuals
  double max_imag = 0.0;
  double scale = 0.0;           ///< max |sigma|
  int kernel_dim = 0;           ///< dimension of the null space of C
  std::vector<int> zero_cluster;
  std::vector<std::vector<int>> clusters;  ///< groups of (numerically) equal frequencies
  bool paired = true;           ///< every complex sigma has its conjugate

  int size() const { return static_cast<int>(sigma.size()); }
  bool simple(int k) const;
};

/// Dense eigensolve of the pencil through the energy-coordinate first-order operator.
SpectrumResult solve_pencil(const PencilMatrices& pm, const SpectrumOptions& opts = {});

struct RealityReport {
  double max_imag = 0.0;
  double scale = 0.0;
  bool pass = false;
};

RealityReport reality_check(const SpectrumResult& r, double tol = 1e-8);

struct RayleighCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double imag_residue = 0.0;  ///< largest discarded imaginary part

  double discriminant() const { return b * b / (4.0 * a * a) + c / a; }
  /// -a sigma^2 + b sigma + c relative to the size of its terms.
  double quadratic_residual(double sigma) const;
};

RayleighCoefficients rayleigh_coefficients(const Eigen::VectorXcd& xi, const PencilMatrices& pm);

/// b/(2a) + branch * sqrt(b^2/(4a^2) + c/a), branch = +1 or -1.
double sigma_functional(const RayleighCoefficients& rc, int branch);
double sigma_functional(const Eigen::VectorXcd& xi, const PencilMatrices& pm, int branch);
/// Branch whose value is the eigenfrequency of an eigenvector with frequency sigma.
int branch_for(const RayleighCoefficients& rc, double sigma);

struct StationarityReport {
  double sigma = 0.0;
  double gradient_norm = 0.0;  ///< in A-orthonormal coordinates, |y| = 1
  double normalized = 0.0;     ///< gradient_norm / |sigma| (absolute when sigma = 0)
};

/// Central-difference gradient of sigma(Xi) along the real and imaginary unit directions.
StationarityReport stationarity_residual(const Eigen::VectorXcd& xi, const PencilMatrices& pm,
                                         int branch, double rel_step = 1e-6);

struct DeterminantValue {
  double log_abs = 0.0;
  int sign = 0;
};

/// det(-sigma^2 A + sigma B + C) for real sigma, in log-magnitude and sign.
DeterminantValue pencil_determinant(const OrthoPencil& op, double sigma);

struct SecularBracket {
  double lo = 0.0;
  double hi = 0.0;
  double root = 0.0;  ///< bisection midpoint after refinement
};

SecularBracket refine_bracket(const OrthoPencil& op, double lo, double hi, double tol);
std::vector<SecularBracket> secular_determinant_scan(const PencilMatrices& pm,
                                                     const std::vector<double>& grid,
                                                     double refine_tol = 1e-10);

struct ResolventReport {
  double norm = 0.0;
  double bound = 0.0;
  double beta_d = 0.0;
  bool pass = false;
};

/// |(Lh + c Bh + lambda)^-1| against 1/(lambda - |c| beta_d).
ResolventReport resolvent_bound_check(const PencilMatrices& pm, double c, double lambda);

/// True iff xi = e^{i theta} * (real vector) with respect to A: |xi^T A xi| >= (1 - tol) xi^H A xi.
bool phase_reality_test(const Eigen::VectorXcd& xi, const PencilMatrices& pm, double tol = 1e-8);

}  // namespace rotatm
