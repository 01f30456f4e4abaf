#pragma once

#include <array>
#include <vector>

namespace rotatm {

/// Nodes and weights of a rule on [-1, 1].
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Golub-Welsch).
QuadRule gauss_legendre(int n);

/// n-point Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta, alpha, beta > -1.
QuadRule gauss_jacobi(int n, double alpha, double beta);

/// Value and first two derivatives of a scalar function of one variable.
struct Jet1 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Clamped cubic B-splines on a uniform partition of [a, b].
class UniformCubicSplines {
 public:
  UniformCubicSplines(double a, double b, int cells);

  int cells() const { return cells_; }
  int count() const { return cells_ + 3; }
  double lo() const { return a_; }
  double hi() const { return b_; }
  double width() const { return (b_ - a_) / cells_; }

  /// Cell index containing x (the last cell owns x = b).
  int cell_of(double x) const;
  /// Support [knot(i), knot(i+4)] of function i.
  double support_lo(int i) const { return knot(i); }
  double support_hi(int i) const { return knot(i + 4); }
  double knot(int j) const;

  /// Jets of the four functions nonzero on cell c, i.e. functions c..c+3.
  std::array<Jet1, 4> local(double x, int c) const;
  /// Jet of function i at x (zero outside its support).
  Jet1 eval(int i, double x) const;

 private:
  double a_;
  double b_;
  int cells_;
};

}  // namespace rotatm
