#include "rotatm/quadrature.hpp"

#include "rotatm/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rotatm {

namespace {

// Golub-Welsch from the Jacobi matrix with diagonal a and off-diagonal sqrt(b).
QuadRule golub_welsch(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double mu0) {
  const int n = static_cast<int>(a.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = a(i);
  for (int i = 0; i + 1 < n; ++i) {
    t(i, i + 1) = std::sqrt(b(i));
    t(i + 1, i) = t(i, i + 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  if (es.info() != Eigen::Success) throw NumericError("Golub-Welsch eigensolve failed");
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v0 * v0;
  }
  return r;
}

}  // namespace

QuadRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

QuadRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw DomainError("quadrature needs at least one node");
  if (!(alpha > -1.0 && beta > -1.0)) throw DomainError("Jacobi exponents must exceed -1");
  Eigen::VectorXd a(n);
  Eigen::VectorXd b(std::max(n - 1, 1));
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    if (k == 0) {
      a(k) = (beta - alpha) / (ab + 2.0);
    } else {
      a(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    double den = s * s * (s + 1.0) * (s - 1.0);
    b(k - 1) = num / den;
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  return golub_welsch(a, b.head(std::max(n - 1, 0)), mu0);
}

UniformCubicSplines::UniformCubicSplines(double a, double b, int cells)
    : a_(a), b_(b), cells_(cells) {
  if (cells < 1) throw DomainError("spline space needs at least one cell");
  if (!(b > a)) throw DomainError("spline interval must be nonempty");
}

double UniformCubicSplines::knot(int j) const {
  const int k = std::clamp(j - 3, 0, cells_);
  return k == cells_ ? b_ : a_ + k * width();
}

int UniformCubicSplines::cell_of(double x) const {
  const int c = static_cast<int>(std::floor((x - a_) / width()));
  return std::clamp(c, 0, cells_ - 1);
}

// Piegl and Tiller, basis functions and derivatives (algorithm A2.3) for p = 3.
std::array<Jet1, 4> UniformCubicSplines::local(double x, int c) const {
  constexpr int p = 3;
  const int span = c + 3;
  double left[p + 1];
  double right[p + 1];
  double ndu[p + 1][p + 1];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knot(span + 1 - j);
    right[j] = knot(span + j) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  double ders[3][p + 1];
  for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];
  double aa[2][p + 1];
  for (int r = 0; r <= p; ++r) {
    int s1 = 0;
    int s2 = 1;
    aa[0][0] = 1.0;
    for (int k = 1; k <= 2; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        aa[s2][0] = aa[s1][0] / ndu[pk + 1][rk];
        d = aa[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        aa[s2][j] = (aa[s1][j] - aa[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += aa[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        aa[s2][k] = -aa[s1][k - 1] / ndu[pk + 1][r];
        d += aa[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  std::array<Jet1, 4> out;
  for (int j = 0; j <= p; ++j) {
    out[j] = {ders[0][j], ders[1][j] * p, ders[2][j] * p * (p - 1)};
  }
  return out;
}

Jet1 UniformCubicSplines::eval(int i, double x) const {
  if (i < 0 || i >= count()) throw DomainError("spline index out of range");
  if (x < support_lo(i) || x > support_hi(i) || x < a_ || x > b_) return {};
  const int c = cell_of(x);
  const int j = i - c;
  if (j < 0 || j > 3) return {};
  return local(x, c)[j];
}

}  // namespace rotatm
