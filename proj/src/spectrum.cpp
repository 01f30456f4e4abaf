#include "rotatm/spectrum.hpp"

#include "rotatm/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rotatm {

namespace {

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

double hermitian_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void check_shapes(const PencilMatrices& pm) {
  const auto n = pm.a.rows();
  if (pm.a.cols() != n || pm.b.rows() != n || pm.b.cols() != n || pm.c.rows() != n ||
      pm.c.cols() != n)
    throw DomainError("pencil matrices must be square and of equal size");
  if (n == 0) throw DomainError("empty pencil");
}

}  // namespace

OrthoPencil::OrthoPencil(const PencilMatrices& pm) {
  check_shapes(pm);
  const int n = pm.size();
  d_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v = pm.a(i, i).real();
    if (!(v > 0.0)) throw Error("assembly-order", "mass matrix has a nonpositive diagonal");
    d_(i) = std::sqrt(v);
  }
  const Eigen::VectorXcd dinv = d_.cwiseInverse().cast<cplx>();
  auto scaled = [&](const Eigen::MatrixXcd& m) {
    return Eigen::MatrixXcd(dinv.asDiagonal() * hermitize(m) * dinv.asDiagonal());
  };
  llt_.compute(scaled(pm.a));
  if (llt_.info() != Eigen::Success)
    throw Error("assembly-order", "mass matrix is not positive definite");

  auto sandwich = [&](const Eigen::MatrixXcd& m) {
    Eigen::MatrixXcd t = llt_.matrixL().solve(scaled(m));
    Eigen::MatrixXcd u = llt_.matrixL().solve(t.adjoint());
    return hermitize(u);
  };
  ch_ = sandwich(pm.c);
  bh_ = sandwich(pm.b);
  beta_ = hermitian_norm(bh_);

  log_det_a_ = 2.0 * d_.array().log().sum();
  const auto& l = llt_.matrixLLT();
  for (int i = 0; i < n; ++i) log_det_a_ += 2.0 * std::log(l(i, i).real());
}

Eigen::VectorXcd OrthoPencil::to_y(const Eigen::VectorXcd& xi) const {
  const Eigen::VectorXcd t = d_.cast<cplx>().cwiseProduct(xi);
  return llt_.matrixU() * t;
}

Eigen::VectorXcd OrthoPencil::from_y(const Eigen::VectorXcd& y) const {
  const Eigen::VectorXcd t = llt_.matrixU().solve(y);
  return d_.cwiseInverse().cast<cplx>().cwiseProduct(t);
}

Eigen::VectorXcd OrthoPencil::load_to_y(const Eigen::VectorXcd& f) const {
  const Eigen::VectorXcd t = d_.cwiseInverse().cast<cplx>().cwiseProduct(f);
  return llt_.matrixL().solve(t);
}

CompanionPair companion_linearize(const PencilMatrices& pm) {
  check_shapes(pm);
  Eigen::LLT<Eigen::MatrixXcd> llt(hermitize(pm.a));
  if (llt.info() != Eigen::Success)
    throw Error("assembly-order", "mass matrix is not positive definite");
  const int n = pm.size();
  CompanionPair out;
  out.left = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  out.right = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  out.left.topRightCorner(n, n).setIdentity();
  out.left.bottomLeftCorner(n, n) = pm.c;
  out.left.bottomRightCorner(n, n) = pm.b;
  out.right.topLeftCorner(n, n).setIdentity();
  out.right.bottomRightCorner(n, n) = pm.a;
  return out;
}

Eigen::VectorXcd companion_eigenvalues(const CompanionPair& pair) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(pair.right);
  const Eigen::MatrixXcd m = lu.solve(pair.left);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  if (es.info() != Eigen::Success) throw NumericError("companion eigensolve did not converge");
  return es.eigenvalues();
}

bool SpectrumResult::simple(int k) const {
  for (const auto& c : clusters)
    if (std::find(c.begin(), c.end(), k) != c.end()) return c.size() == 1;
  return true;
}

SpectrumResult solve_pencil(const PencilMatrices& pm, const SpectrumOptions& opts) {
  const OrthoPencil op(pm);
  const int n = op.size();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ces(op.c_hat());
  if (ces.info() != Eigen::Success) throw NumericError("stiffness eigensolve did not converge");
  const Eigen::VectorXd& mu = ces.eigenvalues();
  const double mu_max = std::max({mu.cwiseAbs().maxCoeff(), op.beta() * op.beta(), 1.0});

  std::vector<int> range_idx, kernel_idx;
  for (int i = 0; i < n; ++i)
    (std::abs(mu(i)) <= opts.kernel_tol * mu_max ? kernel_idx : range_idx).push_back(i);
  const int r = static_cast<int>(range_idx.size());
  const int k = static_cast<int>(kernel_idx.size());

  Eigen::MatrixXcd w(n, n);
  Eigen::VectorXcd dsq(r);
  for (int i = 0; i < r; ++i) {
    w.col(i) = ces.eigenvectors().col(range_idx[i]);
    const double v = mu(range_idx[i]);
    dsq(i) = v >= 0.0 ? cplx(std::sqrt(v), 0.0) : cplx(0.0, std::sqrt(-v));
  }
  for (int i = 0; i < k; ++i) w.col(r + i) = ces.eigenvectors().col(kernel_idx[i]);

  // state (p, q~) with p = D W_r^H y and q~ = W^H (sigma y)
  const Eigen::MatrixXcd bt = w.adjoint() * op.b_hat() * w;
  const int dim = r + n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < r; ++i) {
    h(i, r + i) = dsq(i);
    h(r + i, i) = dsq(i);
  }
  h.bottomRightCorner(n, n) = bt;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h, true);
  if (es.info() != Eigen::Success) throw NumericError("pencil eigensolve did not converge");

  const double scale0 = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  const int total = dim + k;
  Eigen::VectorXcd sig(total);
  Eigen::MatrixXcd ys(n, total);
  for (int j = 0; j < dim; ++j) {
    const cplx s = es.eigenvalues()(j);
    const Eigen::VectorXcd p = es.eigenvectors().col(j).head(r);
    const Eigen::VectorXcd q = es.eigenvectors().col(j).tail(n);
    Eigen::VectorXcd y = w * q;
    if (std::abs(s) <= opts.zero_tol * scale0) {
      // near sigma = 0 the q-part degenerates; keep the candidate with the smallest residual
      auto resid = [&](const Eigen::VectorXcd& v) {
        const double vn = v.norm();
        if (!(vn > 0.0)) return std::numeric_limits<double>::infinity();
        Eigen::VectorXcd t = op.c_hat() * v + s * (op.b_hat() * v) - s * s * v;
        return t.norm() / vn;
      };
      std::vector<Eigen::VectorXcd> cand{y};
      if (r > 0) cand.push_back(w.leftCols(r) * p.cwiseQuotient(dsq));
      if (k > 0) cand.push_back(w.rightCols(k) * q.tail(k));
      double best = resid(y);
      for (const auto& c : cand) {
        const double v = resid(c);
        if (v < best) {
          best = v;
          y = c;
        }
      }
    }
    const double nn = y.norm();
    if (!(nn > 0.0)) throw NumericError("degenerate eigenvector");
    sig(j) = s;
    ys.col(j) = y / nn;
  }
  for (int i = 0; i < k; ++i) {
    sig(dim + i) = 0.0;
    ys.col(dim + i) = w.col(r + i);
  }

  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (sig(a).real() != sig(b).real()) return sig(a).real() < sig(b).real();
    return sig(a).imag() < sig(b).imag();
  });

  SpectrumResult out;
  out.kernel_dim = k;
  out.sigma.resize(total);
  out.vectors.resize(n, total);
  out.residuals.resize(total);
  const double na = hermitian_norm(hermitize(pm.a));
  const double nb = hermitian_norm(hermitize(pm.b));
  const double nc = hermitian_norm(hermitize(pm.c));
  for (int t = 0; t < total; ++t) {
    const int j = order[t];
    out.sigma(t) = sig(j);
    Eigen::VectorXcd xi = op.from_y(ys.col(j));
    const double an = std::sqrt(std::abs((xi.adjoint() * pm.a * xi)(0, 0)));
    xi /= an;
    out.vectors.col(t) = xi;
    const cplx s = sig(j);
    const Eigen::VectorXcd res = -s * s * (pm.a * xi) + s * (pm.b * xi) + pm.c * xi;
    const double den = (na * std::norm(s) + nb * std::abs(s) + nc) * xi.norm();
    out.residuals(t) = den > 0.0 ? res.norm() / den : res.norm();
    out.max_imag = std::max(out.max_imag, std::abs(s.imag()));
    out.scale = std::max(out.scale, std::abs(s));
  }
  if (!out.residuals.allFinite()) throw NumericError("non-finite eigenpair");

  const double ctol = opts.cluster_tol * std::max(out.scale, 1e-300);
  std::vector<bool> used(total, false);
  for (int t = 0; t < total; ++t) {
    if (used[t]) continue;
    std::vector<int> cl{t};
    used[t] = true;
    for (int u = t + 1; u < total; ++u) {
      if (used[u]) continue;
      if (std::abs(out.sigma(u) - out.sigma(t)) <= ctol) {
        cl.push_back(u);
        used[u] = true;
      }
    }
    out.clusters.push_back(cl);
  }
  for (int t = 0; t < total; ++t)
    if (std::abs(out.sigma(t)) <= opts.zero_tol * out.scale) out.zero_cluster.push_back(t);

  for (int t = 0; t < total; ++t) {
    if (std::abs(out.sigma(t).imag()) <= opts.cluster_tol * out.scale) continue;
    bool found = false;
    for (int u = 0; u < total && !found; ++u)
      found = u != t && std::abs(out.sigma(u) - std::conj(out.sigma(t))) <= 1e-6 * out.scale;
    if (!found) out.paired = false;
  }
  return out;
}

RealityReport reality_check(const SpectrumResult& r, double tol) {
  RealityReport rep;
  rep.max_imag = r.max_imag;
  rep.scale = r.scale;
  rep.pass = r.paired && r.max_imag <= tol * std::max(r.scale, 1.0);
  return rep;
}

double RayleighCoefficients::quadratic_residual(double sigma) const {
  const double v = -a * sigma * sigma + b * sigma + c;
  const double den = std::abs(a) * sigma * sigma + std::abs(b * sigma) + std::abs(c);
  return den > 0.0 ? std::abs(v) / den : std::abs(v);
}

RayleighCoefficients rayleigh_coefficients(const Eigen::VectorXcd& xi, const PencilMatrices& pm) {
  check_shapes(pm);
  if (xi.size() != pm.size()) throw DomainError("vector size does not match the pencil");
  if (!(xi.norm() > 0.0)) throw DomainError("zero vector");
  const cplx a = xi.dot(pm.a * xi);
  const cplx b = xi.dot(pm.b * xi);
  const cplx c = xi.dot(pm.c * xi);
  RayleighCoefficients rc{a.real(), b.real(), c.real(), 0.0};
  const double mag = std::abs(a) + std::abs(b) + std::abs(c);
  rc.imag_residue = std::max({std::abs(a.imag()), std::abs(b.imag()), std::abs(c.imag())}) / mag;
  if (!(rc.a > 0.0)) throw DomainError("mass form is not positive on this vector");
  return rc;
}

double sigma_functional(const RayleighCoefficients& rc, int branch) {
  if (branch != 1 && branch != -1) throw DomainError("branch must be +1 or -1");
  const double disc = rc.discriminant();
  if (disc < 0.0) throw DomainError("negative discriminant: the Rayleigh frequency is complex");
  return rc.b / (2.0 * rc.a) + branch * std::sqrt(disc);
}

double sigma_functional(const Eigen::VectorXcd& xi, const PencilMatrices& pm, int branch) {
  return sigma_functional(rayleigh_coefficients(xi, pm), branch);
}

int branch_for(const RayleighCoefficients& rc, double sigma) {
  return sigma >= rc.b / (2.0 * rc.a) ? 1 : -1;
}

StationarityReport stationarity_residual(const Eigen::VectorXcd& xi, const PencilMatrices& pm,
                                         int branch, double rel_step) {
  const OrthoPencil op(pm);
  Eigen::VectorXcd y = op.to_y(xi);
  const double yn = y.norm();
  if (!(yn > 0.0)) throw DomainError("zero vector");
  y /= yn;
  const Eigen::VectorXcd by = op.b_hat() * y;
  const Eigen::VectorXcd cy = op.c_hat() * y;
  const double a0 = 1.0;
  const double b0 = y.dot(by).real();
  const double c0 = y.dot(cy).real();
  const RayleighCoefficients base{a0, b0, c0, 0.0};
  StationarityReport rep;
  rep.sigma = sigma_functional(base, branch);

  const double h = rel_step;
  auto eval = [&](double da, double db, double dc, double qa, double qb, double qc, double t) {
    RayleighCoefficients rc{a0 + t * da + t * t * qa, b0 + t * db + t * t * qb,
                            c0 + t * dc + t * t * qc, 0.0};
    return sigma_functional(rc, branch);
  };
  double g2 = 0.0;
  const int n = op.size();
  for (int j = 0; j < n; ++j) {
    const double bjj = op.b_hat()(j, j).real();
    const double cjj = op.c_hat()(j, j).real();
    // real direction e_j
    {
      const double d = (eval(2 * y(j).real(), 2 * by(j).real(), 2 * cy(j).real(), 1, bjj, cjj, h) -
                        eval(2 * y(j).real(), 2 * by(j).real(), 2 * cy(j).real(), 1, bjj, cjj, -h)) /
                       (2 * h);
      g2 += d * d;
    }
    // imaginary direction i e_j
    {
      const double d = (eval(2 * y(j).imag(), 2 * by(j).imag(), 2 * cy(j).imag(), 1, bjj, cjj, h) -
                        eval(2 * y(j).imag(), 2 * by(j).imag(), 2 * cy(j).imag(), 1, bjj, cjj, -h)) /
                       (2 * h);
      g2 += d * d;
    }
  }
  rep.gradient_norm = std::sqrt(g2);
  rep.normalized = std::abs(rep.sigma) > 0.0 ? rep.gradient_norm / std::abs(rep.sigma)
                                             : rep.gradient_norm;
  return rep;
}

DeterminantValue pencil_determinant(const OrthoPencil& op, double sigma) {
  const int n = op.size();
  Eigen::MatrixXcd m = op.c_hat() + sigma * op.b_hat();
  m.diagonal().array() -= sigma * sigma;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const auto& u = lu.matrixLU();
  double logabs = op.log_det_a();
  cplx phase = static_cast<double>(lu.permutationP().determinant());
  for (int i = 0; i < n; ++i) {
    const cplx d = u(i, i);
    const double ad = std::abs(d);
    if (ad == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    logabs += std::log(ad);
    phase *= d / ad;
  }
  // Hermitian for real sigma: the phase is +-1 up to rounding
  return {logabs, phase.real() >= 0.0 ? 1 : -1};
}

SecularBracket refine_bracket(const OrthoPencil& op, double lo, double hi, double tol) {
  int slo = pencil_determinant(op, lo).sign;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int sm = pencil_determinant(op, mid).sign;
    if (sm == 0) return {mid, mid, mid};
    if (sm == slo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi, 0.5 * (lo + hi)};
}

std::vector<SecularBracket> secular_determinant_scan(const PencilMatrices& pm,
                                                     const std::vector<double>& grid,
                                                     double refine_tol) {
  if (grid.size() < 2) throw DomainError("scan grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("scan grid must be increasing");
  const OrthoPencil op(pm);
  std::vector<SecularBracket> out;
  int prev = pencil_determinant(op, grid[0]).sign;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const int cur = pencil_determinant(op, grid[i]).sign;
    if (cur != prev) out.push_back(refine_bracket(op, grid[i - 1], grid[i], refine_tol));
    prev = cur;
  }
  return out;
}

ResolventReport resolvent_bound_check(const PencilMatrices& pm, double c, double lambda) {
  const OrthoPencil op(pm);
  ResolventReport rep;
  rep.beta_d = op.beta();
  if (!(lambda > std::abs(c) * rep.beta_d))
    throw PreconditionError("lambda must exceed |c| beta_d");
  Eigen::MatrixXcd m = op.c_hat() + c * op.b_hat();
  m.diagonal().array() += lambda;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitize(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("resolvent eigensolve did not converge");
  rep.norm = 1.0 / es.eigenvalues().cwiseAbs().minCoeff();
  rep.bound = 1.0 / (lambda - std::abs(c) * rep.beta_d);
  rep.pass = rep.norm <= rep.bound * (1.0 + 1e-10);
  return rep;
}

bool phase_reality_test(const Eigen::VectorXcd& xi, const PencilMatrices& pm, double tol) {
  if (xi.size() != pm.size()) throw DomainError("vector size does not match the pencil");
  const Eigen::VectorXcd ax = pm.a * xi;
  const double herm = std::abs(xi.dot(ax));
  if (!(herm > 0.0)) throw DomainError("zero vector");
  const cplx bil = (xi.transpose() * ax)(0, 0);
  return std::abs(bil) >= (1.0 - tol) * herm;
}

}  // namespace rotatm
