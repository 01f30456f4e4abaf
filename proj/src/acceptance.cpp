#include "rotatm/acceptance.hpp"

#include "rotatm/assembly.hpp"
#include "rotatm/errors.hpp"
#include "rotatm/evolution.hpp"
#include "rotatm/flow.hpp"
#include "rotatm/geometry.hpp"
#include "rotatm/oracle.hpp"
#include "rotatm/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace rotatm {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

/// Collects named checks; the first failure is kept for the report.
class Checks {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && ok_) first_failure_ = what;
    ok_ = ok_ && ok;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool ok() const { return ok_; }
  std::string detail() const {
    return ok_ ? notes_ : "FAILED " + first_failure_ + (notes_.empty() ? "" : " | " + notes_);
  }

 private:
  bool ok_ = true;
  std::string first_failure_;
  std::string notes_;
};

CriterionResult timed(int id, std::string title, double limit,
                      const std::function<void(Checks&)>& body) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  r.time_limit = limit;
  Checks c;
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  r.checks_pass = c.ok();
  r.detail = c.detail();
  return r;
}

struct Setup {
  StationaryState state;
  MeridionalMesh mesh;
  std::vector<BasisField> basis;
  PencilMatrices pm;
};

Setup make_setup(const AcceptanceConfig& cfg, int m, double omega, BasisChoice choice,
                 int cells_s = 0, int cells_zeta = 0) {
  PhysicalParams p = cfg.params;
  p.omega = omega;
  StationaryState st(p);
  const int cs = cells_s > 0 ? cells_s : cfg.cells_s;
  const int cz = cells_zeta > 0 ? cells_zeta : (m == 0 ? cfg.cells_zeta_m0 : cfg.cells_zeta_m);
  MeridionalMesh mesh(st, m, cs, cz);
  BasisOptions bo;
  bo.choice = choice;
  auto basis = basis_fields(mesh, bo);
  PencilMatrices pm = assemble_pencil(mesh, basis, omega);
  return {st, std::move(mesh), std::move(basis), std::move(pm)};
}

double min_eig(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_abs_eig(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// |-a s^2 + b s + c| measured against the matrix scales (xi^H A xi = a).
double rayleigh_identity_error(const RayleighCoefficients& rc, double s, double beta,
                               double c_norm) {
  const double v = -rc.a * s * s + rc.b * s + rc.c;
  return std::abs(v) / (rc.a * (s * s + beta * std::abs(s) + c_norm));
}

Eigen::VectorXcd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

Eigen::VectorXd random_real(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

// ---------------------------------------------------------------------------

CriterionResult c1(const AcceptanceConfig& cfg) {
  return timed(1, "admissibility threshold", 1.0, [&](Checks& ck) {
    PhysicalParams p = cfg.params;
    p.gm0 = 1.0;
    p.r0 = 1.0;
    p.r_cap = 2.0;
    const double ratio3 = 8.0;
    const double omega_c = std::sqrt(4.0 / 27.0 / ratio3 * 2.0 * p.gm0 / (p.r0 * p.r0 * p.r0));
    std::vector<double> sweep;
    for (int k = 0; k < 48; ++k) sweep.push_back(omega_c * (0.5 + k / 47.0));
    sweep.push_back(omega_c * (1.0 - 1e-12));
    sweep.push_back(omega_c * (1.0 + 1e-12));
    std::sort(sweep.begin(), sweep.end());
    int flips = 0;
    bool prev = true;
    double flip_value = 0.0;
    for (double w : sweep) {
      p.omega = w;
      const AdmissibilityReport rep = check_admissibility(p);
      const double v = ratio3 * w * w / 2.0;
      ck.require(std::abs(rep.value - v) <= 1e-14 * v, "value (R/R0)^3 kappa");
      ck.require(rep.condition_k == (v < 4.0 / 27.0), "flag agrees with the closed-form threshold");
      if (rep.condition_k != prev) {
        ++flips;
        flip_value = rep.value;
      }
      prev = rep.condition_k;
    }
    ck.require(flips == 1, "exactly one flip");
    ck.require(std::abs(flip_value - 4.0 / 27.0) <= 1e-12, "flip within 1e-12 of 4/27");
    ck.note("50 points, flip at (R/R0)^3 kappa = " + fmt(flip_value) + ", omega_c = " + fmt(omega_c));
  });
}

CriterionResult c2(const AcceptanceConfig&) {
  return timed(2, "cubic structure", 5.0, [&](Checks& ck) {
    double worst_m = 0.0;
    for (double lam : {0.2, 0.45, 0.7, 0.9, 0.99}) {
      const double kap = 4.0 * lam * lam * lam / 27.0;
      ck.require(classify_case(kap, lam) == LevelSetCase::M, "case M at equality");
      const CubicRoots r = cubic_roots(kap, lam);
      const double q = 9.0 / (4.0 * lam * lam);
      worst_m = std::max({worst_m, std::abs(r.q_minus - q) / q, std::abs(r.q_plus - q) / q});
    }
    ck.require(worst_m <= 1e-8, "case-M double root");
    int grid = 0;
    for (int i = 0; i < 20; ++i) {
      const double lam = 0.05 + 0.9 * i / 19.0;
      const double kc = 4.0 * lam * lam * lam / 27.0;
      for (int j = 0; j < 20; ++j) {
        const double kap = kc * (0.001 + 0.998 * j / 19.0);
        const LevelSetAnalysis a = analyze_level_set(kap, lam);
        ck.require(a.case_label == LevelSetCase::H, "case H on the grid");
        const CubicRoots& r = *a.roots;
        ck.require(0.0 < r.q_minus && r.q_minus < lam / (3.0 * kap) &&
                       lam / (3.0 * kap) < r.q_plus && r.q_plus < lam / kap && lam / kap < r.q_inf,
                   "root ordering");
        ck.require(cubic_g(9.0 / (4.0 * lam * lam), kap, lam).value < 0.0, "g(9/(4 lambda^2)) < 0");
        ck.require(std::sqrt(r.q_minus) < 1.5 / lam && 1.5 / lam < std::sqrt(r.q_plus),
                   "sqrt(Q-) < 3/(2 lambda) < sqrt(Q+)");
        ++grid;
      }
    }
    ck.note("case M error " + fmt(worst_m) + ", " + std::to_string(grid) + " grid points");
  });
}

CriterionResult c3(const AcceptanceConfig& cfg) {
  return timed(3, "physical vacuum", 1.0, [&](Checks& ck) {
    const PhysicalParams& p = cfg.params;
    const StationaryState st(p);
    const BoundarySurface bs = BoundarySurface::from_params(p);
    double worst = -1e300;
    for (int k = 0; k < 100; ++k) {
      const double zeta = -1.0 + 2.0 * (k + 0.5) / 100.0;
      const double r = bs.outer_radius(zeta);
      const CylPoint x{r * std::sqrt(1.0 - zeta * zeta), r * zeta};
      worst = std::max(worst, vacuum_normal_sign(x, st));
    }
    ck.require(worst < 0.0, "(grad Upsilon | n) < 0 on the boundary");
    const double xmax = std::sqrt(bs.analysis.roots->q_minus);
    double worst_slope = -1e300;
    for (int k = 1; k <= 50; ++k)
      worst_slope = std::max(worst_slope, boundary_curve_slope(xmax * k / 51.0, bs.analysis));
    ck.require(worst_slope < 0.0, "Df < 0 inside");
    ck.note("max normal derivative " + fmt(worst) + ", max slope " + fmt(worst_slope));
  });
}

CriterionResult c4(const AcceptanceConfig& cfg) {
  return timed(4, "lagrangian kinematics", 10.0, [&](Checks& ck) {
    const PhysicalParams& p = cfg.params;
    const double dt = 1e-3;
    const VelocityField rigid = rigid_rotation(std::max(p.omega, 0.3));
    const FlowResult fr = integrate_flow(rigid, Eigen::Vector3d(1.3, -0.2, 0.4), 10.0, dt);
    const double det_err = std::abs(fr.determinants.back() - 1.0);
    ck.require(det_err <= 1e-10, "rigid det = 1");
    std::vector<Eigen::Vector3d> seeds;
    for (int i = 0; i < 16; ++i) {
      const double th = M_PI * (i + 0.5) / 16.0;
      const double ph = 2.0 * M_PI * i / 16.0;
      seeds.push_back(p.r0 * Eigen::Vector3d(std::sin(th) * std::cos(ph),
                                             std::sin(th) * std::sin(ph), std::cos(th)));
    }
    const double inv = boundary_invariance_check(rigid, seeds, p.r0, 10.0, dt);
    ck.require(inv <= 1e-10, "boundary invariance");

    const StationaryState st(p);
    const Eigen::Vector3d x0(0.0, 0.0, 1.5 * p.r0);
    const double u0 = st.upsilon(x0);
    double ups_err = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      const FlowResult rf = integrate_flow(radial_field(), x0, t, dt);
      const double ul = lagrangian_upsilon(u0, rf.determinants.back(), p.gamma);
      ups_err = std::max(ups_err, std::abs(ul - u0 * std::exp(-3.0 * (p.gamma - 1.0) * t)));
    }
    ck.require(ups_err <= 1e-7, "radial Upsilon^L");

    const VelocityField tang = tangential_profile(
        [](double w) { return 0.4 + 0.2 * std::sin(w); }, [](double w) { return 0.2 * std::cos(w); });
    double jac_err = 0.0;
    for (const VelocityField* v : {&rigid, &tang}) {
      const Eigen::Vector3d seed(1.1, 0.4, -0.3);
      const double t = 1.0;
      const Eigen::Matrix3d jac = integrate_flow(*v, seed, t, dt).final_jacobian();
      Eigen::Matrix3d fd;
      const double h = 1e-5;
      for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e(k) = h;
        fd.col(k) = (integrate_flow(*v, seed + e, t, dt).final_position() -
                     integrate_flow(*v, seed - e, t, dt).final_position()) / (2 * h);
      }
      jac_err = std::max(jac_err, (jac - fd).norm() / jac.norm());
    }
    ck.require(jac_err <= 1e-6, "Jacobian vs finite differences");

    double rt = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Eigen::Vector3d seed(1.0 + 0.05 * i, 0.3 - 0.04 * i, 0.2 * std::sin(i));
      const double t = 0.4;
      const Eigen::Vector3d x = integrate_flow(tang, seed, t, dt).final_position();
      rt = std::max(rt, (inverse_flow(tang, t, x, dt).preimage - seed).norm());
    }
    ck.require(rt <= 1e-9, "inverse flow round trip");
    ck.note("det " + fmt(det_err) + ", boundary " + fmt(inv) + ", Upsilon " + fmt(ups_err) +
            ", Jacobian " + fmt(jac_err) + ", round trip " + fmt(rt));
  });
}

CriterionResult c5(const AcceptanceConfig& cfg) {
  return timed(5, "matrix structure", 30.0, [&](Checks& ck) {
    std::mt19937_64 rng(cfg.seed);
    double worst_herm = 0.0, worst_kernel = 0.0, worst_ray = 0.0, min_a = 1e300, min_c = 1e300;
    for (int m : {0, 1, 2}) {
      const Setup s = make_setup(cfg, m, cfg.params.omega, BasisChoice::Mixed);
      const PencilMatrices& pm = s.pm;
      const double amax = max_abs_eig(pm.a);
      const double cmax = max_abs_eig(pm.c);
      const double la = min_eig(pm.a) / amax;
      const double lc = min_eig(pm.c) / cmax;
      min_a = std::min(min_a, la);
      min_c = std::min(min_c, lc);
      ck.require(la > 0.0, "A positive definite");
      ck.require(lc >= -1e-10, "C positive semidefinite");
      worst_herm = std::max(worst_herm, pm.hermitian_defect);
      ck.require(pm.hermitian_defect <= 1e-12, "raw matrices Hermitian");
      const double cabs = pm.c.cwiseAbs().maxCoeff();
      for (int i = 0; i < pm.size(); ++i) {
        if (s.basis[i].family == BasisFamily::Gradient) continue;
        worst_kernel = std::max(worst_kernel, pm.c.row(i).cwiseAbs().maxCoeff() / cabs);
      }
      ck.require(worst_kernel <= 1e-10, "kernel rows of C vanish");
      const OrthoPencil op(pm);
      const double two_om = 2.0 * std::abs(pm.omega);
      ck.require(op.beta() <= two_om * (1.0 + 1e-10) + 1e-14, "beta_d <= 2|Omega|");
      for (int k = 0; k < 50; ++k) {
        const Eigen::VectorXcd v = random_vector(pm.size(), rng);
        const double a = v.dot(pm.a * v).real();
        const double b = std::abs(v.dot(pm.b * v));
        worst_ray = std::max(worst_ray, b / (two_om * a));
      }
      for (int k = 0; k < pm.size(); ++k) {
        worst_ray = std::max(worst_ray, std::abs(pm.b(k, k)) / (two_om * pm.a(k, k).real()));
      }
      if (m == 1) {
        const Setup z = make_setup(cfg, m, 0.0, BasisChoice::Mixed);
        ck.require(z.pm.b.cwiseAbs().maxCoeff() == 0.0, "B = 0 at Omega = 0");
      }
    }
    ck.require(worst_ray <= 1.0 + 1e-10, "Rayleigh bound |b| <= 2|Omega| a");
    ck.note("min eig A/|A| " + fmt(min_a) + ", min eig C/|C| " + fmt(min_c) + ", hermitian defect " +
            fmt(worst_herm) + ", kernel rows " + fmt(worst_kernel) + ", max |b|/(2|Omega|a) " +
            fmt(worst_ray));
  });
}

CriterionResult c6(const AcceptanceConfig& cfg) {
  return timed(6, "discrete spectral reality", 60.0, [&](Checks& ck) {
    std::ostringstream os;
    double worst_im = 0.0, worst_id = 0.0, worst_res = 0.0;
    for (int m : {0, 1, 2}) {
      const Setup s = make_setup(cfg, m, cfg.params.omega, BasisChoice::Mixed);
      const SpectrumResult r = solve_pencil(s.pm);
      const RealityReport rr = reality_check(r, 1e-8);
      ck.require(rr.pass, "max |Im sigma| <= 1e-8 max |sigma|");
      ck.require(r.paired, "conjugate pairing");
      worst_im = std::max(worst_im, rr.max_imag / rr.scale);
      const OrthoPencil op(s.pm);
      const double cn = max_abs_eig(op.c_hat());
      for (int k = 0; k < r.size(); ++k) {
        const RayleighCoefficients rc = rayleigh_coefficients(r.vectors.col(k), s.pm);
        worst_id = std::max(worst_id, rayleigh_identity_error(rc, r.sigma(k).real(), op.beta(), cn));
        worst_res = std::max(worst_res, r.residuals(k));
      }
      os << "m=" << m << " N=" << s.pm.size() << " ";
    }
    ck.require(worst_id <= 1e-8, "Rayleigh identity");
    ck.require(worst_res <= 1e-8, "pencil residuals");
    ck.note(os.str() + "max |Im|/scale " + fmt(worst_im) + ", identity " + fmt(worst_id) +
            ", residual " + fmt(worst_res));
  });
}

std::vector<double> lowest_positive(const SpectrumResult& r, int count) {
  std::vector<double> out;
  for (int k = 0; k < r.size() && static_cast<int>(out.size()) < count; ++k) {
    const double s = r.sigma(k).real();
    if (s > 1e-8 * r.scale) out.push_back(s);
  }
  return out;
}

CriterionResult c7(const AcceptanceConfig& cfg) {
  return timed(7, "non-rotating oracle equivalence", 120.0, [&](Checks& ck) {
    PhysicalParams p = cfg.params;
    p.omega = 0.0;
    const auto oracle = merged_oracle_spectrum(p, 10, 512, 6);
    for (int l = 0; l <= 10; ++l) {
      const RadialSpectrum rs = radial_sturm_liouville(p, l, 512);
      ck.require(rs.eigenvalues(0) > 0.0, "oracle eigenvalues positive");
      for (int i = 1; i < rs.eigenvalues.size(); ++i)
        ck.require(rs.eigenvalues(i) > rs.eigenvalues(i - 1), "oracle eigenvalues increasing");
    }
    const Setup coarse = make_setup(cfg, 0, 0.0, BasisChoice::Gradient);
    const Setup fine =
        make_setup(cfg, 0, 0.0, BasisChoice::Gradient, 2 * cfg.cells_s, 2 * cfg.cells_zeta_m0);
    const SpectrumResult rc = solve_pencil(coarse.pm);
    const SpectrumResult rf = solve_pencil(fine.pm);
    const auto sc = lowest_positive(rc, 5);
    const auto sf = lowest_positive(rf, 5);
    ck.require(sc.size() == 5 && sf.size() == 5, "five positive frequencies");
    double worst = 0.0, self = 0.0;
    for (int k = 0; k < 5 && k < static_cast<int>(sf.size()); ++k) {
      const double target = std::sqrt(oracle[k].lambda);
      worst = std::max(worst, std::abs(sf[k] - target) / target);
      self = std::max(self, std::abs(sf[k] - sc[k]) / sf[k]);
    }
    ck.require(worst <= 0.01, "refined frequencies within 1% of the oracle");
    // the spectrum is symmetric at Omega = 0
    double sym = 0.0;
    for (int k = 0; k < rf.size(); ++k)
      sym = std::max(sym, std::abs(rf.sigma(k).real() + rf.sigma(rf.size() - 1 - k).real()));
    ck.require(sym <= 1e-8 * rf.scale, "frequencies come in +- pairs");
    std::ostringstream os;
    os << "N " << coarse.pm.size() << " -> " << fine.pm.size() << ", oracle sqrt(lambda):";
    for (int k = 0; k < 5; ++k) os << " " << fmt(std::sqrt(oracle[k].lambda)) << "(l" << oracle[k].l << ")";
    ck.note(os.str() + ", max rel err " + fmt(worst) + ", coarse/fine change " + fmt(self));
  });
}

CriterionResult c8(const AcceptanceConfig& cfg) {
  return timed(8, "variational principle", 60.0, [&](Checks& ck) {
    const Setup s = make_setup(cfg, 1, cfg.params.omega, BasisChoice::Mixed);
    const SpectrumResult r = solve_pencil(s.pm);
    // lowest positive frequencies, as in the oracle comparison
    std::vector<int> lowest;
    for (int k = 0; k < r.size() && lowest.size() < 5; ++k)
      if (r.sigma(k).real() > 1e-8 * r.scale) lowest.push_back(k);
    ck.require(lowest.size() == 5, "five positive frequencies");
    double worst_eig = 0.0;
    for (int k : lowest) {
      const double sg = r.sigma(k).real();
      const RayleighCoefficients rc = rayleigh_coefficients(r.vectors.col(k), s.pm);
      const StationarityReport st = stationarity_residual(r.vectors.col(k), s.pm, branch_for(rc, sg));
      ck.require(std::abs(st.sigma - sg) <= 1e-10 * std::max(1.0, std::abs(sg)),
                 "functional reproduces the eigenfrequency");
      worst_eig = std::max(worst_eig, st.normalized);
    }
    ck.require(worst_eig <= 1e-5, "gradient at eigenvectors <= 1e-5");
    // smallest |sigma| overall; reported only, its O(h^2) difference error is divided by |sigma|
    int kmin = -1;
    for (int k = 0; k < r.size(); ++k) {
      const double a = std::abs(r.sigma(k).real());
      if (a > 1e-8 * r.scale && (kmin < 0 || a < std::abs(r.sigma(kmin).real()))) kmin = k;
    }
    double smallest = 0.0, smallest_h = 0.0;
    if (kmin >= 0) {
      const double sg = r.sigma(kmin).real();
      const RayleighCoefficients rc = rayleigh_coefficients(r.vectors.col(kmin), s.pm);
      smallest = stationarity_residual(r.vectors.col(kmin), s.pm, branch_for(rc, sg)).normalized;
      smallest_h = stationarity_residual(r.vectors.col(kmin), s.pm, branch_for(rc, sg), 1e-7).normalized;
      ck.note("smallest |sigma| " + fmt(sg) + ": " + fmt(smallest) + " at step 1e-6, " +
              fmt(smallest_h) + " at 1e-7");
    }
    std::mt19937_64 rng(cfg.seed + 8);
    double best_random = 1e300;
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXcd v = random_vector(s.pm.size(), rng);
      const StationarityReport st = stationarity_residual(v, s.pm, +1);
      best_random = std::min(best_random, st.normalized);
    }
    ck.require(best_random >= 1e-2, "gradient at random vectors >= 1e-2");
    ck.note("N " + std::to_string(s.pm.size()) + ", max at eigenvectors " + fmt(worst_eig) +
            ", min at random vectors " + fmt(best_random));
  });
}

CriterionResult c9(const AcceptanceConfig& cfg) {
  return timed(9, "secular determinant", 60.0, [&](Checks& ck) {
    const Setup s = make_setup(cfg, 1, cfg.params.omega, BasisChoice::Mixed);
    const SpectrumResult r = solve_pencil(s.pm);
    // simple real frequencies above the inertial band
    std::vector<double> freqs;
    for (int k = 0; k < r.size(); ++k) {
      const double sg = r.sigma(k).real();
      if (sg > 2.0 * std::abs(s.pm.omega) + 0.1 && r.simple(k)) freqs.push_back(sg);
    }
    ck.require(freqs.size() >= 4, "frequencies above the inertial band");
    if (freqs.size() < 4) return;
    // window with the first frequencies, edges midway between neighbours
    const int take = std::min<int>(12, static_cast<int>(freqs.size()) - 1);
    const double lo = 0.5 * (2.0 * std::abs(s.pm.omega) + 0.1 + freqs[0]);
    const double hi = 0.5 * (freqs[take - 1] + freqs[take]);
    std::vector<double> grid(2000);
    for (int i = 0; i < 2000; ++i) grid[i] = lo + (hi - lo) * i / 1999.0;
    double min_gap = 1e300;
    for (int i = 1; i < take; ++i) min_gap = std::min(min_gap, freqs[i] - freqs[i - 1]);
    ck.require((hi - lo) / 1999.0 < 0.5 * min_gap, "grid resolves the frequency gaps");

    const auto brackets = secular_determinant_scan(s.pm, grid, 1e-10);
    std::vector<double> in_range;
    for (double f : freqs)
      if (f > lo && f < hi) in_range.push_back(f);
    for (double f : in_range) {
      bool hit = false;
      for (const auto& b : brackets) hit = hit || std::abs(b.root - f) <= 1e-6;
      ck.require(hit, "every frequency bracketed");
    }
    double worst = 0.0;
    for (const auto& b : brackets) {
      double best = 1e300;
      for (int k = 0; k < r.size(); ++k) best = std::min(best, std::abs(r.sigma(k).real() - b.root));
      worst = std::max(worst, best);
      ck.require(best <= 1e-6, "every bracket is a frequency");
    }
    ck.require(brackets.size() == in_range.size(), "set equality");
    ck.note("window [" + fmt(lo) + ", " + fmt(hi) + "], " + std::to_string(brackets.size()) +
            " brackets, " + std::to_string(in_range.size()) + " frequencies, max mismatch " +
            fmt(worst));
  });
}

CriterionResult c10(const AcceptanceConfig& cfg) {
  return timed(10, "energy estimates", 120.0, [&](Checks& ck) {
    std::mt19937_64 rng(cfg.seed + 10);
    const Setup s = make_setup(cfg, 1, cfg.params.omega, BasisChoice::Mixed);
    const int n = s.pm.size();
    EvolutionState u0{random_vector(n, rng), random_vector(n, rng), 0.0};
    const EnergyPair e0 = energy(u0, s.pm);
    const double nrm = 1.0 / std::sqrt(e0.e);
    u0.xi *= nrm;
    u0.xi_dot *= nrm;
    EvolveOptions eo;
    eo.log_every = 100;
    const EvolutionReport hom = evolve(u0, 10.0, 0.01, s.pm, {}, eo);
    ck.require(hom.bound_ok, "homogeneous energy bound");
    const Eigen::VectorXcd fvec = random_vector(n, rng);
    const EvolutionReport forced =
        evolve(u0, 10.0, 0.01, s.pm, [&](double) { return fvec; }, eo);
    ck.require(forced.bound_ok, "forced energy bound");

    // Omega = 0, real data, 1e4 steps
    const Setup z = make_setup(cfg, 0, 0.0, BasisChoice::Mixed);
    const int nz = z.pm.size();
    EvolutionState r0{random_real(nz, rng).cast<cplx>(), random_real(nz, rng).cast<cplx>(), 0.0};
    const EvolutionReport cons = evolve(r0, 100.0, 0.01, z.pm, {}, eo);
    ck.require(cons.steps == 10000, "10^4 steps");
    ck.require(cons.max_phys_drift <= 1e-10, "physical energy conserved");
    const double imag = cons.final_state.xi.imag().norm() + cons.final_state.xi_dot.imag().norm();
    ck.require(imag <= 1e-12 * cons.final_state.xi.norm(), "real data stays real");

    // single mode: order of accuracy and the closed form
    const SpectrumResult sr = solve_pencil(z.pm);
    int k0 = -1;
    for (int k = 0; k < sr.size() && k0 < 0; ++k)
      if (sr.sigma(k).real() > 1e-6 * sr.scale) k0 = k;
    ck.require(k0 >= 0, "a positive frequency");
    if (k0 < 0) return;
    const double sg = sr.sigma(k0).real();
    Eigen::VectorXcd mode = sr.vectors.col(k0);
    Eigen::Index imax = 0;
    mode.cwiseAbs().maxCoeff(&imax);
    mode *= std::abs(mode(imax)) / mode(imax);
    const double period = 2.0 * M_PI / sg;
    const EvolutionState m0{mode, Eigen::VectorXcd::Zero(nz), 0.0};
    double err[3];
    const int steps[3] = {500, 1000, 2000};
    double xi_err_2000 = 0.0, ephys_err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const EvolutionReport er = evolve(m0, period, period / steps[i], z.pm, {}, eo);
      const MidpointStepper ms(z.pm, period / steps[i]);
      err[i] = (ms.pack(er.final_state) - ms.pack(m0)).norm() / ms.pack(m0).norm();
      if (i == 2) {
        xi_err_2000 = (er.final_state.xi - mode).norm() / mode.norm();
        ephys_err = std::abs(er.log.back().e_phys - sg * sg) / (sg * sg);
      }
    }
    const double ratio1 = err[0] / err[1];
    const double ratio2 = err[1] / err[2];
    ck.require(std::abs(ratio1 - 4.0) <= 0.3 && std::abs(ratio2 - 4.0) <= 0.3, "order 2");
    ck.require(xi_err_2000 <= 1e-6, "single mode returns after one period");
    ck.require(ephys_err <= 1e-8, "E_phys = sigma^2 for a unit mode");
    ck.note("Lambda " + fmt(hom.lambda) + " (beta_d " + fmt(hom.beta_d) + ", 2|Omega| " +
            fmt(hom.two_omega) + "), drift " + fmt(cons.max_phys_drift) + ", ratios " +
            fmt(ratio1) + " " + fmt(ratio2) + ", mode error " + fmt(xi_err_2000));
  });
}

CriterionResult c11(const AcceptanceConfig& cfg) {
  return timed(11, "non-real eigenvectors", 30.0, [&](Checks& ck) {
    const Setup s = make_setup(cfg, 0, cfg.params.omega, BasisChoice::Mixed);
    const SpectrumResult r = solve_pencil(s.pm);
    int tested = 0, real_found = 0;
    for (int k = 0; k < r.size(); ++k) {
      if (std::abs(r.sigma(k)) <= 1e-8 * r.scale) continue;
      ++tested;
      if (phase_reality_test(r.vectors.col(k), s.pm)) ++real_found;
    }
    ck.require(tested > 0 && real_found == 0, "rotating eigenvectors are not real");
    const Setup z = make_setup(cfg, 0, 0.0, BasisChoice::Gradient);
    const SpectrumResult rz = solve_pencil(z.pm);
    int ztested = 0, zreal = 0;
    for (int k = 0; k < rz.size(); ++k) {
      if (std::abs(rz.sigma(k)) <= 1e-8 * rz.scale) continue;
      ++ztested;
      Eigen::VectorXcd v = rz.vectors.col(k);
      Eigen::Index imax = 0;
      v.cwiseAbs().maxCoeff(&imax);
      v *= std::abs(v(imax)) / v(imax);
      if (phase_reality_test(v, z.pm)) ++zreal;
    }
    ck.require(ztested > 0 && zreal == ztested, "non-rotating gradient modes are real");
    ck.note("Omega != 0: " + std::to_string(real_found) + "/" + std::to_string(tested) +
            " real; Omega = 0: " + std::to_string(zreal) + "/" + std::to_string(ztested) + " real");
  });
}

CriterionResult c12(const AcceptanceConfig& cfg) {
  return timed(12, "resolvent bound", 30.0, [&](Checks& ck) {
    std::ostringstream os;
    for (int m : {0, 1}) {
      const Setup s = make_setup(cfg, m, cfg.params.omega, BasisChoice::Mixed);
      const OrthoPencil op(s.pm);
      const double beta = op.beta();
      for (double c : {0.0, 1.0, 2.0 * std::abs(cfg.params.omega)}) {
        const double lambda = 2.0 * c * beta + 1.0;
        const ResolventReport rr = resolvent_bound_check(s.pm, c, lambda);
        ck.require(rr.norm <= rr.bound + 1e-10, "resolvent norm bound");
        os << "m" << m << " c=" << fmt(c) << ": " << fmt(rr.norm) << "<=" << fmt(rr.bound) << " ";
      }
    }
    ck.note(os.str());
  });
}

}  // namespace

std::string CriterionResult::line() const {
  char head[160];
  std::snprintf(head, sizeof head, "%s %2d  %-34s (%.2f s / %.0f s)", pass() ? "PASS" : "FAIL", id,
                title.c_str(), seconds, time_limit);
  std::string s = head;
  if (checks_pass && seconds > time_limit) s += "  over time limit;";
  return s + "  " + detail;
}

const std::vector<CriterionFn>& acceptance_criteria() {
  static const std::vector<CriterionFn> all = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12};
  return all;
}

CriterionResult run_criterion(int id, const AcceptanceConfig& cfg) {
  const auto& all = acceptance_criteria();
  if (id < 1 || id > static_cast<int>(all.size())) throw DomainError("no such criterion");
  return all[static_cast<std::size_t>(id - 1)](cfg);
}

std::vector<CriterionResult> run_acceptance(
    const AcceptanceConfig& cfg, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (const auto& fn : acceptance_criteria()) {
    out.push_back(fn(cfg));
    if (on_result) on_result(out.back());
  }
  return out;
}

}  // namespace rotatm
