#include "rotatm/assembly.hpp"

#include "rotatm/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rotatm {

namespace {

constexpr cplx kI(0.0, 1.0);

struct Piece {
  double lo;
  double hi;
  bool jacobi;
};

std::vector<Piece> s_pieces(int cs, int cells, const MeshOptions& o) {
  const double h = 1.0 / cells;
  const double lo = cs * h;
  if (cs + 1 < cells) return {{lo, lo + h, false}};
  std::vector<Piece> out;
  double a = lo;
  double gap = h;
  for (int k = 0; k < o.grading_levels; ++k) {
    gap /= o.grading_factor;
    out.push_back({a, 1.0 - gap, false});
    a = 1.0 - gap;
  }
  out.push_back({a, 1.0, o.jacobi_outer});
  return out;
}

struct SplineFactor {
  Jet1 s;
  Jet1 z;
};

Jet1 merged_s_jet(const UniformCubicSplines& sp, int i, double s) {
  if (i == 0) {
    const Jet1 a = sp.eval(0, s);
    const Jet1 b = sp.eval(1, s);
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
  }
  return sp.eval(i + 1, s);
}

// Scalar potential jet with respect to (varpi, z): value, first and second derivatives.
struct Jet2 {
  double v, w, z, ww, wz, zz;
};

Jet2 chain(const Jet1& S, const Jet1& Z, const QuadNode& x) {
  const double f = S.v * Z.v;
  const double fs = S.d1 * Z.v;
  const double ft = S.v * Z.d1;
  const double fss = S.d2 * Z.v;
  const double fst = S.d1 * Z.d1;
  const double ftt = S.v * Z.d2;
  Jet2 j;
  j.v = f;
  j.w = fs * x.s_w + ft * x.t_w;
  j.z = fs * x.s_z + ft * x.t_z;
  j.ww = fss * x.s_w * x.s_w + 2.0 * fst * x.s_w * x.t_w + ftt * x.t_w * x.t_w + fs * x.s_ww +
         ft * x.t_ww;
  j.wz = fss * x.s_w * x.s_z + fst * (x.s_w * x.t_z + x.s_z * x.t_w) + ftt * x.t_w * x.t_z +
         fs * x.s_wz + ft * x.t_wz;
  j.zz = fss * x.s_z * x.s_z + 2.0 * fst * x.s_z * x.t_z + ftt * x.t_z * x.t_z + fs * x.s_zz +
         ft * x.t_zz;
  return j;
}

// g = F^w / w + dF^w/dw + (i m / w) F^phi + dF^z/dz
cplx flux_divergence(cplx fw, cplx dfw_dw, cplx fphi, cplx dfz_dz, int m, double varpi) {
  return fw / varpi + dfw_dw + kI * static_cast<double>(m) / varpi * fphi + dfz_dz;
}

bool overlaps(double a0, double a1, double b0, double b1) { return a0 < b1 && b0 < a1; }

std::vector<std::vector<int>> active_lists(const MeridionalMesh& mesh,
                                           const std::vector<BasisField>& basis) {
  const int ns = mesh.cells_s();
  const int nz = mesh.cells_zeta();
  const double hs = 1.0 / ns;
  const double hz = 2.0 / nz;
  std::vector<std::vector<int>> out(static_cast<std::size_t>(ns * nz));
  for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
    const BasisField& f = basis[k];
    for (int cs = 0; cs < ns; ++cs) {
      if (!overlaps(f.s_lo, f.s_hi, cs * hs, (cs + 1) * hs)) continue;
      for (int cz = 0; cz < nz; ++cz) {
        if (!overlaps(f.zeta_lo, f.zeta_hi, -1.0 + cz * hz, -1.0 + (cz + 1) * hz)) continue;
        out[static_cast<std::size_t>(cs * nz + cz)].push_back(k);
      }
    }
  }
  return out;
}

struct Wanted {
  bool a = false;
  bool b = false;
  bool c = false;
};

void sweep(const MeridionalMesh& mesh, const std::vector<BasisField>& basis, double omega,
           Wanted want, Eigen::MatrixXcd* a, Eigen::MatrixXcd* b, Eigen::MatrixXcd* c,
           double* defect = nullptr) {
  if (basis.empty()) throw DomainError("basis is empty");
  const int n = static_cast<int>(basis.size());
  if (want.a) *a = Eigen::MatrixXcd::Zero(n, n);
  if (want.b) *b = Eigen::MatrixXcd::Zero(n, n);
  if (want.c) *c = Eigen::MatrixXcd::Zero(n, n);
  const auto active = active_lists(mesh, basis);
  const PhysicalParams& p = mesh.state().params();
  const double ag = p.a_const * p.gamma;
  std::vector<FieldSample> samples;
  for (int cs = 0; cs < mesh.cells_s(); ++cs) {
    for (int cz = 0; cz < mesh.cells_zeta(); ++cz) {
      const auto& act = active[static_cast<std::size_t>(cs * mesh.cells_zeta() + cz)];
      if (act.empty()) continue;
      const auto [first, last] = mesh.cell_range(cs, cz);
      samples.resize(act.size());
      for (std::size_t q = first; q < last; ++q) {
        const QuadNode& x = mesh.nodes()[q];
        for (std::size_t k = 0; k < act.size(); ++k)
          samples[k] = evaluate_field(mesh, basis[act[k]], x);
        const double wa = x.weight * x.rho;
        const double wb = 2.0 * omega * wa;
        const double wc = x.rho > 0.0 ? x.weight * ag * std::pow(x.rho, p.gamma - 2.0) : 0.0;
        for (std::size_t jj = 0; jj < act.size(); ++jj) {
          const FieldSample& fj = samples[jj];
          for (std::size_t ii = 0; ii < act.size(); ++ii) {
            const FieldSample& fi = samples[ii];
            const int i = act[ii];
            const int j = act[jj];
            if (want.a) {
              (*a)(i, j) += wa * (fj.xi[0] * std::conj(fi.xi[0]) + fj.xi[1] * std::conj(fi.xi[1]) +
                                  fj.xi[2] * std::conj(fi.xi[2]));
            }
            if (want.b && omega != 0.0) {
              // J* xi = i (-xi^phi, xi^varpi, 0)
              (*b)(i, j) += wb * kI *
                            (-fj.xi[1] * std::conj(fi.xi[0]) + fj.xi[0] * std::conj(fi.xi[1]));
            }
            if (want.c) (*c)(i, j) += wc * fj.g * std::conj(fi.g);
          }
        }
      }
    }
  }
  auto herm = [defect](Eigen::MatrixXcd& m) {
    if (defect) {
      const double big = m.cwiseAbs().maxCoeff();
      if (big > 0.0)
        *defect = std::max(*defect, (m - m.adjoint()).cwiseAbs().maxCoeff() / big);
    }
    const Eigen::MatrixXcd t = 0.5 * (m + m.adjoint());
    m = t;
  };
  if (want.a) herm(*a);
  if (want.b) herm(*b);
  if (want.c) herm(*c);
}

void check_mass_rank(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-12 * hi)) {
    std::ostringstream os;
    os << "mass matrix is rank deficient (min eigenvalue " << lo << ", max " << hi << ")";
    throw Error("degenerate-basis", os.str());
  }
}

}  // namespace

MeridionalMesh::MeridionalMesh(const StationaryState& state, int m, int cells_s, int cells_zeta,
                               MeshOptions opts)
    : state_(state),
      analysis_(analyze_level_set(state.kappa(), state.lambda())),
      m_(m),
      s_sp_(0.0, 1.0, std::max(cells_s, 1)),
      z_sp_(-1.0, 1.0, std::max(cells_zeta, 1)),
      opts_(opts) {
  if (cells_s < 4 || cells_zeta < 4) throw DomainError("mesh needs at least 4 cells per direction");
  if (opts.order < 1) throw DomainError("quadrature order must be positive");
  if (!state.profile().is_zero())
    throw DomainError("the mapped mesh supports uniform rotation only");
  if (!analysis_.bounded())
    throw UnboundedDomainError("configuration violates the admissibility condition (case L)");
  if (analysis_.case_label == LevelSetCase::M)
    throw GeometryError("critical configuration (case M) has a boundary corner");

  const PhysicalParams& p = state.params();
  const QuadRule gl = gauss_legendre(opts.order);
  const QuadRule gj = gauss_jacobi(opts.order, 1.0 / (p.gamma - 1.0) - 1.0, 0.0);
  const double alpha = 1.0 / (p.gamma - 1.0) - 1.0;
  const double hz = 2.0 / cells_zeta;

  cell_start_.reserve(static_cast<std::size_t>(cells_s * cells_zeta + 1));
  for (int cs = 0; cs < cells_s; ++cs) {
    const auto pieces = s_pieces(cs, cells_s, opts);
    for (int cz = 0; cz < cells_zeta; ++cz) {
      cell_start_.push_back(nodes_.size());
      const double zlo = -1.0 + cz * hz;
      for (int qz = 0; qz < opts.order; ++qz) {
        const double zeta = zlo + 0.5 * hz * (gl.nodes[qz] + 1.0);
        const double wz = 0.5 * hz * gl.weights[qz];
        for (const Piece& pc : pieces) {
          const QuadRule& rule = pc.jacobi ? gj : gl;
          const double half = 0.5 * (pc.hi - pc.lo);
          for (int qs = 0; qs < opts.order; ++qs) {
            const double xs = rule.nodes[qs];
            double ws = half * rule.weights[qs];
            if (pc.jacobi) ws /= std::pow(1.0 - xs, alpha);
            QuadNode node = make_node(pc.lo + half * (xs + 1.0), zeta);
            node.weight *= ws * wz;
            node.cell_s = cs;
            node.cell_zeta = cz;
            nodes_.push_back(node);
          }
        }
      }
    }
  }
  cell_start_.push_back(nodes_.size());
}

std::pair<std::size_t, std::size_t> MeridionalMesh::cell_range(int cs, int cz) const {
  const std::size_t k = static_cast<std::size_t>(cs * cells_zeta() + cz);
  return {cell_start_[k], cell_start_[k + 1]};
}

QuadNode MeridionalMesh::make_node(double s, double zeta) const {
  if (s < 0.0 || s > 1.0 || zeta < -1.0 || zeta > 1.0)
    throw DomainError("mapped coordinates outside [0,1] x [-1,1]");
  const PhysicalParams& p = state_.params();
  const RadiusJet rj = outer_radius_jet(zeta, analysis_);
  const double l = p.r0 * (rj.rho - 1.0);
  const double lp = p.r0 * rj.d1;
  const double lpp = p.r0 * rj.d2;
  QuadNode x;
  x.s = s;
  x.zeta = zeta;
  x.r = p.r0 + s * l;
  x.varpi = x.r * std::sqrt(std::max(0.0, 1.0 - zeta * zeta));
  x.z = x.r * zeta;
  x.weight = 2.0 * M_PI * x.r * x.r * l;

  const double r = x.r;
  const double w = x.varpi;
  const double z = x.z;
  const double r3 = r * r * r;
  const double r5 = r3 * r * r;
  const double r_w = w / r, r_z = z / r;
  const double r_ww = z * z / r3, r_wz = -w * z / r3, r_zz = w * w / r3;
  x.t_w = -z * w / r3;
  x.t_z = w * w / r3;
  x.t_ww = z * (2.0 * w * w - z * z) / r5;
  x.t_wz = w * (2.0 * z * z - w * w) / r5;
  x.t_zz = -3.0 * w * w * z / r5;
  x.s_w = (r_w - s * lp * x.t_w) / l;
  x.s_z = (r_z - s * lp * x.t_z) / l;
  auto second = [&](double r_xy, double s_x, double s_y, double t_x, double t_y, double t_xy) {
    return (r_xy - s_y * lp * t_x - s * lpp * t_x * t_y - s * lp * t_xy - s_x * lp * t_y) / l;
  };
  x.s_ww = second(r_ww, x.s_w, x.s_w, x.t_w, x.t_w, x.t_ww);
  x.s_wz = second(r_wz, x.s_w, x.s_z, x.t_w, x.t_z, x.t_wz);
  x.s_zz = second(r_zz, x.s_z, x.s_z, x.t_z, x.t_z, x.t_zz);

  // The inner sphere itself is excluded from the evaluators; nudge outward.
  CylPoint c{w, z};
  const double floor_r = p.r0 * (1.0 + 1e-13);
  if (r < floor_r) c = {w * floor_r / r, z * floor_r / r};
  x.upsilon = state_.upsilon(c);
  x.rho = rho_of_upsilon(x.upsilon, p);
  const Eigen::Vector2d gr = state_.grad_rho(c);
  x.rho_w = gr.x();
  x.rho_z = gr.y();
  x.sigma_bar = state_.sigma_bar(c);
  return x;
}

double MeridionalMesh::integrate(const std::function<double(const QuadNode&)>& f) const {
  double sum = 0.0;
  for (const QuadNode& x : nodes_) sum += x.weight * f(x);
  return sum;
}

double MeridionalMesh::volume() const {
  // int_0^1 (R0 + s l)^2 l ds = (r_out^3 - R0^3) / 3, then Gauss in zeta per cell.
  const double r0 = state_.params().r0;
  const QuadRule gl = gauss_legendre(opts_.order);
  const double hz = 2.0 / cells_zeta();
  double sum = 0.0;
  for (int cz = 0; cz < cells_zeta(); ++cz) {
    for (int q = 0; q < opts_.order; ++q) {
      const double zeta = -1.0 + cz * hz + 0.5 * hz * (gl.nodes[q] + 1.0);
      const double ro = r0 * outer_radius_jet(zeta, analysis_).rho;
      sum += 0.5 * hz * gl.weights[q] * (ro * ro * ro - r0 * r0 * r0) / 3.0;
    }
  }
  return 2.0 * M_PI * sum;
}

MeridionalMesh build_mesh(const StationaryState& state, int m, int cells_s, int cells_zeta,
                          MeshOptions opts) {
  return MeridionalMesh(state, m, cells_s, cells_zeta, opts);
}

std::string to_string(BasisFamily f) {
  switch (f) {
    case BasisFamily::Gradient: return "gradient";
    case BasisFamily::KernelPoloidal: return "kernel-poloidal";
    case BasisFamily::KernelToroidal: return "kernel-toroidal";
    case BasisFamily::Custom: return "custom";
  }
  return "?";
}

BasisChoice basis_choice_from_string(const std::string& s) {
  if (s == "gradient") return BasisChoice::Gradient;
  if (s == "kernel") return BasisChoice::Kernel;
  if (s == "mixed") return BasisChoice::Mixed;
  throw DomainError("unknown basis family '" + s + "' (gradient, kernel, mixed)");
}

BasisCounts count_families(const std::vector<BasisField>& basis) {
  BasisCounts c;
  for (const auto& f : basis) {
    switch (f.family) {
      case BasisFamily::Gradient: ++c.gradient; break;
      case BasisFamily::KernelPoloidal:
      case BasisFamily::KernelToroidal: ++c.kernel; break;
      case BasisFamily::Custom: ++c.custom; break;
    }
  }
  return c;
}

std::vector<BasisField> basis_fields(const MeridionalMesh& mesh, const BasisOptions& opts) {
  const UniformCubicSplines& ss = mesh.s_splines();
  const UniformCubicSplines& zs = mesh.zeta_splines();
  const int m = mesh.m();
  std::vector<BasisField> out;

  if (opts.choice != BasisChoice::Kernel) {
    // zeta-splines kept away from the axis for m != 0 (they vanish to third order there)
    const int jlo = m == 0 ? 0 : 3;
    const int jhi = m == 0 ? zs.count() - 1 : zs.count() - 4;
    const int n_merged = ss.count() - 1;
    for (int i = 0; i < n_merged; ++i) {
      for (int j = jlo; j <= jhi; ++j) {
        // constants are not gradients: drop one function when m = 0
        if (m == 0 && i == n_merged - 1 && j == 0) continue;
        BasisField f;
        f.family = BasisFamily::Gradient;
        f.i_s = i;
        f.i_zeta = j;
        f.s_lo = i == 0 ? 0.0 : ss.support_lo(i + 1);
        f.s_hi = i == 0 ? ss.support_hi(1) : ss.support_hi(i + 1);
        f.zeta_lo = zs.support_lo(j);
        f.zeta_hi = zs.support_hi(j);
        out.push_back(f);
      }
    }
  }
  if (opts.choice != BasisChoice::Gradient) {
    const double h = ss.width();
    for (BasisFamily fam : {BasisFamily::KernelPoloidal, BasisFamily::KernelToroidal}) {
      for (int i = 0; i < ss.count(); ++i) {
        if (ss.support_lo(i) < h - 1e-12 || ss.support_hi(i) > opts.kernel_s_max + 1e-12) continue;
        for (int j = 0; j < zs.count(); ++j) {
          if (zs.support_lo(j) <= -1.0 || zs.support_hi(j) >= 1.0) continue;
          BasisField f;
          f.family = fam;
          f.i_s = i;
          f.i_zeta = j;
          f.s_lo = ss.support_lo(i);
          f.s_hi = ss.support_hi(i);
          f.zeta_lo = zs.support_lo(j);
          f.zeta_hi = zs.support_hi(j);
          out.push_back(f);
        }
      }
    }
  }
  return out;
}

BasisField custom_field(const MeridionalMesh& mesh, int cs_lo, int cs_hi, int cz_lo, int cz_hi,
                        std::array<cplx, 3> components) {
  if (cs_lo < 0 || cs_hi > mesh.cells_s() || cs_lo >= cs_hi || cz_lo < 0 ||
      cz_hi > mesh.cells_zeta() || cz_lo >= cz_hi)
    throw DomainError("custom field box outside the mesh");
  BasisField f;
  f.family = BasisFamily::Custom;
  f.s_lo = static_cast<double>(cs_lo) / mesh.cells_s();
  f.s_hi = static_cast<double>(cs_hi) / mesh.cells_s();
  f.zeta_lo = -1.0 + 2.0 * cz_lo / mesh.cells_zeta();
  f.zeta_hi = -1.0 + 2.0 * cz_hi / mesh.cells_zeta();
  f.constant = components;
  return f;
}

FieldSample evaluate_field(const MeridionalMesh& mesh, const BasisField& f, const QuadNode& x) {
  FieldSample out;
  if (x.s < f.s_lo || x.s > f.s_hi || x.zeta < f.zeta_lo || x.zeta > f.zeta_hi) return out;
  const int m = mesh.m();
  const double md = static_cast<double>(m);
  const double w = x.varpi;
  switch (f.family) {
    case BasisFamily::Gradient: {
      const Jet2 c = chain(merged_s_jet(mesh.s_splines(), f.i_s, x.s),
                           mesh.zeta_splines().eval(f.i_zeta, x.zeta), x);
      out.xi = {c.w, kI * md * c.v / w, c.z};
      out.g = x.rho * (c.w / w + c.ww + c.zz - md * md * c.v / (w * w)) + x.rho_w * c.w +
              x.rho_z * c.z;
      break;
    }
    case BasisFamily::KernelPoloidal: {
      // rho xi = curl(psi e_phi e^{i m phi})
      const Jet2 c = chain(mesh.s_splines().eval(f.i_s, x.s),
                           mesh.zeta_splines().eval(f.i_zeta, x.zeta), x);
      const cplx fw = -c.z;
      const cplx fz = c.v / w + c.w;
      out.xi = {fw / x.rho, 0.0, fz / x.rho};
      out.g = flux_divergence(fw, -c.wz, 0.0, c.z / w + c.wz, m, w);
      break;
    }
    case BasisFamily::KernelToroidal: {
      // rho xi = curl(psi e_z e^{i m phi})
      const Jet2 c = chain(mesh.s_splines().eval(f.i_s, x.s),
                           mesh.zeta_splines().eval(f.i_zeta, x.zeta), x);
      const cplx fw = kI * md * c.v / w;
      const cplx fphi = -c.w;
      const cplx dfw = kI * md * (c.w / w - c.v / (w * w));
      out.xi = {fw / x.rho, fphi / x.rho, 0.0};
      out.g = flux_divergence(fw, dfw, fphi, 0.0, m, w);
      break;
    }
    case BasisFamily::Custom: {
      out.xi = f.constant;
      out.g = flux_divergence(x.rho * f.constant[0], x.rho_w * f.constant[0],
                              x.rho * f.constant[1], x.rho_z * f.constant[2], m, w);
      break;
    }
  }
  return out;
}

cplx radial_component(const FieldSample& s, const QuadNode& x) {
  return (x.varpi * s.xi[0] + x.z * s.xi[2]) / x.r;
}

Eigen::MatrixXcd assemble_mass(const MeridionalMesh& mesh, const std::vector<BasisField>& basis,
                               bool check_rank) {
  Eigen::MatrixXcd a;
  sweep(mesh, basis, 0.0, {true, false, false}, &a, nullptr, nullptr);
  if (check_rank) check_mass_rank(a);
  return a;
}

Eigen::MatrixXcd assemble_coriolis(const MeridionalMesh& mesh,
                                   const std::vector<BasisField>& basis, double omega) {
  Eigen::MatrixXcd b;
  sweep(mesh, basis, omega, {false, true, false}, nullptr, &b, nullptr);
  return b;
}

Eigen::MatrixXcd assemble_stiffness(const MeridionalMesh& mesh,
                                    const std::vector<BasisField>& basis) {
  Eigen::MatrixXcd c;
  sweep(mesh, basis, 0.0, {false, false, true}, nullptr, nullptr, &c);
  return c;
}

PencilMatrices assemble_pencil(const MeridionalMesh& mesh, const std::vector<BasisField>& basis,
                               double omega) {
  PencilMatrices pm;
  sweep(mesh, basis, omega, {true, true, true}, &pm.a, &pm.b, &pm.c, &pm.hermitian_defect);
  check_mass_rank(pm.a);
  pm.m = mesh.m();
  pm.omega = omega;
  pm.cells_s = mesh.cells_s();
  pm.cells_zeta = mesh.cells_zeta();
  pm.order = mesh.options().order;
  pm.counts = count_families(basis);
  return pm;
}

std::vector<cplx> basis_force(const MeridionalMesh& mesh, const BasisField& f) {
  std::vector<cplx> out;
  out.reserve(mesh.nodes().size());
  for (const QuadNode& x : mesh.nodes()) {
    const FieldSample s = evaluate_field(mesh, f, x);
    out.push_back(x.rho > 0.0 ? -x.sigma_bar * s.g : cplx(0.0));
  }
  return out;
}

Background Background::from_state(const StationaryState& state) {
  Background bg;
  bg.rho = [state](const Eigen::Vector3d& x) { return state.rho(x); };
  bg.grad_rho = [state](const Eigen::Vector3d& x) {
    const CylPoint c = to_cyl(x);
    const Eigen::Vector2d g = state.grad_rho(c);
    if (c.varpi == 0.0) return Eigen::Vector3d(0.0, 0.0, g.y());
    return Eigen::Vector3d(g.x() * x.x() / c.varpi, g.x() * x.y() / c.varpi, g.y());
  };
  bg.sigma_bar = [state](const Eigen::Vector3d& x) { return state.sigma_bar(to_cyl(x)); };
  bg.contains = [state](const Eigen::Vector3d& x) { return domain_contains(x, state); };
  return bg;
}

std::function<double(const Eigen::Vector3d&)> initial_upsilon_from_displacement(
    DisplacementField xi0, const StationaryState& state) {
  return [xi0 = std::move(xi0), state](const Eigen::Vector3d& x) {
    const CylPoint c = to_cyl(x);
    const double ub = state.upsilon(c);
    const Eigen::Vector2d g = state.grad_upsilon(c);
    Eigen::Vector3d grad(0.0, 0.0, g.y());
    if (c.varpi > 0.0) {
      grad.x() = g.x() * x.x() / c.varpi;
      grad.y() = g.x() * x.y() / c.varpi;
    }
    const double div = xi0.jacobian(x).trace();
    return ub - (state.params().gamma - 1.0) * ub * div - grad.dot(xi0.value(x));
  };
}

std::function<double(const Eigen::Vector3d&)> linearized_force(DisplacementField xi,
                                                               Background bg) {
  return [xi = std::move(xi), bg = std::move(bg)](const Eigen::Vector3d& x) {
    if (bg.contains && !bg.contains(x)) {
      std::ostringstream os;
      os << "linearized force evaluated outside the fluid domain at (" << x.x() << ", " << x.y()
         << ", " << x.z() << ")";
      throw DomainError(os.str());
    }
    const double g = bg.rho(x) * xi.jacobian(x).trace() + bg.grad_rho(x).dot(xi.value(x));
    return -bg.sigma_bar(x) * g;
  };
}

}  // namespace rotatm
