#pragma once

#include "rotatm/atmosphere.hpp"
#include "rotatm/geometry.hpp"
#include "rotatm/quadrature.hpp"

#include <Eigen/Core>

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace rotatm {

using cplx = std::complex<double>;

struct MeshOptions {
  int order = 8;              ///< Gauss points per direction per cell
  int grading_levels = 3;     ///< geometric subdivisions of the outermost s-cell
  double grading_factor = 2.0;
  bool jacobi_outer = true;   ///< Gauss-Jacobi on the piece touching the vacuum boundary
};

/// Quadrature node in mapped coordinates (s, zeta) with the background and the
/// chain-rule derivatives of (s, zeta) with respect to (varpi, z).
struct QuadNode {
  double s = 0.0;
  double zeta = 0.0;
  double weight = 0.0;  ///< includes 2 pi r^2 l(zeta)
  double varpi = 0.0;
  double z = 0.0;
  double r = 0.0;
  double upsilon = 0.0;
  double rho = 0.0;
  double rho_w = 0.0;  ///< d rho / d varpi
  double rho_z = 0.0;
  double sigma_bar = 0.0;
  // s and zeta as functions of (varpi, z)
  double s_w = 0, s_z = 0, s_ww = 0, s_wz = 0, s_zz = 0;
  double t_w = 0, t_z = 0, t_ww = 0, t_wz = 0, t_zz = 0;
  int cell_s = 0;
  int cell_zeta = 0;
};

/// Tensor quadrature on the shell R0 < r < r_out(zeta), r = R0 + s (r_out - R0), zeta = z / r.
class MeridionalMesh {
 public:
  MeridionalMesh(const StationaryState& state, int m, int cells_s, int cells_zeta,
                 MeshOptions opts = {});

  int m() const { return m_; }
  const StationaryState& state() const { return state_; }
  const LevelSetAnalysis& analysis() const { return analysis_; }
  const UniformCubicSplines& s_splines() const { return s_sp_; }
  const UniformCubicSplines& zeta_splines() const { return z_sp_; }
  const MeshOptions& options() const { return opts_; }
  const std::vector<QuadNode>& nodes() const { return nodes_; }
  int cells_s() const { return s_sp_.cells(); }
  int cells_zeta() const { return z_sp_.cells(); }
  /// Node index range [first, second) of cell (cs, cz).
  std::pair<std::size_t, std::size_t> cell_range(int cs, int cz) const;

  /// Node at (s, zeta) with zero weight; s = 0 is allowed (background is
  /// evaluated just outside the inner sphere).
  QuadNode make_node(double s, double zeta) const;

  double integrate(const std::function<double(const QuadNode&)>& f) const;
  double volume() const;

 private:
  StationaryState state_;
  LevelSetAnalysis analysis_;
  int m_;
  UniformCubicSplines s_sp_;
  UniformCubicSplines z_sp_;
  MeshOptions opts_;
  std::vector<QuadNode> nodes_;
  std::vector<std::size_t> cell_start_;
};

MeridionalMesh build_mesh(const StationaryState& state, int m, int cells_s, int cells_zeta,
                          MeshOptions opts = {});

enum class BasisFamily { Gradient, KernelPoloidal, KernelToroidal, Custom };
std::string to_string(BasisFamily f);

/// One Galerkin field (xi^varpi, xi^phi, xi^z) e^{i m phi}.
struct BasisField {
  BasisFamily family = BasisFamily::Gradient;
  int i_s = 0;     ///< s-spline index (merged index for the gradient family)
  int i_zeta = 0;  ///< zeta-spline index
  double s_lo = 0.0, s_hi = 1.0, zeta_lo = -1.0, zeta_hi = 1.0;  ///< support box
  std::array<cplx, 3> constant{};  ///< custom fields: constant components on the box
};

enum class BasisChoice { Gradient, Kernel, Mixed };
BasisChoice basis_choice_from_string(const std::string& s);

struct BasisOptions {
  BasisChoice choice = BasisChoice::Mixed;
  double kernel_s_max = 0.8;  ///< kernel potentials vanish beyond this s
};

struct BasisCounts {
  int gradient = 0;
  int kernel = 0;
  int custom = 0;
  int total() const { return gradient + kernel + custom; }
};

BasisCounts count_families(const std::vector<BasisField>& basis);

std::vector<BasisField> basis_fields(const MeridionalMesh& mesh, const BasisOptions& opts = {});

/// Constant vector field on the box [s_lo, s_hi] x [zeta_lo, zeta_hi] (box edges on cell edges).
BasisField custom_field(const MeridionalMesh& mesh, int cs_lo, int cs_hi, int cz_lo, int cz_hi,
                        std::array<cplx, 3> components);

/// Field value and g = div(rho xi) at a node.
struct FieldSample {
  std::array<cplx, 3> xi{};
  cplx g = 0.0;
};

FieldSample evaluate_field(const MeridionalMesh& mesh, const BasisField& f, const QuadNode& x);

/// Radial component (xi | e_r) at a node.
cplx radial_component(const FieldSample& s, const QuadNode& x);

struct PencilMatrices {
  Eigen::MatrixXcd a;  ///< mass
  Eigen::MatrixXcd b;  ///< Coriolis
  Eigen::MatrixXcd c;  ///< stiffness
  int m = 0;
  double omega = 0.0;
  int cells_s = 0;
  int cells_zeta = 0;
  int order = 0;
  BasisCounts counts;
  double hermitian_defect = 0.0;  ///< max |M - M^H| / max |M| before symmetrization

  int size() const { return static_cast<int>(a.rows()); }
};

/// Entries follow the Galerkin convention M_ij = form(field_j, field_i), so that
/// x^H M x is the quadratic form of the field sum_j x_j field_j.
Eigen::MatrixXcd assemble_mass(const MeridionalMesh& mesh, const std::vector<BasisField>& basis,
                               bool check_rank = true);
Eigen::MatrixXcd assemble_coriolis(const MeridionalMesh& mesh,
                                   const std::vector<BasisField>& basis, double omega);
Eigen::MatrixXcd assemble_stiffness(const MeridionalMesh& mesh,
                                    const std::vector<BasisField>& basis);
/// All three in one sweep over the nodes.
PencilMatrices assemble_pencil(const MeridionalMesh& mesh, const std::vector<BasisField>& basis,
                               double omega);

/// G = -sigma_bar g at every mesh node for one basis field.
std::vector<cplx> basis_force(const MeridionalMesh& mesh, const BasisField& f);

/// Real displacement field with its Jacobian d xi_i / d x_j (Cartesian).
struct DisplacementField {
  std::function<Eigen::Vector3d(const Eigen::Vector3d&)> value;
  std::function<Eigen::Matrix3d(const Eigen::Vector3d&)> jacobian;
};

/// Background density and sound-speed factor used by the pointwise force.
struct Background {
  std::function<double(const Eigen::Vector3d&)> rho;
  std::function<Eigen::Vector3d(const Eigen::Vector3d&)> grad_rho;
  std::function<double(const Eigen::Vector3d&)> sigma_bar;
  std::function<bool(const Eigen::Vector3d&)> contains;

  static Background from_state(const StationaryState& state);
};

/// Upsilon0 = Ub - (gamma - 1) Ub div(xi) - (grad Ub | xi).
std::function<double(const Eigen::Vector3d&)> initial_upsilon_from_displacement(
    DisplacementField xi0, const StationaryState& state);

/// G = -sigma_bar div(rho xi); throws DomainError outside the background's domain.
std::function<double(const Eigen::Vector3d&)> linearized_force(DisplacementField xi,
                                                               Background bg);

}  // namespace rotatm
