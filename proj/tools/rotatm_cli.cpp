#include "rotatm/acceptance.hpp"
#include "rotatm/assembly.hpp"
#include "rotatm/atmosphere.hpp"
#include "rotatm/errors.hpp"
#include "rotatm/evolution.hpp"
#include "rotatm/flow.hpp"
#include "rotatm/geometry.hpp"
#include "rotatm/io.hpp"
#include "rotatm/oracle.hpp"
#include "rotatm/spectrum.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

using namespace rotatm;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string preset;
  std::string config;
  std::string out = "out";
  std::optional<int> m;
  std::optional<int> cells_s;
  std::optional<int> cells_zeta;
};

RunConfig load(const Common& c) {
  if (!c.preset.empty() && !c.config.empty()) throw ConfigError("give --preset or --config, not both");
  RunConfig cfg;
  if (!c.config.empty())
    cfg = parse_config(c.config);
  else if (!c.preset.empty())
    cfg = preset_config(c.preset);
  else
    cfg = parse_config_json(json::object());
  if (c.m) cfg.m = *c.m;
  if (c.cells_s) cfg.cells_s = *c.cells_s;
  if (c.cells_zeta) cfg.cells_zeta = *c.cells_zeta;
  if (cfg.cells_s < 4 || cfg.cells_zeta < 4) throw ConfigError("mesh: need at least 4 cells per direction");
  return cfg;
}

fs::path out_dir(const Common& c) {
  fs::create_directories(c.out);
  return c.out;
}

void finish(RunManifest& man, const fs::path& dir, const std::vector<fs::path>& files, const json& summary) {
  for (const auto& f : files) man.add_artifact(f);
  man.write(dir);
  std::cout << summary.dump(2) << "\n";
}

MeridionalMesh make_mesh(const StationaryState& st, const RunConfig& cfg) {
  return MeridionalMesh(st, cfg.m, cfg.cells_s, cfg.cells_zeta, cfg.mesh_options());
}

PencilMatrices build_pencil(const RunConfig& cfg) {
  const StationaryState st(cfg.params, cfg.profile());
  const MeridionalMesh mesh = make_mesh(st, cfg);
  return assemble_pencil(mesh, basis_fields(mesh, cfg.basis_options()), cfg.params.omega);
}

SpectrumOptions spectrum_options(const RunConfig& cfg) {
  SpectrumOptions o;
  o.kernel_tol = cfg.tol.kernel_tol;
  o.zero_tol = cfg.tol.zero_tol;
  o.cluster_tol = cfg.tol.cluster_tol;
  return o;
}

// ---- subcommands

int cmd_stationary(const Common& c) {
  const RunConfig cfg = load(c);
  const StationaryState st(cfg.params, cfg.profile());
  const AdmissibilityReport adm = check_admissibility(cfg.params, cfg.profile_kind == "none" ? nullptr : &st.profile());
  const fs::path dir = out_dir(c);

  std::vector<std::vector<double>> rows;
  const double r_hi = 1.5 * cfg.params.r_cap;
  for (int i = 1; i <= 200; ++i) {
    const double r = cfg.params.r0 + (r_hi - cfg.params.r0) * i / 200.0;
    const CylPoint eq{r, 0.0}, pole{0.0, r};
    rows.push_back({r, st.upsilon(eq), st.rho(eq), st.upsilon(pole), st.rho(pole)});
  }
  const fs::path csv = dir / "stationary.csv";
  write_csv(csv, {"r", "upsilon_equator", "rho_equator", "upsilon_pole", "rho_pole"}, rows);

  json s;
  s["kappa"] = st.kappa();
  s["lambda"] = st.lambda();
  s["condition_k"] = adm.condition_k;
  s["admissibility_value"] = adm.value;
  s["admissibility_margin"] = adm.margin;
  s["omega_max_sq"] = adm.omega_max_sq;
  s["pole_density"] = pole_density(cfg.params);
  const fs::path js = dir / "stationary.json";
  write_json(js, s);
  RunManifest man("stationary", cfg);
  finish(man, dir, {csv, js}, s);
  return 0;
}

int cmd_geometry(const Common& c) {
  const RunConfig cfg = load(c);
  const LevelSetAnalysis a = analyze_level_set(cfg.params);
  const fs::path dir = out_dir(c);
  json s;
  s["case"] = to_string(a.case_label);
  s["kappa"] = a.kappa;
  s["lambda"] = a.lambda;
  s["margin"] = a.margin();
  std::vector<fs::path> files;
  if (a.bounded()) {
    s["q_minus"] = a.roots->q_minus;
    s["q_plus"] = std::isfinite(a.roots->q_plus) ? json(a.roots->q_plus) : json(nullptr);
    s["q_inf"] = std::isfinite(a.roots->q_inf) ? json(a.roots->q_inf) : json(nullptr);
    s["root_estimates"] = root_estimates_check(a);

    const BoundarySurface surf = BoundarySurface::from_params(cfg.params);
    const StationaryState st(cfg.params);
    std::vector<std::vector<double>> rows;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
      const double zeta = -1.0 + 2.0 * i / 100.0;
      const double r = surf.outer_radius(zeta);
      const CylPoint p{r * std::sqrt(std::max(0.0, 1.0 - zeta * zeta)), r * zeta};
      const double dn = vacuum_normal_sign(p, st);
      worst = std::max(worst, dn);
      rows.push_back({zeta, r, p.varpi, p.z, dn});
    }
    s["max_normal_derivative"] = worst;
    s["physical_vacuum"] = worst < 0.0;
    const fs::path csv = dir / "boundary.csv";
    write_csv(csv, {"zeta", "radius", "varpi", "z", "normal_derivative"}, rows);
    files.push_back(csv);
  }
  const fs::path js = dir / "geometry.json";
  write_json(js, s);
  files.push_back(js);
  RunManifest man("geometry", cfg);
  finish(man, dir, files, s);
  return 0;
}

Eigen::Vector3d parse_point(const std::string& text) {
  std::stringstream ss(text);
  Eigen::Vector3d x;
  char sep = 0;
  if (!(ss >> x.x() >> sep >> x.y() >> sep >> x.z())) throw ConfigError("--point: expected x,y,z");
  return x;
}

int cmd_flow(const Common& c, const std::string& field, double w0, double t_final, double dt,
             const std::string& point) {
  const RunConfig cfg = load(c);
  const VelocityField v = field_by_name(field, w0);
  const FlowResult fr = integrate_flow(v, parse_point(point), t_final, dt);
  const fs::path dir = out_dir(c);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < fr.times.size(); ++i) {
    const auto& x = fr.positions[i];
    rows.push_back({fr.times[i], x.x(), x.y(), x.z(), fr.determinants[i]});
  }
  const fs::path csv = dir / "flow.csv";
  write_csv(csv, {"t", "x", "y", "z", "det_dphi"}, rows);
  json s;
  s["field"] = v.name;
  s["steps"] = fr.times.size() - 1;
  s["final_position"] = {fr.final_position().x(), fr.final_position().y(), fr.final_position().z()};
  s["final_det"] = fr.determinants.back();
  const fs::path js = dir / "flow.json";
  write_json(js, s);
  RunManifest man("flow", cfg);
  finish(man, dir, {csv, js}, s);
  return 0;
}

int cmd_assemble(const Common& c) {
  const RunConfig cfg = load(c);
  const PencilMatrices pm = build_pencil(cfg);
  const fs::path dir = out_dir(c);
  json meta = config_to_json(cfg);
  const auto files = write_pencil(dir, pm, meta);
  json s;
  s["n"] = pm.size();
  s["m"] = pm.m;
  s["gradient"] = pm.counts.gradient;
  s["kernel"] = pm.counts.kernel;
  s["hermitian_defect"] = pm.hermitian_defect;
  RunManifest man("assemble", cfg);
  finish(man, dir, files, s);
  return 0;
}

int cmd_spectrum(const Common& c, const std::string& input) {
  const RunConfig cfg = load(c);
  const PencilMatrices pm = input.empty() ? build_pencil(cfg) : read_pencil(input);
  const SpectrumResult r = solve_pencil(pm, spectrum_options(cfg));
  const RealityReport rr = reality_check(r, cfg.tol.reality_tol);
  const fs::path dir = out_dir(c);

  std::vector<std::vector<double>> rows;
  json freqs = json::array();
  for (int k = 0; k < r.size(); ++k) {
    const RayleighCoefficients rc = rayleigh_coefficients(r.vectors.col(k), pm);
    rows.push_back({double(k), r.sigma(k).real(), r.sigma(k).imag(), r.residuals(k), rc.a, rc.b, rc.c});
    freqs.push_back({{"re", r.sigma(k).real()}, {"im", r.sigma(k).imag()}, {"residual", r.residuals(k)}});
  }
  const fs::path csv = dir / "modes.csv";
  write_csv(csv, {"k", "sigma_re", "sigma_im", "residual", "a", "b", "c"}, rows);

  json s;
  s["n"] = pm.size();
  s["m"] = pm.m;
  s["omega"] = pm.omega;
  s["kernel_dim"] = r.kernel_dim;
  s["zero_cluster"] = r.zero_cluster.size();
  s["scale"] = r.scale;
  s["max_imag"] = rr.max_imag;
  s["reality_pass"] = rr.pass;
  s["paired"] = r.paired;
  s["max_residual"] = r.residuals.maxCoeff();
  const fs::path js = dir / "spectrum.json";
  json full = s;
  full["frequencies"] = freqs;
  write_json(js, full);
  RunManifest man("spectrum", cfg);
  finish(man, dir, {csv, js}, s);
  return rr.pass && r.residuals.maxCoeff() <= cfg.tol.residual_tol ? 0 : 1;
}

int cmd_oracle(const Common& c, int l, int nr) {
  const RunConfig cfg = load(c);
  const RadialSpectrum rs = radial_sturm_liouville(cfg.params, l, nr);
  const fs::path dir = out_dir(c);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < rs.eigenvalues.size(); ++i)
    rows.push_back({double(i), rs.eigenvalues(i), std::sqrt(rs.eigenvalues(i))});
  const fs::path csv = dir / "oracle.csv";
  write_csv(csv, {"n", "lambda", "frequency"}, rows);
  json s;
  s["l"] = l;
  s["n_r"] = nr;
  json low = json::array();
  for (int i = 0; i < std::min<int>(8, rs.eigenvalues.size()); ++i) low.push_back(rs.eigenvalues(i));
  s["lowest"] = low;
  const fs::path js = dir / "oracle.json";
  write_json(js, s);
  RunManifest man("oracle", cfg);
  finish(man, dir, {csv, js}, s);
  return 0;
}

EvolutionState initial_state(const std::string& init, const PencilMatrices& pm, const RunConfig& cfg) {
  const int n = pm.size();
  const auto colon = init.find(':');
  const std::string kind = init.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : init.substr(colon + 1);
  EvolutionState s{Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n), 0.0};
  auto index = [&](int limit) {
    try {
      const int k = std::stoi(arg);
      if (k < 0 || k >= limit) throw ConfigError("--init " + init + ": index out of range");
      return k;
    } catch (const std::logic_error&) {
      throw ConfigError("--init " + init + ": expected an integer index");
    }
  };
  if (kind == "eigenmode") {
    const SpectrumResult r = solve_pencil(pm, spectrum_options(cfg));
    std::vector<int> pos;
    for (int k = 0; k < r.size(); ++k)
      if (r.sigma(k).real() > cfg.tol.zero_tol * r.scale) pos.push_back(k);
    const int k = pos[index(static_cast<int>(pos.size()))];
    s.xi = r.vectors.col(k);
    s.xi_dot = cplx(0.0, -1.0) * r.sigma(k) * s.xi;
  } else if (kind == "kernel") {
    const SpectrumResult r = solve_pencil(pm, spectrum_options(cfg));
    const int k = index(static_cast<int>(r.zero_cluster.size()));
    s.xi = r.vectors.col(r.zero_cluster[k]);
  } else if (kind == "file") {
    const Eigen::MatrixXcd m = read_matrix(arg);
    if (m.rows() != n || (m.cols() != 1 && m.cols() != 2))
      throw ConfigError("--init file: expected an N x 1 or N x 2 container");
    s.xi = m.col(0);
    if (m.cols() == 2) s.xi_dot = m.col(1);
  } else {
    throw ConfigError("--init: expected eigenmode:k, kernel:k or file:path");
  }
  return s;
}

int cmd_evolve(const Common& c, double t_final, double dt, const std::string& init, int log_every) {
  const RunConfig cfg = load(c);
  if (!(dt > 0.0) || !(t_final > 0.0)) throw ConfigError("--dt and --tfinal must be positive");
  const PencilMatrices pm = build_pencil(cfg);
  const EvolutionState s0 = initial_state(init, pm, cfg);
  EvolveOptions o;
  o.log_every = log_every;
  const EvolutionReport rep = evolve(s0, t_final, dt, pm, {}, o);
  const fs::path dir = out_dir(c);
  std::vector<std::vector<double>> rows;
  for (const EnergySample& e : rep.log) rows.push_back({e.t, e.e, e.e_phys, e.bound});
  const fs::path csv = dir / "energy.csv";
  write_csv(csv, {"t", "E", "E_phys", "bound"}, rows);
  json s;
  s["steps"] = rep.steps;
  s["lambda"] = rep.lambda;
  s["beta_d"] = rep.beta_d;
  s["two_omega"] = rep.two_omega;
  s["bound_ok"] = rep.bound_ok;
  s["first_violation"] = std::isnan(rep.first_violation) ? json(nullptr) : json(rep.first_violation);
  s["max_phys_drift"] = rep.max_phys_drift;
  const fs::path js = dir / "evolve.json";
  write_json(js, s);
  RunManifest man("evolve", cfg);
  finish(man, dir, {csv, js}, s);
  return rep.bound_ok ? 0 : 1;
}

int cmd_verify_all(const Common& c) {
  const RunConfig cfg = load(c);
  AcceptanceConfig ac;
  ac.params = cfg.params;
  const fs::path dir = out_dir(c);
  const auto results = run_acceptance(ac, [](const CriterionResult& r) { std::cout << r.line() << std::endl; });
  json table = json::array();
  int failed = 0;
  for (const auto& r : results) {
    table.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass()}, {"detail", r.detail}});
    if (!r.pass()) ++failed;
  }
  const fs::path js = dir / "acceptance.json";
  write_json(js, table);
  RunManifest man("verify-all", cfg);
  man.add_artifact(js);
  man.write(dir);
  std::cout << failed << " criteria failed\n";
  return failed == 0 ? 0 : 1;
}

void report_error(const std::string& kind, const std::string& what) {
  json e;
  e["error"] = kind;
  e["message"] = what;
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotating atmosphere perturbation toolkit"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--preset", common.preset, "named parameter preset (reference)");
    sub->add_option("--config", common.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", common.out, "output directory");
    sub->add_option("--m", common.m, "azimuthal order");
    sub->add_option("--cells-s", common.cells_s, "radial mesh cells");
    sub->add_option("--cells-zeta", common.cells_zeta, "angular mesh cells");
  };

  auto* stationary = app.add_subcommand("stationary", "background state and admissibility");
  auto* geometry = app.add_subcommand("geometry", "level-set case, cubic roots and vacuum boundary");
  auto* flow = app.add_subcommand("flow", "integrate a Lagrangian flow from one seed");
  auto* assemble = app.add_subcommand("assemble", "assemble and store the pencil matrices");
  auto* spectrum = app.add_subcommand("spectrum", "solve the quadratic pencil");
  auto* oracle = app.add_subcommand("oracle", "non-rotating radial eigenvalues");
  auto* evolve_cmd = app.add_subcommand("evolve", "time integration with energy log");
  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");
  for (auto* s : {stationary, geometry, flow, assemble, spectrum, oracle, evolve_cmd, verify}) add_common(s);

  std::string field = "rigid", point = "1.5,0,0.2";
  double w0 = 1.0, flow_t = 10.0, flow_dt = 0.01;
  flow->add_option("--field", field, "rigid, radial or zero");
  flow->add_option("--w0", w0, "rotation rate of the rigid field");
  flow->add_option("--tfinal", flow_t);
  flow->add_option("--dt", flow_dt);
  flow->add_option("--point", point, "seed x,y,z");

  std::string input;
  spectrum->add_option("--input", input, "directory written by assemble")->check(CLI::ExistingDirectory);

  int l = 0, nr = 512;
  oracle->add_option("--l", l, "spherical-harmonic degree");
  oracle->add_option("--nr", nr, "radial cells");

  double t_final = 10.0, dt = 0.01;
  std::string init = "eigenmode:0";
  int log_every = 10;
  evolve_cmd->add_option("--tfinal", t_final);
  evolve_cmd->add_option("--dt", dt);
  evolve_cmd->add_option("--init", init, "eigenmode:k, kernel:k or file:path");
  evolve_cmd->add_option("--log-every", log_every)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    thread_count_from_env();
    if (*stationary) return cmd_stationary(common);
    if (*geometry) return cmd_geometry(common);
    if (*flow) return cmd_flow(common, field, w0, flow_t, flow_dt, point);
    if (*assemble) return cmd_assemble(common);
    if (*spectrum) return cmd_spectrum(common, input);
    if (*oracle) return cmd_oracle(common, l, nr);
    if (*evolve_cmd) return cmd_evolve(common, t_final, dt, init, log_every);
    if (*verify) return cmd_verify_all(common);
  } catch (const ConfigError& e) {
    report_error(e.kind(), e.what());
    return 3;
  } catch (const Error& e) {
    report_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 2;
}
