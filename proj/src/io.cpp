#include "rotatm/io.hpp"

#include "rotatm/errors.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace rotatm {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'R', 'A', 'P', 'E', 'N', 'C', 'L', '1'};

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError("unknown field " + where + "." + it.key());
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key + ": must be finite");
  return d;
}

int get_int(const json& obj, const std::string& where, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

template <class T>
void put_le(std::string& buf, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  buf.append(b, sizeof(T));
}

template <class T>
T get_le(const char* p) {
  char b[sizeof(T)];
  std::memcpy(b, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RotationProfile RunConfig::profile() const {
  if (profile_kind == "none") return RotationProfile::none();
  return RotationProfile::constant(profile_value);
}

MeshOptions RunConfig::mesh_options() const {
  MeshOptions o;
  o.order = order;
  return o;
}

BasisOptions RunConfig::basis_options() const {
  BasisOptions o;
  o.choice = basis_choice_from_string(basis);
  o.kernel_s_max = kernel_s_max;
  return o;
}

RunConfig preset_config(const std::string& name) {
  if (name != "reference") throw ConfigError("unknown preset " + name);
  RunConfig c;
  c.params = PhysicalParams::reference();
  c.preset = name;
  return c;
}

RunConfig parse_config_json(const json& j) {
  check_keys(j, "config", {"preset", "params", "profile", "mesh", "tolerances"});
  RunConfig c;
  if (j.contains("preset")) c = preset_config(get_string(j, "config", "preset", ""));

  if (j.contains("params")) {
    const json& p = j.at("params");
    check_keys(p, "params", {"gm0", "r0", "r_cap", "a_const", "gamma", "omega", "omega_sq"});
    if (c.preset.empty()) c.params.omega = 0.0;
    c.params.gm0 = get_number(p, "params", "gm0", c.params.gm0);
    c.params.r0 = get_number(p, "params", "r0", c.params.r0);
    c.params.r_cap = get_number(p, "params", "r_cap", c.params.r_cap);
    c.params.a_const = get_number(p, "params", "a_const", c.params.a_const);
    c.params.gamma = get_number(p, "params", "gamma", c.params.gamma);
    if (p.contains("omega") && p.contains("omega_sq"))
      throw ConfigError("params: give omega or omega_sq, not both");
    c.params.omega = get_number(p, "params", "omega", c.params.omega);
    if (p.contains("omega_sq")) {
      const double w2 = get_number(p, "params", "omega_sq", 0.0);
      if (w2 < 0.0) throw ConfigError("params.omega_sq: must be nonnegative");
      c.params.omega = std::sqrt(w2);
    }
  } else if (c.preset.empty()) {
    c.params.omega = 0.0;
  }

  if (j.contains("profile")) {
    const json& p = j.at("profile");
    check_keys(p, "profile", {"kind", "value"});
    c.profile_kind = get_string(p, "profile", "kind", "none");
    if (c.profile_kind != "none" && c.profile_kind != "constant")
      throw ConfigError("profile.kind: expected none or constant");
    c.profile_value = get_number(p, "profile", "value", 0.0);
  }

  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    check_keys(m, "mesh", {"m", "cells_s", "cells_zeta", "order", "basis", "kernel_s_max"});
    c.m = get_int(m, "mesh", "m", c.m);
    c.cells_s = get_int(m, "mesh", "cells_s", c.cells_s);
    c.cells_zeta = get_int(m, "mesh", "cells_zeta", c.cells_zeta);
    c.order = get_int(m, "mesh", "order", c.order);
    c.basis = get_string(m, "mesh", "basis", c.basis);
    c.kernel_s_max = get_number(m, "mesh", "kernel_s_max", c.kernel_s_max);
  }
  if (c.cells_s < 4 || c.cells_zeta < 4) throw ConfigError("mesh: need at least 4 cells per direction");
  if (c.order < 2 || c.order > 32) throw ConfigError("mesh.order: expected 2..32");
  if (!(c.kernel_s_max > 0.0 && c.kernel_s_max < 1.0))
    throw ConfigError("mesh.kernel_s_max: expected a value in (0, 1)");
  try {
    basis_choice_from_string(c.basis);
  } catch (const Error&) {
    throw ConfigError("mesh.basis: expected gradient, kernel or mixed");
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    check_keys(t, "tolerances",
               {"kernel_tol", "zero_tol", "cluster_tol", "reality_tol", "residual_tol",
                "stationarity_tol", "secular_match_tol"});
    auto& T = c.tol;
    T.kernel_tol = get_number(t, "tolerances", "kernel_tol", T.kernel_tol);
    T.zero_tol = get_number(t, "tolerances", "zero_tol", T.zero_tol);
    T.cluster_tol = get_number(t, "tolerances", "cluster_tol", T.cluster_tol);
    T.reality_tol = get_number(t, "tolerances", "reality_tol", T.reality_tol);
    T.residual_tol = get_number(t, "tolerances", "residual_tol", T.residual_tol);
    T.stationarity_tol = get_number(t, "tolerances", "stationarity_tol", T.stationarity_tol);
    T.secular_match_tol = get_number(t, "tolerances", "secular_match_tol", T.secular_match_tol);
  }

  if (!(c.params.gamma > 1.0 && c.params.gamma < 2.0))
    throw ConfigError("params.gamma: must satisfy 1 < gamma < 2");
  try {
    c.params.validate_with_cap();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  return c;
}

RunConfig parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

json config_to_json(const RunConfig& c) {
  json j;
  if (!c.preset.empty()) j["preset"] = c.preset;
  j["params"] = {{"gm0", c.params.gm0},         {"r0", c.params.r0},
                 {"r_cap", c.params.r_cap},     {"a_const", c.params.a_const},
                 {"gamma", c.params.gamma},     {"omega", c.params.omega}};
  j["profile"] = {{"kind", c.profile_kind}, {"value", c.profile_value}};
  j["mesh"] = {{"m", c.m},         {"cells_s", c.cells_s}, {"cells_zeta", c.cells_zeta},
               {"order", c.order}, {"basis", c.basis},     {"kernel_s_max", c.kernel_s_max}};
  j["tolerances"] = {{"kernel_tol", c.tol.kernel_tol},
                     {"zero_tol", c.tol.zero_tol},
                     {"cluster_tol", c.tol.cluster_tol},
                     {"reality_tol", c.tol.reality_tol},
                     {"residual_tol", c.tol.residual_tol},
                     {"stationarity_tol", c.tol.stationarity_tol},
                     {"secular_match_tol", c.tol.secular_match_tol}};
  return j;
}

MatrixDtype natural_dtype(const Eigen::MatrixXcd& m) {
  return m.imag().cwiseAbs().maxCoeff() == 0.0 ? MatrixDtype::Float64 : MatrixDtype::Complex128;
}

void write_matrix(const fs::path& path, const Eigen::MatrixXcd& m, MatrixDtype dtype) {
  if (dtype == MatrixDtype::Float64 && m.size() > 0 && m.imag().cwiseAbs().maxCoeff() != 0.0)
    throw DomainError("matrix has imaginary parts; cannot store as float64");
  std::string buf;
  buf.reserve(64 + m.size() * 16);
  buf.append(kMagic, 8);
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(m.rows()));
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(m.cols()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(dtype));
  buf.resize(64, '\0');
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_le<double>(buf, m(i, j).real());
      if (dtype == MatrixDtype::Complex128) put_le<double>(buf, m(i, j).imag());
    }
  }
  write_text(path, buf);
}

Eigen::MatrixXcd read_matrix(const fs::path& path, MatrixDtype* dtype) {
  const std::string buf = read_all(path);
  if (buf.size() < 64 || std::memcmp(buf.data(), kMagic, 8) != 0)
    throw Error("io", path.string() + ": not a matrix container");
  const auto rows = get_le<std::uint64_t>(buf.data() + 8);
  const auto cols = get_le<std::uint64_t>(buf.data() + 16);
  const auto dt = get_le<std::uint32_t>(buf.data() + 24);
  if (dt > 1) throw Error("io", path.string() + ": unknown dtype");
  const std::size_t width = dt == 1 ? 16 : 8;
  if (rows > (1u << 20) || cols > (1u << 20) || buf.size() != 64 + rows * cols * width)
    throw Error("io", path.string() + ": size does not match the header");
  Eigen::MatrixXcd m(rows, cols);
  const char* p = buf.data() + 64;
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      const double re = get_le<double>(p);
      const double im = dt == 1 ? get_le<double>(p + 8) : 0.0;
      m(i, j) = cplx(re, im);
      p += width;
    }
  }
  if (dtype) *dtype = static_cast<MatrixDtype>(dt);
  return m;
}

std::vector<fs::path> write_pencil(const fs::path& dir, const PencilMatrices& pm,
                                   const json& meta) {
  fs::create_directories(dir);
  std::vector<fs::path> out;
  const std::pair<const char*, const Eigen::MatrixXcd*> mats[] = {
      {"a.bin", &pm.a}, {"b.bin", &pm.b}, {"c.bin", &pm.c}};
  json files = json::object();
  for (const auto& [name, mat] : mats) {
    const MatrixDtype dt = natural_dtype(*mat);
    write_matrix(dir / name, *mat, dt);
    files[name] = dt == MatrixDtype::Float64 ? "f64" : "c128";
    out.push_back(dir / name);
  }
  json j = meta;
  j["n"] = pm.size();
  j["m"] = pm.m;
  j["omega"] = pm.omega;
  j["cells_s"] = pm.cells_s;
  j["cells_zeta"] = pm.cells_zeta;
  j["order"] = pm.order;
  j["counts"] = {{"gradient", pm.counts.gradient},
                 {"kernel", pm.counts.kernel},
                 {"custom", pm.counts.custom}};
  j["files"] = files;
  write_json(dir / "pencil.json", j);
  out.push_back(dir / "pencil.json");
  return out;
}

PencilMatrices read_pencil(const fs::path& dir) {
  json meta;
  try {
    meta = json::parse(read_all(dir / "pencil.json"));
  } catch (const json::exception& e) {
    throw Error("io", std::string("pencil.json: ") + e.what());
  }
  PencilMatrices pm;
  pm.a = read_matrix(dir / "a.bin");
  pm.b = read_matrix(dir / "b.bin");
  pm.c = read_matrix(dir / "c.bin");
  try {
    pm.m = meta.at("m").get<int>();
    pm.omega = meta.at("omega").get<double>();
    pm.cells_s = meta.value("cells_s", 0);
    pm.cells_zeta = meta.value("cells_zeta", 0);
    pm.order = meta.value("order", 0);
    if (meta.contains("counts")) {
      pm.counts.gradient = meta["counts"].value("gradient", 0);
      pm.counts.kernel = meta["counts"].value("kernel", 0);
      pm.counts.custom = meta["counts"].value("custom", 0);
    }
  } catch (const json::exception& e) {
    throw Error("io", std::string("pencil.json: ") + e.what());
  }
  const auto n = pm.a.rows();
  if (pm.a.cols() != n || pm.b.rows() != n || pm.b.cols() != n || pm.c.rows() != n ||
      pm.c.cols() != n)
    throw Error("io", "pencil matrices have inconsistent sizes");
  return pm;
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("io", "sha256 failed");
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i)
    ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return ss.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_all(path)); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("io", "write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw DomainError("csv row width does not match the header");
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_double(r[i]);
    s += "\n";
  }
  write_text(path, s);
}

RunManifest::RunManifest(std::string command, const RunConfig& cfg)
    : command_(std::move(command)), config_(config_to_json(cfg)) {
  tolerances_ = config_["tolerances"];
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  started_ = buf;
}

void RunManifest::add_artifact(const fs::path& path) {
  artifacts_.emplace_back(path.filename().string(), sha256_file(path));
}

json RunManifest::to_json() const {
  json j;
  j["command"] = command_;
  j["version"] = version_string();
  j["config"] = config_;
  j["config_sha256"] = sha256_hex(config_.dump());
  j["tolerances"] = tolerances_;
  j["started_utc"] = started_;
  j["threads"] = thread_count_from_env();
  json arts = json::array();
  for (const auto& [name, hash] : artifacts_) arts.push_back({{"file", name}, {"sha256", hash}});
  j["artifacts"] = arts;
  return j;
}

fs::path RunManifest::write(const fs::path& dir) const {
  const fs::path p = dir / "manifest.json";
  write_json(p, to_json());
  return p;
}

int thread_count_from_env() {
  const char* v = std::getenv("ROTATM_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) throw ConfigError("ROTATM_THREADS: expected a positive integer");
  return static_cast<int>(n);
}

std::string version_string() { return "rotatm 1.0.0"; }

}  // namespace rotatm
