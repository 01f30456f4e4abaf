#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rotatm/errors.hpp"
#include "rotatm/geometry.hpp"
#include "rotatm/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace rotatm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("rotatm_test_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config_json(json::parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("reference preset") {
  const RunConfig c = parse_config_json(json::parse(R"({"preset": "reference"})"));
  CHECK(c.params.gm0 == 1.0);
  CHECK(c.params.r0 == 1.0);
  CHECK(c.params.r_cap == 2.0);
  CHECK(c.params.gamma == 1.4);
  CHECK(c.params.a_const == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
  CHECK(c.params.omega * c.params.omega == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(c.preset == "reference");
  CHECK_THROWS_AS(preset_config("other"), ConfigError);
}

TEST_CASE("config validation") {
  CHECK(config_error(R"({"params": {"gamma": 2.5}})").find("gamma") != std::string::npos);
  CHECK(config_error(R"({"params": {"gamma": 1.0}})").find("gamma") != std::string::npos);
  CHECK(config_error(R"({"params": {"speed": 1}})").find("params.speed") != std::string::npos);
  CHECK(config_error(R"({"bogus": 1})").find("bogus") != std::string::npos);
  CHECK(config_error(R"({"mesh": {"cells_s": 2}})").find("mesh") != std::string::npos);
  CHECK(config_error(R"({"mesh": {"basis": "spline"}})").find("mesh.basis") != std::string::npos);
  CHECK(config_error(R"({"params": {"omega": 0.1, "omega_sq": 0.01}})") != "");
  CHECK(config_error(R"({"profile": {"kind": "differential"}})").find("profile.kind") != std::string::npos);

  const RunConfig c = parse_config_json(json::parse(R"({"params": {"gm0": 1, "r0": 1, "r_cap": 2, "gamma": 1.4}})"));
  CHECK(c.params.omega == 0.0);
  const RunConfig w = parse_config_json(json::parse(R"({"params": {"omega_sq": 0.01}, "mesh": {"m": 2}})"));
  CHECK(w.params.omega == doctest::Approx(0.1));
  CHECK(w.m == 2);

  const fs::path d = scratch("cfg");
  std::ofstream(d / "bad.json") << "{not json";
  CHECK_THROWS_AS(parse_config(d / "bad.json"), ConfigError);
  CHECK_THROWS_AS(parse_config(d / "missing.json"), ConfigError);
}

TEST_CASE("config round trip") {
  RunConfig c = preset_config("reference");
  c.m = 1;
  c.cells_zeta = 16;
  c.tol.zero_tol = 1e-9;
  const RunConfig back = parse_config_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("matrix container round trip") {
  const fs::path d = scratch("mat");
  Eigen::MatrixXcd r(2, 3);
  r << 1.0, -2.5, 3.0e-300, 0.1, 1e10, -0.0;
  write_matrix(d / "r.bin", r, MatrixDtype::Float64);
  CHECK(fs::file_size(d / "r.bin") == 64u + 6u * 8u);
  MatrixDtype dt = MatrixDtype::Complex128;
  CHECK(read_matrix(d / "r.bin", &dt) == r);
  CHECK(dt == MatrixDtype::Float64);
  CHECK(natural_dtype(r) == MatrixDtype::Float64);

  Eigen::MatrixXcd c = Eigen::MatrixXcd::Random(4, 3);
  write_matrix(d / "c.bin", c, MatrixDtype::Complex128);
  CHECK(fs::file_size(d / "c.bin") == 64u + 12u * 16u);
  CHECK(read_matrix(d / "c.bin", &dt) == c);
  CHECK(dt == MatrixDtype::Complex128);
  CHECK(natural_dtype(c) == MatrixDtype::Complex128);

  const std::string bytes = slurp(d / "c.bin");
  CHECK(bytes.substr(0, 8) == "RAPENCL1");

  std::string bad = bytes;
  bad[0] = 'X';
  std::ofstream(d / "bad.bin", std::ios::binary) << bad;
  CHECK_THROWS_AS(read_matrix(d / "bad.bin"), Error);
  std::ofstream(d / "short.bin", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  CHECK_THROWS_AS(read_matrix(d / "short.bin"), Error);
}

TEST_CASE("pencil persistence") {
  const StationaryState st(PhysicalParams::reference());
  const MeridionalMesh mesh(st, 1, 6, 8);
  const PencilMatrices pm = assemble_pencil(mesh, basis_fields(mesh), st.params().omega);
  const fs::path d = scratch("pencil");
  const auto files = write_pencil(d, pm, {{"note", "test"}});
  CHECK(files.size() == 4u);
  const PencilMatrices back = read_pencil(d);
  CHECK(back.a == pm.a);
  CHECK(back.b == pm.b);
  CHECK(back.c == pm.c);
  CHECK(back.m == 1);
  CHECK(back.omega == pm.omega);
}

TEST_CASE("hashing") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const fs::path d = scratch("hash");
  write_text(d / "x.txt", "abc");
  CHECK(sha256_file(d / "x.txt") == sha256_hex("abc"));
}

TEST_CASE("deterministic text output") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
  const fs::path d = scratch("csv");
  const std::vector<std::vector<double>> rows = {{0.0, 1.0 / 3.0}, {1.5, -2e-300}};
  write_csv(d / "a.csv", {"t", "e"}, rows);
  write_csv(d / "b.csv", {"t", "e"}, rows);
  CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
  CHECK(slurp(d / "a.csv").rfind("t,e\n", 0) == 0);
  write_json(d / "a.json", config_to_json(preset_config("reference")));
  write_json(d / "b.json", config_to_json(preset_config("reference")));
  CHECK(sha256_file(d / "a.json") == sha256_file(d / "b.json"));
}

TEST_CASE("run manifest") {
  const fs::path d = scratch("manifest");
  write_text(d / "out.txt", "hello");
  RunManifest m("spectrum", preset_config("reference"));
  m.add_artifact(d / "out.txt");
  const fs::path p = m.write(d);
  const json j = json::parse(slurp(p));
  CHECK(j["command"] == "spectrum");
  CHECK(j["version"] == version_string());
  CHECK(j["config"]["preset"] == "reference");
  CHECK(j["artifacts"].size() == 1u);
  CHECK(j["artifacts"][0]["file"] == "out.txt");
  CHECK(j["artifacts"][0]["sha256"] == sha256_hex("hello"));
  CHECK(j["config_sha256"].get<std::string>().size() == 64u);
}

TEST_CASE("thread count from the environment") {
  unsetenv("ROTATM_THREADS");
  CHECK(thread_count_from_env() == 1);
  setenv("ROTATM_THREADS", "4", 1);
  CHECK(thread_count_from_env() == 4);
  setenv("ROTATM_THREADS", "four", 1);
  CHECK_THROWS_AS(thread_count_from_env(), ConfigError);
  unsetenv("ROTATM_THREADS");
}
