#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fraks/errors.hpp"
#include "fraks/io.hpp"

using namespace fraks;
using namespace fraks::io;
namespace fs = std::filesystem;

namespace {

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config_string(
      "beta: 0.7\nalpha: 1.2\na: 0.1\nb: 2\nn: 1\ngrid: 128\nL: 12\ndt: 0.002\nT: 3\n"
      "u0: {kind: cosine, mean: 2, amplitude: 0.5, modes: [3]}\nq_values: [2, 3]\n");
  CHECK(cfg.params.beta == 0.7);
  CHECK(cfg.params.n == 1);
  CHECK(cfg.grid == 128);
  CHECK(cfg.u0.kind == "cosine");
  CHECK(cfg.q_values == std::vector<double>{2.0, 3.0});
  const auto u = make_initial_data(cfg);
  CHECK(u.values[0] == doctest::Approx(2.5));
  CHECK(u.grid.N == 128);
}

TEST_CASE("config errors are anchored") {
  try {
    parse_config_string("beta: 0.5\nb: -1\n", "cfg.yaml");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "b");
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("cfg.yaml:2:") == 0);
  }
  CHECK_THROWS_AS(parse_config_string("betta: 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("grid: 100\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("u0: {kind: square}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("beta: [1, 2]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("sweep: {a: [1], b: [1], alpha: [1]}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("u0: {kind: file, path: /nonexistent.fks1}\n"), ConfigError);
}

TEST_CASE("gaussian initial data with a prescribed mass") {
  auto cfg = parse_config_string("n: 2\ngrid: 128\nL: 10\nu0: {kind: gaussian, sigma: 0.5, mass: 31.41592653589793}\n");
  const auto u = make_initial_data(cfg);
  CHECK(spectral::integral(u) == doctest::Approx(10.0 * std::numbers::pi).epsilon(1e-8));
  cfg = parse_config_string("n: 1\ngrid: 64\nseed: 4\nu0: {kind: gaussian, noise: 0.1}\n");
  CHECK(make_initial_data(cfg).values == make_initial_data(cfg).values);
  auto other = cfg;
  other.seed = 5;
  CHECK(make_initial_data(cfg).values != make_initial_data(other).values);
}

TEST_CASE("config echo is JSON") {
  const auto cfg = parse_config_string("a: 0.25\nsweep: {b: [0.5, 1.5]}\n");
  const auto j = nlohmann::json::parse(config_to_json(cfg));
  CHECK(j["a"] == 0.25);
  CHECK(j["u0"]["kind"] == "gaussian");
  CHECK(j["sweep"]["b"].size() == 2);
}

TEST_CASE("shortest round-trip formatting") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    const auto s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("diagnostics CSV round trip and versioning") {
  model::Trajectory tr;
  tr.q_values = {2.0, 4.0};
  model::DiagnosticsRow r;
  r.t = 0.1;
  r.mass = 1.0 / 3.0;
  r.min_u = -1e-17;
  r.lq = {1.5, 2.5};
  r.envelope = {3.5, 4.5};
  tr.rows = {r, r};
  std::ostringstream os;
  write_diagnostics_csv(os, tr);
  const auto text = os.str();
  CHECK(text.rfind("# fraks-diagnostics 1.0\n", 0) == 0);
  CHECK(text.find("t,mass,min_u,linf,l1,l2,lq:2,lq:4,seminorm,gronwall_envelope:2,gronwall_envelope:4\n") !=
        std::string::npos);
  const auto table = parse_diagnostics_csv(text);
  CHECK(table.major == 1);
  CHECK(table.rows.size() == 2);
  CHECK(table.rows[0][table.column("mass")] == 1.0 / 3.0);
  CHECK(table.rows[1][table.column("gronwall_envelope:4")] == 4.5);
  CHECK_THROWS_AS(table.column("nope"), FormatError);
  std::string future = text;
  future.replace(future.find("1.0"), 3, "2.0");
  CHECK_THROWS_AS(parse_diagnostics_csv(future), FormatError);
  std::string minor = text;
  minor.replace(minor.find("1.0"), 3, "1.7");
  CHECK(parse_diagnostics_csv(minor).minor == 7);
  CHECK_THROWS_AS(parse_diagnostics_csv("t,mass\n0,1\n"), FormatError);
  CHECK_THROWS_AS(parse_diagnostics_csv(text + "1,2\n"), FormatError);
}

TEST_CASE("sweep summary") {
  const auto path = fs::temp_directory_path() / "fraks_summary_test.csv";
  SweepRow row;
  row.index = 3;
  row.params.b = 1.2;
  row.regime = "StrongDamping";
  row.admissible = true;
  row.status = "Completed";
  row.bounded = true;
  row.sup_linf = 1.25;
  row.manifest = "point_003/manifest.json";
  write_sweep_summary(path.string(), {row});
  const auto text = read(path);
  CHECK(text.rfind("# fraks-sweep 1.0\npoint,a,b,alpha,beta,n,regime,", 0) == 0);
  CHECK(text.find("3,0,1.2,1.5,0.5,2,StrongDamping,0.25,1,Completed,1,1.25,point_003/manifest.json\n") !=
        std::string::npos);
  fs::remove(path);
}
