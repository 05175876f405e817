#include "fraks/io.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "fraks/errors.hpp"

namespace fraks::io {
namespace {

using Json = nlohmann::ordered_json;

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    const YAML::Mark m = node.Mark();
    throw ConfigError(source_, m.line + 1, m.column + 1, field, msg);
  }

  double number(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a number");
    try {
      const double v = node.as<double>();
      if (!std::isfinite(v)) fail(node, field, "must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(node, field, "expected a number, got '" + node.Scalar() + "'");
    }
  }

  long long integer(const YAML::Node& node, const std::string& field) const {
    const double v = number(node, field);
    if (v != std::floor(v) || std::fabs(v) > 9.0e15) fail(node, field, "expected an integer");
    return static_cast<long long>(v);
  }

  bool boolean(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected true or false");
    try {
      return node.as<bool>();
    } catch (const YAML::BadConversion&) {
      fail(node, field, "expected true or false, got '" + node.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a string");
    return node.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence() || node.size() == 0) fail(node, field, "expected a non-empty list of numbers");
    std::vector<double> out;
    for (const auto& item : node) out.push_back(number(item, field));
    return out;
  }

  void check_keys(const YAML::Node& map, const std::set<std::string>& known, const std::string& prefix) const {
    if (!map.IsMap()) fail(map, prefix.empty() ? "<root>" : prefix, "expected a mapping");
    for (const auto& kv : map) {
      const std::string key = kv.first.Scalar();
      if (!known.count(key)) fail(kv.first, prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
  }

 private:
  std::string source_;
};

const std::set<std::string> kTopKeys{"beta",          "alpha",        "a",         "b",          "n",
                                     "grid",          "L",            "dt",        "T",          "u0",
                                     "chemotaxis_on", "eps_mollify",  "seed",      "snapshot_stride",
                                     "q_values",      "clip_negative", "blowup_factor", "C0",    "sigma",
                                     "use_l2_norm",   "check_dt_guard", "output_dir", "threads", "sweep"};
const std::set<std::string> kU0Keys{"kind", "amplitude", "sigma", "offset", "mass",
                                    "center", "mean",    "modes", "path",   "noise"};
const std::set<std::string> kSweepKeys{"a", "b", "alpha", "beta"};

bool power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

void parse_u0(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  rd.check_keys(node, kU0Keys, "u0");
  auto& u = cfg.u0;
  if (node["kind"]) {
    u.kind = rd.text(node["kind"], "u0.kind");
    if (u.kind != "gaussian" && u.kind != "cosine" && u.kind != "file")
      rd.fail(node["kind"], "u0.kind", "must be gaussian, cosine or file");
  }
  auto num = [&](const char* key, double& dst) {
    if (node[key]) dst = rd.number(node[key], std::string("u0.") + key);
  };
  num("amplitude", u.amplitude);
  num("sigma", u.sigma);
  num("offset", u.offset);
  num("mean", u.mean);
  num("noise", u.noise);
  if (node["mass"]) {
    u.mass = rd.number(node["mass"], "u0.mass");
    if (!(*u.mass > 0.0)) rd.fail(node["mass"], "u0.mass", "must be positive");
  }
  if (!(u.sigma > 0.0)) rd.fail(node["sigma"] ? node["sigma"] : node, "u0.sigma", "must be positive");
  if (!(u.noise >= 0.0)) rd.fail(node["noise"], "u0.noise", "must be non-negative");
  if (node["center"]) {
    u.center = rd.numbers(node["center"], "u0.center");
    if (static_cast<int>(u.center.size()) != cfg.params.n)
      rd.fail(node["center"], "u0.center", "needs one entry per dimension");
  }
  if (node["modes"]) {
    u.modes.clear();
    for (double m : rd.numbers(node["modes"], "u0.modes")) {
      if (m != std::floor(m)) rd.fail(node["modes"], "u0.modes", "entries must be integers");
      u.modes.push_back(static_cast<int>(m));
    }
    if (static_cast<int>(u.modes.size()) != cfg.params.n)
      rd.fail(node["modes"], "u0.modes", "needs one entry per dimension");
  } else {
    u.modes.assign(static_cast<std::size_t>(cfg.params.n), 0);
    u.modes[0] = 1;
  }
  if (u.kind == "file") {
    if (!node["path"]) rd.fail(node, "u0.path", "required for kind file");
    u.path = rd.text(node["path"], "u0.path");
    try {
      const auto snap = spectral::read_snapshot(u.path);
      const spectral::Grid want{cfg.params.n, cfg.grid, cfg.params.L};
      if (!(snap.field.grid == want)) rd.fail(node["path"], "u0.path", "snapshot grid does not match n, grid and L");
    } catch (const FormatError& e) {
      rd.fail(node["path"], "u0.path", e.what());
    }
  }
}

void parse_root(const Reader& rd, const YAML::Node& root, RunConfig& cfg) {
  rd.check_keys(root, kTopKeys, "");
  auto& p = cfg.params;
  auto num = [&](const char* key, double& dst) {
    if (root[key]) dst = rd.number(root[key], key);
  };
  auto at = [&](const char* key) { return root[key] ? root[key] : root; };

  num("beta", p.beta);
  if (!(p.beta > 0.0 && p.beta <= 1.0)) rd.fail(at("beta"), "beta", "must lie in (0, 1]");
  num("alpha", p.alpha);
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) rd.fail(at("alpha"), "alpha", "must lie in (0, 2]");
  num("a", p.a);
  if (!(p.a >= 0.0)) rd.fail(at("a"), "a", "must be non-negative");
  num("b", p.b);
  if (!(p.b >= 0.0)) rd.fail(at("b"), "b", "must be non-negative");
  if (root["n"]) p.n = static_cast<int>(rd.integer(root["n"], "n"));
  if (p.n != 1 && p.n != 2) rd.fail(at("n"), "n", "must be 1 or 2");
  if (root["grid"]) {
    const long long g = rd.integer(root["grid"], "grid");
    if (!power_of_two(g) || g < 8) rd.fail(root["grid"], "grid", "must be a power of two >= 8");
    cfg.grid = static_cast<std::size_t>(g);
  }
  num("L", p.L);
  if (!(p.L > 0.0)) rd.fail(at("L"), "L", "must be positive");
  num("dt", cfg.dt);
  if (!(cfg.dt > 0.0)) rd.fail(at("dt"), "dt", "must be positive");
  num("T", cfg.T);
  if (!(cfg.T >= cfg.dt)) rd.fail(at("T"), "T", "must be at least dt");
  if (root["chemotaxis_on"]) p.chemotaxis_on = rd.boolean(root["chemotaxis_on"], "chemotaxis_on");
  if (root["eps_mollify"] && !root["eps_mollify"].IsNull()) {
    const double e = rd.number(root["eps_mollify"], "eps_mollify");
    if (!(e > 0.0 && e <= p.L / 8.0)) rd.fail(root["eps_mollify"], "eps_mollify", "must lie in (0, L/8]");
    p.eps_mollify = e;
  }
  if (root["seed"]) {
    const long long s = rd.integer(root["seed"], "seed");
    if (s < 0) rd.fail(root["seed"], "seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (root["snapshot_stride"]) {
    const long long s = rd.integer(root["snapshot_stride"], "snapshot_stride");
    if (s < 0) rd.fail(root["snapshot_stride"], "snapshot_stride", "must be non-negative");
    cfg.snapshot_stride = static_cast<std::size_t>(s);
  }
  if (root["q_values"]) {
    cfg.q_values = rd.numbers(root["q_values"], "q_values");
    for (double q : cfg.q_values)
      if (!(q >= 1.0)) rd.fail(root["q_values"], "q_values", "entries must be >= 1");
  }
  if (root["clip_negative"]) cfg.clip_negative = rd.boolean(root["clip_negative"], "clip_negative");
  num("blowup_factor", cfg.blowup_factor);
  if (!(cfg.blowup_factor > 1.0)) rd.fail(at("blowup_factor"), "blowup_factor", "must exceed 1");
  num("C0", cfg.C0);
  if (!(cfg.C0 > 0.0)) rd.fail(at("C0"), "C0", "must be positive");
  if (root["sigma"] && !root["sigma"].IsNull()) {
    cfg.sigma = rd.number(root["sigma"], "sigma");
    if (!(*cfg.sigma > 0.0)) rd.fail(root["sigma"], "sigma", "must be positive");
  }
  if (root["use_l2_norm"]) cfg.use_l2_norm = rd.boolean(root["use_l2_norm"], "use_l2_norm");
  if (root["check_dt_guard"]) cfg.check_dt_guard = rd.boolean(root["check_dt_guard"], "check_dt_guard");
  if (root["output_dir"]) cfg.output_dir = rd.text(root["output_dir"], "output_dir");
  if (root["threads"]) {
    const long long t = rd.integer(root["threads"], "threads");
    if (t < 1) rd.fail(root["threads"], "threads", "must be at least 1");
    cfg.threads = static_cast<std::size_t>(t);
  }
  if (root["sweep"]) {
    const auto& sw = root["sweep"];
    rd.check_keys(sw, kSweepKeys, "sweep");
    for (const auto& kv : sw) {
      SweepAxis ax;
      ax.name = kv.first.Scalar();
      ax.values = rd.numbers(kv.second, "sweep." + ax.name);
      cfg.sweep.push_back(std::move(ax));
    }
    if (cfg.sweep.empty() || cfg.sweep.size() > 2) rd.fail(sw, "sweep", "needs one or two axes");
  }
  if (root["u0"]) {
    parse_u0(rd, root["u0"], cfg);
  } else {
    cfg.u0.modes.assign(static_cast<std::size_t>(p.n), 0);
    cfg.u0.modes[0] = 1;
  }
}

double periodic_offset(double x, double c, double L) { return std::remainder(x - c, L); }

Json params_json(const model::ModelParams& p) {
  Json j;
  j["beta"] = p.beta;
  j["alpha"] = p.alpha;
  j["a"] = p.a;
  j["b"] = p.b;
  j["n"] = p.n;
  j["L"] = p.L;
  j["eps_mollify"] = p.eps_mollify ? Json(*p.eps_mollify) : Json(nullptr);
  j["chemotaxis_on"] = p.chemotaxis_on;
  return j;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw FormatError("csv: not a number: '" + s + "'");
  return v;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, int column, const std::string& field,
                         const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + field + ": " +
                         message),
      line_(line),
      field_(field) {}

RunConfig parse_config_string(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.mark.column + 1, "<syntax>", e.msg);
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  RunConfig cfg;
  parse_root(Reader(source), root, cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, 0, "<file>", "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), path);
}

std::string config_to_json(const RunConfig& cfg) {
  Json j = params_json(cfg.params);
  j["grid"] = cfg.grid;
  j["dt"] = cfg.dt;
  j["T"] = cfg.T;
  Json u;
  u["kind"] = cfg.u0.kind;
  u["amplitude"] = cfg.u0.amplitude;
  u["sigma"] = cfg.u0.sigma;
  u["offset"] = cfg.u0.offset;
  u["mass"] = cfg.u0.mass ? Json(*cfg.u0.mass) : Json(nullptr);
  u["center"] = cfg.u0.center;
  u["mean"] = cfg.u0.mean;
  u["modes"] = cfg.u0.modes;
  u["path"] = cfg.u0.path;
  u["noise"] = cfg.u0.noise;
  j["u0"] = u;
  j["seed"] = cfg.seed;
  j["snapshot_stride"] = cfg.snapshot_stride;
  j["q_values"] = cfg.q_values;
  j["clip_negative"] = cfg.clip_negative;
  j["blowup_factor"] = cfg.blowup_factor;
  j["C0"] = cfg.C0;
  j["sigma"] = cfg.sigma ? Json(*cfg.sigma) : Json(nullptr);
  j["use_l2_norm"] = cfg.use_l2_norm;
  j["check_dt_guard"] = cfg.check_dt_guard;
  j["output_dir"] = cfg.output_dir;
  j["threads"] = cfg.threads ? Json(*cfg.threads) : Json(nullptr);
  Json sw = Json::object();
  for (const auto& ax : cfg.sweep) sw[ax.name] = ax.values;
  j["sweep"] = sw;
  return j.dump(2);
}

spectral::Field make_initial_data(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const spectral::Grid g{p.n, cfg.grid, p.L};
  spectral::validate(g);
  const auto& u = cfg.u0;
  spectral::Field f(g);
  if (u.kind == "file") {
    f = spectral::read_snapshot(u.path).field;
    if (!(f.grid == g)) throw UsageError("initial data: snapshot grid does not match the configuration");
  } else if (u.kind == "gaussian") {
    double amp = u.amplitude;
    if (u.mass) amp = *u.mass / (std::pow(2.0 * std::numbers::pi, 0.5 * p.n) * std::pow(u.sigma, p.n));
    const double cx = u.center.empty() ? 0.5 * p.L : u.center[0];
    const double cy = u.center.size() > 1 ? u.center[1] : 0.5 * p.L;
    const double s2 = 2.0 * u.sigma * u.sigma;
    f = spectral::sample(g, [&](double x, double y) {
      const double dx = periodic_offset(x, cx, p.L);
      const double dy = p.n == 2 ? periodic_offset(y, cy, p.L) : 0.0;
      return u.offset + amp * std::exp(-(dx * dx + dy * dy) / s2);
    });
  } else {
    const double k = 2.0 * std::numbers::pi / p.L;
    const double mx = u.modes[0];
    const double my = u.modes.size() > 1 ? u.modes[1] : 0.0;
    f = spectral::sample(g, [&](double x, double y) { return u.mean + u.amplitude * std::cos(k * (mx * x + my * y)); });
  }
  if (u.noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(-u.noise, u.noise);
    for (double& v : f.values) v += dist(rng);
  }
  return f;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_diagnostics_csv(std::ostream& os, const model::Trajectory& traj) {
  os << "# " << kDiagnosticsSchema << ' ' << kCsvMajor << '.' << kCsvMinor << '\n';
  os << "t,mass,min_u,linf,l1,l2";
  for (double q : traj.q_values) os << ",lq:" << format_double(q);
  os << ",seminorm";
  for (double q : traj.q_values) os << ",gronwall_envelope:" << format_double(q);
  os << '\n';
  for (const auto& r : traj.rows) {
    os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.min_u) << ','
       << format_double(r.linf) << ',' << format_double(r.l1) << ',' << format_double(r.l2);
    for (double v : r.lq) os << ',' << format_double(v);
    os << ',' << format_double(r.seminorm);
    for (double v : r.envelope) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_diagnostics_csv(const std::string& path, const model::Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  write_diagnostics_csv(out, traj);
  if (!out) throw FormatError("write failed for " + path);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw FormatError("csv: missing column '" + name + "'");
}

CsvTable parse_diagnostics_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw FormatError("csv: empty input");
  const std::string prefix = std::string("# ") + kDiagnosticsSchema + ' ';
  if (line.rfind(prefix, 0) != 0) throw FormatError("csv: missing '" + prefix + "' header");
  CsvTable t;
  const std::string ver = line.substr(prefix.size());
  const auto dot = ver.find('.');
  if (dot == std::string::npos) throw FormatError("csv: malformed version '" + ver + "'");
  t.major = static_cast<int>(parse_number(ver.substr(0, dot)));
  t.minor = static_cast<int>(parse_number(ver.substr(dot + 1)));
  if (t.major != kCsvMajor) throw FormatError("csv: unsupported schema major version " + std::to_string(t.major));
  if (!std::getline(is, line)) throw FormatError("csv: missing column header");
  t.columns = split(line, ',');
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size()) throw FormatError("csv: ragged row");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_diagnostics_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_diagnostics_csv(ss.str());
}

void write_sweep_summary(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << "# " << kSweepSchema << ' ' << kCsvMajor << '.' << kCsvMinor << '\n';
  out << "point,a,b,alpha,beta,n,regime,one_minus_alpha_over_n,admissible,status,bounded,sup_linf,manifest\n";
  for (const auto& r : rows) {
    out << r.index << ',' << format_double(r.params.a) << ',' << format_double(r.params.b) << ','
        << format_double(r.params.alpha) << ',' << format_double(r.params.beta) << ',' << r.params.n << ','
        << r.regime << ',' << format_double(1.0 - r.params.alpha / r.params.n) << ',' << (r.admissible ? 1 : 0) << ',' << r.status << ',' << (r.bounded ? 1 : 0) << ','
        << format_double(r.sup_linf) << ',' << r.manifest << '\n';
  }
}

}  // namespace fraks::io
