#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fraks/diagnostics.hpp"
#include "fraks/errors.hpp"
#include "fraks/io.hpp"
#include "fraks/model.hpp"
#include "fraks/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kBlowup = 3 };

struct Overrides {
  std::optional<double> dt, T;
  std::optional<std::size_t> grid, snapshot_stride, threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  void apply(fraks::io::RunConfig& cfg) const {
    if (dt) {
      if (!(*dt > 0.0)) throw fraks::io::ConfigError("--dt", 0, 0, "dt", "must be positive");
      cfg.dt = *dt;
    }
    if (T) {
      if (!(*T > 0.0)) throw fraks::io::ConfigError("--T", 0, 0, "T", "must be positive");
      cfg.T = *T;
    }
    if (grid) {
      const std::size_t g = *grid;
      if (g < 8 || (g & (g - 1)) != 0) throw fraks::io::ConfigError("--grid", 0, 0, "grid", "must be a power of two >= 8");
      cfg.grid = g;
    }
    if (snapshot_stride) cfg.snapshot_stride = *snapshot_stride;
    if (threads) {
      if (*threads < 1) throw fraks::io::ConfigError("--threads", 0, 0, "threads", "must be at least 1");
      cfg.threads = *threads;
    }
    if (seed) cfg.seed = *seed;
    if (out) cfg.output_dir = *out;
  }
};

fraks::model::ClassifyOptions classify_options(const fraks::io::RunConfig& cfg) {
  fraks::model::ClassifyOptions o;
  o.T = cfg.T;
  o.C0 = cfg.C0;
  o.sigma = cfg.sigma;
  o.use_l2_norm = cfg.use_l2_norm;
  return o;
}

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json regime_json(const fraks::model::Regime& r) {
  ordered_json j;
  j["kind"] = fraks::model::to_string(r.kind);
  j["one_minus_alpha_over_n"] = r.one_minus_alpha_over_n;
  j["c_star"] = optional_number(r.c_star);
  j["a_max"] = optional_number(r.a_max);
  j["admissible"] = r.admissible;
  j["within_hypotheses"] = r.within_hypotheses;
  j["norm_n_over_alpha"] = r.norm_n_over_alpha;
  j["norm_l2"] = r.norm_l2;
  j["sigma"] = r.sigma;
  j["C0"] = r.C0;
  j["T"] = r.T;
  return j;
}

std::string snapshot_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u_%06zu.fks1", step);
  return buf;
}

struct RunOutcome {
  fraks::model::RunStatus status = fraks::model::RunStatus::Completed;
  std::optional<fraks::model::Regime> regime;
  double sup_linf = 0.0;
  std::string manifest;
};

// Runs one configuration into dir; the manifest is written even when the run throws.
RunOutcome run_into(const fraks::io::RunConfig& cfg, const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(dir);
  RunOutcome res;
  res.manifest = (dir / "manifest.json").string();
  ordered_json manifest;
  manifest["version"] = FRAKS_VERSION;
  manifest["config"] = ordered_json::parse(fraks::io::config_to_json(cfg));
  std::vector<std::string> files;
  std::string status = "error";
  std::string message;

  auto finish = [&] {
    manifest["status"] = status;
    manifest["message"] = message;
    manifest["regime"] = res.regime ? regime_json(*res.regime) : ordered_json(nullptr);
    manifest["files"] = files;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream out(res.manifest, std::ios::binary);
    out << manifest.dump(2) << '\n';
  };

  try {
    const auto u0 = fraks::io::make_initial_data(cfg);
    try {
      res.regime = fraks::model::classify_regime(cfg.params, u0, classify_options(cfg));
    } catch (const fraks::DomainError& e) {
      manifest["regime_error"] = e.what();
    }
    fraks::model::SimulateOptions so;
    so.snapshot_stride = cfg.snapshot_stride;
    so.q_values = cfg.q_values;
    so.blowup_factor = cfg.blowup_factor;
    so.clip_negative = cfg.clip_negative;
    so.check_dt_guard = cfg.check_dt_guard;
    const auto traj = fraks::model::simulate(cfg.params, u0, cfg.dt, cfg.T, so);

    fraks::io::write_diagnostics_csv((dir / "diagnostics.csv").string(), traj);
    files.push_back("diagnostics.csv");
    fs::create_directories(dir / "snapshots");
    for (const auto& s : traj.snapshots) {
      const auto step = static_cast<std::size_t>(std::llround(s.t / cfg.dt));
      const std::string rel = "snapshots/" + snapshot_name(step);
      fraks::spectral::write_snapshot((dir / rel).string(), s.field, s.t);
      files.push_back(rel);
    }
    for (const auto& r : traj.rows) res.sup_linf = std::max(res.sup_linf, r.linf);
    res.status = traj.status;
    status = fraks::model::to_string(traj.status);
    message = traj.message;
  } catch (const std::exception& e) {
    message = e.what();
    finish();
    throw;
  }
  finish();
  return res;
}

void print_regime(std::ostream& os, const fraks::model::Regime& r) {
  auto opt = [](const std::optional<double>& v) { return v ? fraks::io::format_double(*v) : std::string("n/a"); };
  os << "kind: " << fraks::model::to_string(r.kind) << '\n'
     << "one_minus_alpha_over_n: " << fraks::io::format_double(r.one_minus_alpha_over_n) << '\n'
     << "c_star: " << opt(r.c_star) << '\n'
     << "a_max: " << opt(r.a_max) << '\n'
     << "norm_n_over_alpha: " << fraks::io::format_double(r.norm_n_over_alpha) << '\n'
     << "norm_l2: " << fraks::io::format_double(r.norm_l2) << '\n'
     << "admissible: " << (r.admissible ? "true" : "false") << '\n'
     << "within_hypotheses: " << (r.within_hypotheses ? "true" : "false") << '\n';
}

int cmd_run(const std::string& path, const Overrides& ov) {
  auto cfg = fraks::io::parse_config_file(path);
  ov.apply(cfg);
  const auto res = run_into(cfg, cfg.output_dir);
  if (res.status == fraks::model::RunStatus::BlowupSuspected) {
    std::cerr << "fraks: blow-up suspected; partial outputs in " << cfg.output_dir << '\n';
    return kBlowup;
  }
  return kOk;
}

int cmd_classify(const std::string& path, const Overrides& ov) {
  auto cfg = fraks::io::parse_config_file(path);
  ov.apply(cfg);
  const auto u0 = fraks::io::make_initial_data(cfg);
  print_regime(std::cout, fraks::model::classify_regime(cfg.params, u0, classify_options(cfg)));
  return kOk;
}

int cmd_verify(const std::string& suite, const std::string& out_dir, bool inject) {
  fraks::verify::SuiteOptions opt;
  opt.inject_sign_error = inject;
  const auto checks = fraks::verify::run_suite(suite, opt);
  const auto report = fraks::diagnostics::format_report(checks);
  fs::create_directories(out_dir);
  const fs::path file = fs::path(out_dir) / ("verify_" + suite + ".tsv");
  std::ofstream(file, std::ios::binary) << report;
  std::cout << report;
  for (const auto& c : checks)
    if (!c.pass) return kVerifyFailed;
  return kOk;
}

std::size_t worker_count(const fraks::io::RunConfig& cfg, std::size_t points) {
  std::size_t n = cfg.threads.value_or(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("FRAKS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
      throw fraks::io::ConfigError("FRAKS_THREADS", 0, 0, "threads", "must be a positive integer");
    n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, std::min(n, points));
}

void set_axis(fraks::model::ModelParams& p, const std::string& name, double v) {
  if (name == "a") p.a = v;
  else if (name == "b") p.b = v;
  else if (name == "alpha") p.alpha = v;
  else p.beta = v;
}

int cmd_sweep(const std::string& path, const Overrides& ov) {
  auto cfg = fraks::io::parse_config_file(path);
  ov.apply(cfg);
  if (cfg.sweep.empty()) throw fraks::io::ConfigError(path, 0, 0, "sweep", "sweep needs a sweep section");
  std::vector<fraks::io::RunConfig> points{cfg};
  for (const auto& axis : cfg.sweep) {
    std::vector<fraks::io::RunConfig> next;
    for (const auto& base : points)
      for (double v : axis.values) {
        auto c = base;
        set_axis(c.params, axis.name, v);
        next.push_back(std::move(c));
      }
    points = std::move(next);
  }
  for (auto& c : points) {
    fraks::model::validate(c.params);
    c.sweep.clear();
  }

  const fs::path root = cfg.output_dir;
  fs::create_directories(root);
  std::vector<fraks::io::SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::vector<std::string> errors;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      char name[32];
      std::snprintf(name, sizeof name, "point_%03zu", i);
      auto& row = rows[i];
      row.index = i;
      row.params = points[i].params;
      row.manifest = std::string(name) + "/manifest.json";
      points[i].output_dir = (root / name).string();
      try {
        const auto res = run_into(points[i], root / name);
        row.regime = res.regime ? fraks::model::to_string(res.regime->kind) : "n/a";
        row.admissible = res.regime && res.regime->admissible;
        row.status = fraks::model::to_string(res.status);
        row.bounded = res.status == fraks::model::RunStatus::Completed && std::isfinite(res.sup_linf);
        row.sup_linf = res.sup_linf;
      } catch (const std::exception& e) {
        row.regime = "n/a";
        row.status = "error";
        row.sup_linf = std::nan("");
        std::lock_guard lock(err_mu);
        errors.push_back(std::string(name) + ": " + e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t workers = worker_count(cfg, points.size());
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  fraks::io::write_sweep_summary((root / "summary.csv").string(), rows);
  for (const auto& e : errors) std::cerr << "fraks: " << e << '\n';
  return errors.empty() ? kOk : kConfigError;
}

void add_overrides(CLI::App* sub, Overrides& ov) {
  sub->add_option("--dt", ov.dt, "time step");
  sub->add_option("--T", ov.T, "final time");
  sub->add_option("--grid", ov.grid, "points per axis");
  sub->add_option("--seed", ov.seed, "noise seed");
  sub->add_option("--snapshot-stride", ov.snapshot_stride, "steps between snapshots");
  sub->add_option("--threads", ov.threads, "sweep workers");
  sub->add_option("--out", ov.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-space fractional Keller-Segel simulator"};
  app.set_version_flag("--version", FRAKS_VERSION);
  app.require_subcommand(1);

  std::string config;
  Overrides ov;
  auto* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("config", config, "YAML config")->required();
  add_overrides(run, ov);
  auto* classify = app.add_subcommand("classify", "print the regime record");
  classify->add_option("config", config, "YAML config")->required();
  add_overrides(classify, ov);
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
  sweep->add_option("config", config, "YAML config with a sweep section")->required();
  add_overrides(sweep, ov);

  std::string suite;
  std::string verify_out = "fraks_out";
  bool inject = false;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("suite", suite, "specfun, operators, inequalities, regimes, blowup or all")
      ->required()
      ->check(CLI::IsMember({"specfun", "operators", "inequalities", "regimes", "blowup", "all"}));
  verify->add_option("--out", verify_out, "report directory");
  verify->add_flag("--inject-fault", inject, "flip the dissipation sign (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, ov);
    if (*classify) return cmd_classify(config, ov);
    if (*sweep) return cmd_sweep(config, ov);
    return cmd_verify(suite, verify_out, inject);
  } catch (const fraks::io::ConfigError& e) {
    std::cerr << "fraks: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fraks::DomainError& e) {
    std::cerr << "fraks: invalid configuration: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "fraks: " << e.what() << '\n';
    return kConfigError;
  }
}
