#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fraks/model.hpp"
#include "fraks/spectral.hpp"

namespace fraks::io {

inline constexpr int kCsvMajor = 1;
inline constexpr int kCsvMinor = 0;
inline constexpr const char* kDiagnosticsSchema = "fraks-diagnostics";
inline constexpr const char* kSweepSchema = "fraks-sweep";

// Invalid configuration; what() reads "<source>:<line>:<column>: <field>: <message>".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, int column, const std::string& field, const std::string& message);
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

struct InitialData {
  std::string kind = "gaussian";  // gaussian | cosine | file
  // gaussian: offset + amplitude exp(-|x - center|^2 / (2 sigma^2)); mass, when set, fixes the amplitude.
  double amplitude = 1.0;
  double sigma = 1.0;
  double offset = 0.0;
  std::optional<double> mass;
  std::vector<double> center;  // box centre when empty
  // cosine: mean + amplitude cos(2 pi (m . x) / L)
  double mean = 1.0;
  std::vector<int> modes{1, 0};
  // file: FKS1 snapshot on the configured grid
  std::string path;
  // Uniform noise in [-noise, noise] drawn from seed, added to every kind.
  double noise = 0.0;
};

struct SweepAxis {
  std::string name;  // a, b, alpha or beta
  std::vector<double> values;
};

struct RunConfig {
  model::ModelParams params;
  std::size_t grid = 64;
  double dt = 1e-3;
  double T = 1.0;
  InitialData u0;
  std::uint64_t seed = 0;
  std::size_t snapshot_stride = 0;
  std::vector<double> q_values{2.0, 4.0};
  bool clip_negative = false;
  double blowup_factor = 1e6;
  double C0 = 1.0;
  std::optional<double> sigma;
  bool use_l2_norm = false;
  bool check_dt_guard = true;
  std::string output_dir = "fraks_out";
  std::optional<std::size_t> threads;
  std::vector<SweepAxis> sweep;  // exactly two axes when present
};

RunConfig parse_config_string(const std::string& text, const std::string& source = "<config>");
RunConfig parse_config_file(const std::string& path);

// Config echo for manifests.
std::string config_to_json(const RunConfig& cfg);

spectral::Field make_initial_data(const RunConfig& cfg);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

void write_diagnostics_csv(std::ostream& os, const model::Trajectory& traj);
void write_diagnostics_csv(const std::string& path, const model::Trajectory& traj);

struct CsvTable {
  int major = 0;
  int minor = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Index of a column; throws FormatError when absent.
  std::size_t column(const std::string& name) const;
};
// Throws FormatError on a missing or foreign header, an unknown major version or a ragged row.
CsvTable read_diagnostics_csv(const std::string& path);
CsvTable parse_diagnostics_csv(const std::string& text);

struct SweepRow {
  std::size_t index = 0;
  model::ModelParams params;
  std::string regime;
  bool admissible = false;
  std::string status;
  bool bounded = false;
  double sup_linf = 0.0;
  std::string manifest;
};
void write_sweep_summary(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace fraks::io
