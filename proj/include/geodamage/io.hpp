#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "geodamage/diagnostics.hpp"
#include "geodamage/rescaling.hpp"

namespace geodamage {

inline constexpr const char* kConfigHeader = "geodamage-config 1";
inline constexpr int kCsvVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& field, const std::string& msg)
      : std::runtime_error(format(line, field, msg)), line_(line), field_(field) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(int line, const std::string& field, const std::string& msg) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!field.empty()) out += " field '" + field + "'";
    return out + ": " + msg;
  }
  int line_;
  std::string field_;
};

struct MeshConfig {
  bool homogeneous = false;
  double lx = 1.0, ly = 1.0;
  int nx = 8, ny = 8;
};

struct RunConfig {
  MeshConfig mesh;
  MaterialLaw law;
  LoadProgram load;
  int k = 50;
  double eps = 0.0;
  std::vector<double> eps_sweep;
  SolverConfig solver;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int rescale_intervals = 0;
  double balance_rate = 0.01;

  FeSpace make_space() const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const RunConfig& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

struct CsvTable {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Every file starts with "# geodamage <schema> v<version>" then a column line.
CsvTable read_csv(const std::filesystem::path& path, const std::string& schema);

void write_states(const std::filesystem::path& path, const Trajectory& traj);
std::vector<State> read_states(const std::filesystem::path& path);
void write_energy(const std::filesystem::path& path, const Trajectory& traj);
void write_steps(const std::filesystem::path& path, const Trajectory& traj);
void write_checks(const std::filesystem::path& path, const std::vector<CheckReport>& checks);
void write_rescaled(const std::filesystem::path& path, const RescaledTrajectory& rt, const BvReport& report);
void write_bv_report(const std::filesystem::path& path, const RescaledTrajectory& rt, const BvReport& report);
void write_comparison(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows);

/// states.csv, energy.csv, steps.csv and config.cfg in dir.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const RunConfig& cfg);

/// Rebuilds a trajectory from dir and recomputes every per-step record.
Trajectory read_trajectory(const std::filesystem::path& dir, const RunConfig& cfg, const IncrementalSolver& solver);

}  // namespace geodamage
