#pragma once

#include "pam2d/config.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace pam2d {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitMetricFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitGuardViolation = 3;
inline constexpr int kExitRuntimeError = 4;

/// One named metric with its Monte Carlo error and the verdict against its tolerance.
struct ResultRecord {
  std::string metric;
  double value = 0.0;
  double se = 0.0;        // 0 for deterministic quantities
  double reference = 0.0;
  double tolerance = 0.0;
  std::string criterion;  // how value, reference and tolerance are compared
  bool pass = false;
  double wall_time = 0.0;  // seconds spent producing the metric
};

struct RunResult {
  std::string subcommand;
  std::string config_hash;
  std::vector<ResultRecord> records;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> csv;  // file name -> contents
  double wall_time = 0.0;

  bool passed() const;
  int exit_code() const { return passed() ? kExitSuccess : kExitMetricFailure; }
  const ResultRecord& record(const std::string& metric) const;
  /// Summary document: embedded config, its hash, records and warnings.
  std::string summary_json(const Config& config) const;
  /// Writes every CSV and `<subcommand>_summary.json` into `dir`, creating it if needed.
  void write(const std::filesystem::path& dir, const Config& config) const;
};

const std::vector<std::string>& subcommand_names();
bool is_subcommand(const std::string& name);

/// Runs one study. Guards are checked first and raise ConfigurationError naming
/// the violated guard; nothing is written to disk.
RunResult run_experiment(const std::string& subcommand, const Config& config);

/// Guard dry-run as a printable report.
std::string format_guard_report(const GuardReport& report);

}  // namespace pam2d
