#pragma once

#include "pam2d/common.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pam2d {

/// A config file that does not parse or validate; what() lists every issue.
class ConfigFileError : public std::runtime_error {
 public:
  explicit ConfigFileError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

enum class ValueKind { real, integer, seed, text, real_list, tuples };

/// Admissible range of a numeric value (every element for lists).
enum class Range { any, positive, nonnegative, unit };  // unit: (0, 1]

/// One admissible key: its section, default (as text), kind and range. Text
/// keys with a nonempty `choices` list (separated by '|') are enumerations.
struct ConfigKey {
  std::string section;
  std::string key;
  std::string fallback;
  ValueKind kind;
  Range range = Range::any;
  std::string choices;
};

/// Every section and key understood by the runner, with defaults.
const std::vector<ConfigKey>& config_schema();

/// Experiment configuration: INI sections of key = value pairs on top of the
/// schema defaults. Lists are comma separated; point tuples are separated by
/// semicolons, each tuple a comma separated list of coordinates.
class Config {
 public:
  /// Schema defaults only.
  Config();

  /// Parses and validates; throws ConfigFileError listing every bad field.
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& file);

  /// Overrides one value (validated like a file entry).
  void set(const std::string& section, const std::string& key, const std::string& value);

  const std::string& text(const std::string& section, const std::string& key) const;
  double real(const std::string& section, const std::string& key) const;
  std::int64_t integer(const std::string& section, const std::string& key) const;
  std::uint64_t seed(const std::string& section, const std::string& key) const;
  std::vector<double> reals(const std::string& section, const std::string& key) const;
  /// Point tuples with `points` points each (2 * points coordinates).
  std::vector<PointSet> tuples(const std::string& section, const std::string& key, int points) const;

  /// Sections in schema order, keys sorted; the basis of hash().
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;

  const std::map<std::string, std::map<std::string, std::string>>& values() const { return values_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

/// Outcome of the guard dry-run.
struct GuardReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  std::vector<std::string> passed;
  bool ok() const { return violations.empty(); }
};

/// Checks h <= eps/8, h_t <= eps^2/ratio, dt stability and the small-time
/// bound for the given subcommand ("" for all) without running simulations.
GuardReport check_guards(const Config& config, const std::string& subcommand = "");

}  // namespace pam2d
