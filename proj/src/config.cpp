#include "pam2d/config.hpp"

#include "pam2d/brownian.hpp"
#include "pam2d/noise.hpp"
#include "pam2d/pde.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace pam2d {
namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "invalid configuration:";
  for (const std::string& i : issues) out += "\n  " + i;
  return out;
}

using K = ValueKind;
using R = Range;

ConfigKey entry(std::string section, std::string key, std::string fallback, ValueKind kind, Range range = Range::any,
                std::string choices = {}) {
  return {std::move(section), std::move(key), std::move(fallback), kind, range, std::move(choices)};
}

// Defaults reproduce the acceptance parameters.
const std::vector<ConfigKey> kSchema = {
    entry("general", "master_seed", "20241016", K::seed),
    entry("general", "threads", "0", K::integer, R::nonnegative),
    entry("general", "profile", "standard_bump", K::text, R::any, "standard_bump|triangle_product"),
    entry("general", "small_time_bound", "0.1", K::real, R::positive),
    entry("general", "step_guard_ratio", "10", K::real, R::positive),

    entry("noise-check", "eps", "0.1", K::real, R::unit),
    entry("noise-check", "side", "1.0", K::real, R::positive),
    entry("noise-check", "spacing", "0.0125", K::real, R::positive),
    entry("noise-check", "seeds", "10000", K::integer, R::positive),
    entry("noise-check", "offset", "0.2", K::real, R::positive),
    entry("noise-check", "t", "0.5", K::real, R::positive),
    entry("noise-check", "paths", "100000", K::integer, R::positive),
    entry("noise-check", "se_tolerance", "3", K::real, R::positive),
    entry("noise-check", "fourier_tolerance", "1e-4", K::real, R::positive),
    entry("noise-check", "periodization_tolerance", "1e-6", K::real, R::positive),

    entry("silt-study", "t", "0.05", K::real, R::positive),
    entry("silt-study", "eps", "0.1, 0.05", K::real_list, R::unit),
    entry("silt-study", "paths", "100000", K::integer, R::positive),
    entry("silt-study", "steps", "0", K::integer, R::nonnegative),
    entry("silt-study", "se_tolerance", "3", K::real, R::positive),
    entry("silt-study", "exp_eps", "0.1, 0.05, 0.025", K::real_list, R::unit),
    entry("silt-study", "exp_paths", "100000", K::integer, R::positive),
    entry("silt-study", "spread_tolerance", "0.10", K::real, R::positive),
    entry("silt-study", "ess_fraction", "0.10", K::real, R::unit),
    entry("silt-study", "refine_paths", "200", K::integer, R::positive),
    entry("silt-study", "refine_levels", "3", K::integer, R::positive),

    entry("renorm-fit", "eps", "0.1, 0.05, 0.025", K::real_list, R::unit),
    entry("renorm-fit", "t_grid", "0.02, 0.05, 0.1, 0.2, 0.3, 0.5", K::real_list, R::positive),
    entry("renorm-fit", "mu2_tolerance", "0.10", K::real, R::positive),

    entry("polymer-density", "t", "0.05", K::real, R::positive),
    entry("polymer-density", "eps_gamma", "0.025", K::real, R::unit),
    entry("polymer-density", "paths", "20000", K::integer, R::positive),
    entry("polymer-density", "unit_paths", "100000", K::integer, R::positive),
    entry("polymer-density", "steps", "0", K::integer, R::nonnegative),
    entry("polymer-density", "times", "0.025, 0.05", K::real_list, R::positive),
    entry("polymer-density", "delta", "0.02", K::real, R::positive),
    entry("polymer-density", "grid_side", "2.0", K::real, R::positive),
    entry("polymer-density", "grid_cells", "400", K::integer, R::positive),
    entry("polymer-density", "check_points", "0.0,0.0; 0.1,0.05; -0.15,0.1; 0.2,-0.2; 0.05,0.3", K::tuples),
    entry("polymer-density", "mass_tolerance", "0.02", K::real, R::positive),
    entry("polymer-density", "se_tolerance", "3", K::real, R::positive),

    entry("chaos-coeffs", "t", "0.02", K::real, R::positive),
    entry("chaos-coeffs", "eps", "0.05", K::real, R::unit),
    entry("chaos-coeffs", "paths", "10000", K::integer, R::positive),
    entry("chaos-coeffs", "steps", "0", K::integer, R::nonnegative),
    entry("chaos-coeffs", "x", "0.0, 0.0", K::real_list),
    entry("chaos-coeffs", "points1", "0.1,0.0; 0.0,0.1; -0.1,-0.05", K::tuples),
    entry("chaos-coeffs", "points2", "0.1,0.0,0.0,0.1; -0.1,0.05,0.05,-0.1", K::tuples),
    entry("chaos-coeffs", "points3", "0.1,0.0,0.0,0.1,-0.1,0.0", K::tuples),
    entry("chaos-coeffs", "hermite_samples", "1000000", K::integer, R::positive),
    entry("chaos-coeffs", "hermite_max_order", "4", K::integer, R::positive),
    entry("chaos-coeffs", "hermite_se_tolerance", "4", K::real, R::positive),

    entry("wick-check", "t", "0.05", K::real, R::positive),
    entry("wick-check", "eps", "0.02", K::real, R::unit),
    entry("wick-check", "paths", "100000", K::integer, R::positive),
    entry("wick-check", "steps", "0", K::integer, R::nonnegative),
    entry("wick-check", "x", "0.0, 0.0", K::real_list),
    entry("wick-check", "points1", "0.1,0.0; 0.0,0.15; -0.12,0.05; 0.08,-0.16; -0.2,-0.1", K::tuples),
    entry("wick-check", "points2",
     "0.1,0.0,0.0,0.1; -0.1,0.05,0.1,0.1; 0.15,-0.05,-0.05,-0.15; 0.2,0.1,-0.1,0.2; -0.15,-0.1,0.1,-0.12", K::tuples),
    entry("wick-check", "se_tolerance", "3", K::real, R::positive),
    entry("wick-check", "integral_tolerance", "0.02", K::real, R::positive),
    entry("wick-check", "integral_side", "3.0", K::real, R::positive),
    entry("wick-check", "integral_cells", "300", K::integer, R::positive),

    entry("moments-study", "mutual_t", "0.5", K::real, R::positive),
    entry("moments-study", "mutual_eps", "0.01", K::real, R::unit),
    entry("moments-study", "mutual_pairs", "100000", K::integer, R::positive),
    entry("moments-study", "mutual_steps", "0", K::integer, R::nonnegative),
    entry("moments-study", "mutual_tolerance", "0.05", K::real, R::positive),
    entry("moments-study", "t", "0.05", K::real, R::positive),
    entry("moments-study", "eps", "0.05", K::real, R::unit),
    entry("moments-study", "pairs", "20000", K::integer, R::positive),
    entry("moments-study", "steps", "0", K::integer, R::nonnegative),
    entry("moments-study", "max_order", "5", K::integer, R::positive),
    entry("moments-study", "se_tolerance", "3", K::real, R::positive),
    entry("moments-study", "consistency_eps", "0.1, 0.05", K::real_list, R::unit),
    entry("moments-study", "consistency_pairs", "2000", K::integer, R::positive),

    entry("fk-vs-pde", "eps", "0.1", K::real, R::unit),
    entry("fk-vs-pde", "t", "0.05", K::real, R::positive),
    entry("fk-vs-pde", "side", "4.0", K::real, R::positive),
    entry("fk-vs-pde", "spacing", "0.0125", K::real, R::positive),
    entry("fk-vs-pde", "dt", "0", K::real, R::nonnegative),
    entry("fk-vs-pde", "scheme", "spectral", K::text, R::any, "spectral|five_point"),
    entry("fk-vs-pde", "noise_seed", "7", K::seed),
    entry("fk-vs-pde", "paths", "1000000", K::integer, R::positive),
    entry("fk-vs-pde", "steps", "0", K::integer, R::nonnegative),
    entry("fk-vs-pde", "sample_grid", "5", K::integer, R::positive),
    entry("fk-vs-pde", "relative_tolerance", "0.05", K::real, R::positive),
    entry("fk-vs-pde", "annealed_seeds", "200", K::integer, R::nonnegative),
    entry("fk-vs-pde", "annealed_t", "0.02", K::real, R::positive),
    entry("fk-vs-pde", "annealed_eps", "0.1", K::real_list, R::unit),
    entry("fk-vs-pde", "annealed_side", "1.0", K::real, R::positive),
    entry("fk-vs-pde", "annealed_paths", "2000", K::integer, R::positive),
    entry("fk-vs-pde", "annealed_ensemble", "20000", K::integer, R::positive),
    entry("fk-vs-pde", "se_tolerance", "3", K::real, R::positive),

    entry("truncation-study", "t", "0.02", K::real, R::positive),
    entry("truncation-study", "eps", "0.05", K::real, R::unit),
    entry("truncation-study", "pairs", "100000", K::integer, R::positive),
    entry("truncation-study", "steps", "0", K::integer, R::nonnegative),
    entry("truncation-study", "max_order", "4", K::integer, R::nonnegative),
    entry("truncation-study", "x", "0.0, 0.0", K::real_list),
    entry("truncation-study", "relative_tolerance", "0.05", K::real, R::positive),
    entry("truncation-study", "decay_t", "0.02, 0.05", K::real_list, R::positive),
    entry("truncation-study", "decay_max_order", "5", K::integer, R::positive),
    entry("truncation-study", "decay_pairs", "20000", K::integer, R::positive),
};

const ConfigKey* find_key(const std::string& section, const std::string& key) {
  for (const ConfigKey& k : kSchema)
    if (k.section == section && k.key == key) return &k;
  return nullptr;
}

bool known_section(const std::string& section) {
  for (const ConfigKey& k : kSchema)
    if (k.section == section) return true;
  return false;
}

bool parse_double(std::string text, double& out) {
  boost::algorithm::trim(text);
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

template <class Int>
bool parse_int(std::string text, Int& out) {
  boost::algorithm::trim(text);
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, [sep](char c) { return c == sep; });
  for (std::string& p : parts) boost::algorithm::trim(p);
  return parts;
}

bool in_range(double v, Range r) {
  switch (r) {
    case Range::positive: return v > 0.0;
    case Range::nonnegative: return v >= 0.0;
    case Range::unit: return v > 0.0 && v <= 1.0;
    case Range::any: return true;
  }
  return true;
}

const char* range_text(Range r) {
  switch (r) {
    case Range::positive: return "positive";
    case Range::nonnegative: return "nonnegative";
    case Range::unit: return "in (0, 1]";
    case Range::any: return "any value";
  }
  return "";
}

// Empty string when the value is acceptable, else a description of the problem.
std::string check_value(const ConfigKey& k, const std::string& value) {
  const std::string where = k.section + "." + k.key + ": ";
  switch (k.kind) {
    case ValueKind::real: {
      double v = 0.0;
      if (!parse_double(value, v)) return where + "expected a number, got '" + value + "'";
      if (!in_range(v, k.range)) return where + "must be " + range_text(k.range) + ", got " + value;
      return {};
    }
    case ValueKind::integer: {
      std::int64_t v = 0;
      if (!parse_int(value, v)) return where + "expected an integer, got '" + value + "'";
      if (!in_range(static_cast<double>(v), k.range)) return where + "must be " + range_text(k.range) + ", got " + value;
      return {};
    }
    case ValueKind::seed: {
      std::uint64_t v = 0;
      if (!parse_int(value, v)) return where + "expected an unsigned 64-bit integer, got '" + value + "'";
      return {};
    }
    case ValueKind::text: {
      if (k.choices.empty()) return {};
      for (const std::string& c : split(k.choices, '|'))
        if (c == value) return {};
      return where + "expected one of " + k.choices + ", got '" + value + "'";
    }
    case ValueKind::real_list: {
      for (const std::string& part : split(value, ',')) {
        double v = 0.0;
        if (!parse_double(part, v)) return where + "expected a comma separated list of numbers, got '" + value + "'";
        if (!in_range(v, k.range)) return where + "every entry must be " + range_text(k.range) + ", got " + part;
      }
      return {};
    }
    case ValueKind::tuples: {
      std::string trimmed = boost::algorithm::trim_copy(value);
      if (trimmed.empty()) return {};
      std::size_t width = 0;
      for (const std::string& tuple : split(trimmed, ';')) {
        const std::vector<std::string> coords = split(tuple, ',');
        if (coords.size() % 2 != 0) return where + "tuple '" + tuple + "' has an odd number of coordinates";
        if (width != 0 && coords.size() != width) return where + "tuples must all have the same length";
        width = coords.size();
        for (const std::string& c : coords) {
          double v = 0.0;
          if (!parse_double(c, v)) return where + "expected numeric coordinates, got '" + c + "'";
        }
      }
      return {};
    }
  }
  return {};
}

}  // namespace

ConfigFileError::ConfigFileError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

const std::vector<ConfigKey>& config_schema() { return kSchema; }

Config::Config() {
  for (const ConfigKey& k : kSchema) values_[k.section][k.key] = k.fallback;
}

Config Config::parse(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    std::ostringstream msg;
    msg << "line " << e.line() << ": " << e.message();
    throw ConfigFileError({msg.str()});
  }
  Config config;
  std::vector<std::string> issues;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      issues.push_back("'" + section + "' appears outside any section");
      continue;
    }
    if (!known_section(section)) {
      issues.push_back("unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, node] : body) {
      const ConfigKey* k = find_key(section, key);
      if (!k) {
        issues.push_back(section + "." + key + ": unknown key");
        continue;
      }
      const std::string value = boost::algorithm::trim_copy(node.data());
      if (std::string problem = check_value(*k, value); !problem.empty()) {
        issues.push_back(problem);
        continue;
      }
      config.values_[section][key] = value;
    }
  }
  if (!issues.empty()) throw ConfigFileError(issues);
  return config;
}

Config Config::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigFileError({"cannot open config file " + file.string()});
  return parse(in);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  const ConfigKey* k = find_key(section, key);
  if (!k) throw ConfigFileError({section + "." + key + ": unknown key"});
  if (std::string problem = check_value(*k, value); !problem.empty()) throw ConfigFileError({problem});
  values_[section][key] = value;
}

const std::string& Config::text(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  if (s != values_.end()) {
    const auto v = s->second.find(key);
    if (v != s->second.end()) return v->second;
  }
  throw InvalidParameter("no config key " + section + "." + key);
}

double Config::real(const std::string& section, const std::string& key) const {
  double v = 0.0;
  if (!parse_double(text(section, key), v)) throw InvalidParameter(section + "." + key + " is not a number");
  return v;
}

std::int64_t Config::integer(const std::string& section, const std::string& key) const {
  std::int64_t v = 0;
  if (!parse_int(text(section, key), v)) throw InvalidParameter(section + "." + key + " is not an integer");
  return v;
}

std::uint64_t Config::seed(const std::string& section, const std::string& key) const {
  std::uint64_t v = 0;
  if (!parse_int(text(section, key), v)) throw InvalidParameter(section + "." + key + " is not a seed");
  return v;
}

std::vector<double> Config::reals(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const std::string& part : split(text(section, key), ',')) {
    double v = 0.0;
    if (!parse_double(part, v)) throw InvalidParameter(section + "." + key + " is not a list of numbers");
    out.push_back(v);
  }
  return out;
}

std::vector<PointSet> Config::tuples(const std::string& section, const std::string& key, int points) const {
  std::vector<PointSet> out;
  const std::string value = boost::algorithm::trim_copy(text(section, key));
  if (value.empty()) return out;
  for (const std::string& tuple : split(value, ';')) {
    const std::vector<std::string> coords = split(tuple, ',');
    if (static_cast<int>(coords.size()) != 2 * points)
      throw InvalidParameter(section + "." + key + ": expected tuples of " + std::to_string(points) + " points");
    PointSet p(2, points);
    for (int k = 0; k < 2 * points; ++k) parse_double(coords[static_cast<std::size_t>(k)], p(k % 2, k / 2));
    out.push_back(p);
  }
  return out;
}

std::string Config::canonical() const {
  std::ostringstream out;
  std::set<std::string> done;
  for (const ConfigKey& k : kSchema) {
    if (!done.insert(k.section).second) continue;
    out << '[' << k.section << "]\n";
    for (const auto& [key, value] : values_.at(k.section)) out << key << " = " << value << '\n';
  }
  return out.str();
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace {

struct GuardChecker {
  const Config& config;
  GuardReport& report;
  double ratio;

  void step_guard(const std::string& section, const std::string& t_key, const std::string& steps_key,
                  double eps) {
    const double t = config.real(section, t_key);
    const std::int64_t steps = config.integer(section, steps_key);
    if (steps == 0) {
      report.passed.push_back(section + ": time step chosen automatically (h_t <= eps^2/" + fmt(ratio) + ")");
      return;
    }
    const double dt = t / static_cast<double>(steps);
    const double limit = eps * eps / ratio;
    if (dt > limit * (1.0 + 1e-12))
      report.violations.push_back(section + ": time step h_t=" + fmt(dt) + " violates h_t <= eps^2/" + fmt(ratio) +
                                  " = " + fmt(limit) + " (eps=" + fmt(eps) + ")");
    else
      report.passed.push_back(section + ": h_t=" + fmt(dt) + " <= eps^2/" + fmt(ratio));
  }

  void small_time(const std::string& section, double t) {
    const double bound = config.real("general", "small_time_bound");
    if (t > bound)
      report.warnings.push_back(section + ": t=" + fmt(t) + " exceeds the small-time bound " + fmt(bound) +
                                " (the expansion and the tilted measure are only controlled for small t)");
    else
      report.passed.push_back(section + ": t=" + fmt(t) + " within the small-time bound");
  }

  void resolution(const std::string& section, double spacing, double eps) {
    if (spacing > eps / 8.0 * (1.0 + 1e-12))
      report.violations.push_back(section + ": grid spacing h=" + fmt(spacing) + " violates h <= eps/8 = " +
                                  fmt(eps / 8.0));
    else
      report.passed.push_back(section + ": h=" + fmt(spacing) + " <= eps/8");
  }

  static std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
  }
};

double smallest(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

GuardReport check_guards(const Config& config, const std::string& subcommand) {
  GuardReport report;
  GuardChecker g{config, report, config.real("general", "step_guard_ratio")};
  auto wanted = [&](const std::string& s) { return subcommand.empty() || subcommand == s; };

  if (wanted("noise-check")) {
    const double side = config.real("noise-check", "side"), h = config.real("noise-check", "spacing");
    g.resolution("noise-check", h, config.real("noise-check", "eps"));
    try {
      grid_cells(side, h);
    } catch (const InvalidParameter& e) {
      report.violations.push_back(std::string("noise-check: ") + e.what());
    }
  }
  if (wanted("silt-study")) {
    std::vector<double> all = config.reals("silt-study", "eps");
    for (double e : config.reals("silt-study", "exp_eps")) all.push_back(e);
    g.step_guard("silt-study", "t", "steps", smallest(all));
    g.small_time("silt-study", config.real("silt-study", "t"));
  }
  if (wanted("renorm-fit")) {
    const std::vector<double> eps = config.reals("renorm-fit", "eps");
    bool ok = eps.size() >= 3;
    for (std::size_t i = 1; i < eps.size(); ++i) ok = ok && eps[i] < eps[i - 1];
    if (!ok) report.violations.push_back("renorm-fit: eps ladder must have at least three strictly decreasing levels");
    for (double t : config.reals("renorm-fit", "t_grid"))
      if (t > 0.5) report.violations.push_back("renorm-fit: t_grid entries must lie in (0, 0.5]");
  }
  if (wanted("polymer-density")) {
    g.step_guard("polymer-density", "t", "steps", config.real("polymer-density", "eps_gamma"));
    g.small_time("polymer-density", config.real("polymer-density", "t"));
    for (double s : config.reals("polymer-density", "times"))
      if (s > config.real("polymer-density", "t"))
        report.violations.push_back("polymer-density: density times must lie in (0, t]");
  }
  if (wanted("chaos-coeffs")) {
    g.step_guard("chaos-coeffs", "t", "steps", config.real("chaos-coeffs", "eps"));
    g.small_time("chaos-coeffs", config.real("chaos-coeffs", "t"));
  }
  if (wanted("wick-check")) {
    g.step_guard("wick-check", "t", "steps", config.real("wick-check", "eps"));
    g.small_time("wick-check", config.real("wick-check", "t"));
  }
  if (wanted("moments-study")) {
    g.step_guard("moments-study", "mutual_t", "mutual_steps", config.real("moments-study", "mutual_eps"));
    std::vector<double> all = config.reals("moments-study", "consistency_eps");
    all.push_back(config.real("moments-study", "eps"));
    g.step_guard("moments-study", "t", "steps", 0.5 * smallest(all));
  }
  if (wanted("fk-vs-pde")) {
    const double eps = config.real("fk-vs-pde", "eps"), h = config.real("fk-vs-pde", "spacing");
    const double side = config.real("fk-vs-pde", "side"), t = config.real("fk-vs-pde", "t");
    g.resolution("fk-vs-pde", h, eps);
    g.step_guard("fk-vs-pde", "t", "steps", eps);
    g.small_time("fk-vs-pde", t);
    bool grid_ok = true;
    try {
      grid_cells(side, h);
    } catch (const InvalidParameter& e) {
      grid_ok = false;
      report.violations.push_back(std::string("fk-vs-pde: ") + e.what());
    }
    const double dt = config.real("fk-vs-pde", "dt");
    if (dt > 0.25 * h * h * (1.0 + 1e-12))
      report.violations.push_back("fk-vs-pde: dt=" + GuardChecker::fmt(dt) + " violates dt <= h^2/4 = " +
                                  GuardChecker::fmt(0.25 * h * h));
    if (grid_ok && h <= eps / 8.0 * (1.0 + 1e-12)) {
      // the potential guard depends on the frozen noise sample; it is cheap to build
      const NoiseRealization noise = NoiseRealization::sample(side, h, config.seed("fk-vs-pde", "noise_seed"));
      const PeriodicField w = smoothed_field(noise, Mollifier(profile_from_string(config.text("general", "profile"))), eps);
      const double vmax = (w.values - renormalization_constant(eps)).abs().maxCoeff();
      const double admissible = max_stable_dt(h, vmax);
      const double used = dt > 0.0 ? dt : admissible;
      if (used > admissible * (1.0 + 1e-12))
        report.violations.push_back("fk-vs-pde: dt=" + GuardChecker::fmt(used) + " violates dt*max|V| <= 0.1; required dt <= " +
                                    GuardChecker::fmt(admissible));
      else
        report.passed.push_back("fk-vs-pde: dt=" + GuardChecker::fmt(used) + " satisfies the stability guards");
    }
    for (double e : config.reals("fk-vs-pde", "annealed_eps")) {
      const double ah = e / 8.0;
      try {
        grid_cells(config.real("fk-vs-pde", "annealed_side"), ah);
      } catch (const InvalidParameter&) {
        report.violations.push_back("fk-vs-pde: annealed_side must be a multiple of annealed_eps/8");
      }
    }
    g.small_time("fk-vs-pde (annealed)", config.real("fk-vs-pde", "annealed_t"));
  }
  if (wanted("truncation-study")) {
    g.step_guard("truncation-study", "t", "steps", config.real("truncation-study", "eps"));
    std::set<double> ts;
    for (double t : config.reals("truncation-study", "decay_t")) ts.insert(t);
    ts.insert(config.real("truncation-study", "t"));
    for (double t : ts) g.small_time("truncation-study", t);
    if (config.integer("truncation-study", "max_order") > 5)
      report.violations.push_back("truncation-study: max_order must be at most 5");
  }
  return report;
}

}  // namespace pam2d
