#include "pam2d/experiments.hpp"
#include "pam2d/parallel.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <thread>

namespace {

using namespace pam2d;

std::optional<unsigned> parse_threads(const char* text) {
  if (!text || !*text) return std::nullopt;
  unsigned n = 0;
  const char* end = text + std::char_traits<char>::length(text);
  const auto res = std::from_chars(text, end, n);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigFileError({std::string("PAM2D_THREADS: not a count: ") + text});
  return n;
}

// --threads, then PAM2D_THREADS, then general.threads, then the hardware
unsigned resolve_threads(std::optional<unsigned> flag, const Config& config) {
  if (flag && *flag > 0) return *flag;
  if (const auto env = parse_threads(std::getenv("PAM2D_THREADS")); env && *env > 0) return *env;
  if (const std::int64_t n = config.integer("general", "threads"); n > 0) return static_cast<unsigned>(n);
  return std::max(1u, std::thread::hardware_concurrency());
}

void print_records(const RunResult& r) {
  std::cout << r.subcommand << "  config " << r.config_hash << '\n';
  std::cout << std::setprecision(6);
  for (const ResultRecord& rec : r.records) {
    std::cout << (rec.pass ? "  PASS  " : "  FAIL  ") << std::left << std::setw(44) << rec.metric << std::right
              << std::setw(14) << rec.value << " +- " << std::setw(11) << rec.se;
    if (rec.criterion != "reported") std::cout << "  ref " << rec.reference << "  tol " << rec.tolerance;
    std::cout << '\n';
  }
  for (const std::string& w : r.warnings) std::cout << "  warning: " << w << '\n';
  std::cout << (r.passed() ? "all metrics pass" : "some metrics fail") << "  (" << r.wall_time << " s)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pam2d: numerical lab for the chaos expansion of the 2D parabolic Anderson model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::vector<std::string> names = subcommand_names();
  names.push_back("validate");
  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(name, name == "validate" ? "dry-run of every guard" : "run the " + name + " study");
    sub->add_option("--config", config_path, "INI config file")->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--threads", threads, "worker threads (falls back to PAM2D_THREADS)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitConfigError;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  Config config;
  try {
    config = Config::load(config_path);
    if (seed) config.set("general", "master_seed", std::to_string(*seed));
    set_thread_count(resolve_threads(threads, config));
  } catch (const ConfigFileError& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kExitConfigError;
  }

  if (subcommand == "validate") {
    const GuardReport report = check_guards(config);
    std::cout << format_guard_report(report);
    return report.ok() ? kExitSuccess : kExitGuardViolation;
  }

  try {
    const RunResult result = run_experiment(subcommand, config);
    result.write(out_dir, config);
    print_records(result);
    return result.exit_code();
  } catch (const ConfigurationError& e) {
    std::cerr << subcommand << ": " << e.what() << '\n';
    return kExitGuardViolation;
  } catch (const InvalidParameter& e) {
    std::cerr << subcommand << ": invalid parameter: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << subcommand << ": " << e.what() << '\n';
    return kExitRuntimeError;
  }
}
