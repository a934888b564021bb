#include <doctest.h>

#include "pam2d/config.hpp"
#include "pam2d/experiments.hpp"
#include "pam2d/parallel.hpp"

#include <algorithm>
#include <sstream>

using namespace pam2d;

namespace {

Config parse(const std::string& text) {
  std::istringstream in(text);
  return Config::parse(in);
}

std::vector<std::string> issues_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigFileError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<std::string>& lines, const std::string& needle) {
  return std::any_of(lines.begin(), lines.end(), [&](const std::string& l) { return l.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("shipped default config equals the built-in defaults") {
  const Config shipped = Config::load(PAM2D_SOURCE_DIR "/configs/default.ini");
  CHECK(shipped.canonical() == Config().canonical());
  CHECK(shipped.hash() == Config().hash());
  CHECK(check_guards(shipped).ok());
  CHECK(check_guards(shipped).warnings.empty());
}

TEST_CASE("config values parse into typed fields") {
  const Config c = parse(
      "[general]\nmaster_seed = 18446744073709551615\nprofile = triangle_product\n"
      "[wick-check]\npoints2 = 0.1,0,0,0.1; -0.1,0.05,0.1,0.1\n[renorm-fit]\neps = 0.2, 0.1, 0.05\n");
  CHECK(c.seed("general", "master_seed") == 18446744073709551615ULL);
  CHECK(c.text("general", "profile") == "triangle_product");
  CHECK(c.reals("renorm-fit", "eps") == std::vector<double>{0.2, 0.1, 0.05});
  const std::vector<PointSet> tuples = c.tuples("wick-check", "points2", 2);
  REQUIRE(tuples.size() == 2);
  CHECK(tuples[1](0, 1) == 0.1);
  CHECK(tuples[1](1, 0) == 0.05);
  CHECK_THROWS_AS(c.tuples("wick-check", "points2", 1), InvalidParameter);
  CHECK(c.integer("wick-check", "paths") == 100000);
}

TEST_CASE("malformed configs are rejected with field-level reports") {
  CHECK(mentions(issues_of("[nosuch]\na = 1\n"), "unknown section [nosuch]"));
  CHECK(mentions(issues_of("[general]\nseed = 4\n"), "general.seed: unknown key"));
  CHECK(mentions(issues_of("[wick-check]\nt = fast\n"), "wick-check.t: expected a number"));
  CHECK(mentions(issues_of("[wick-check]\nt = -0.1\n"), "wick-check.t: must be positive"));
  CHECK(mentions(issues_of("[wick-check]\neps = 2\n"), "wick-check.eps: must be in (0, 1]"));
  CHECK(mentions(issues_of("[wick-check]\npaths = 1e5\n"), "wick-check.paths: expected an integer"));
  CHECK(mentions(issues_of("[general]\nmaster_seed = -3\n"), "general.master_seed"));
  CHECK(mentions(issues_of("[general]\nprofile = gaussian\n"), "expected one of standard_bump|triangle_product"));
  CHECK(mentions(issues_of("[renorm-fit]\neps = 0.1, x\n"), "renorm-fit.eps"));
  CHECK(mentions(issues_of("[wick-check]\npoints1 = 0.1,0.2,0.3\n"), "odd number of coordinates"));
  CHECK(mentions(issues_of("[wick-check]\npoints2 = 0.1,0.2; 0.1,0.2,0.3,0.4\n"), "same length"));
  CHECK(mentions(issues_of("stray = 1\n"), "outside any section"));
  CHECK(mentions(issues_of("[general]\nthreads = 1\nthreads = 2\n"), "line"));
  CHECK(mentions(issues_of("[general\n"), "line 1"));
  // every problem is reported, not just the first
  CHECK(issues_of("[wick-check]\nt = a\neps = b\n[bad]\nx = 1\n").size() == 3);
  CHECK_THROWS_AS(Config::load("/nonexistent/pam2d.ini"), ConfigFileError);
}

TEST_CASE("canonical form and hash identify the effective configuration") {
  const Config a = parse("[wick-check]\nt = 0.04\n[general]\nmaster_seed = 5\n");
  const Config b = parse("; comment\n[general]\nmaster_seed = 5\n\n[wick-check]\nt   =   0.04\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  Config c = a;
  c.set("general", "master_seed", "6");
  CHECK(c.hash() != a.hash());
  CHECK_THROWS_AS(c.set("general", "nosuch", "1"), ConfigFileError);
  CHECK_THROWS_AS(c.set("general", "master_seed", "x"), ConfigFileError);
}

TEST_CASE("guard dry-run: step guard, resolution and small-time bound") {
  // h_t = eps^2 for eps = 0.02, t = 0.05
  Config c;
  c.set("wick-check", "steps", "125");
  GuardReport r = check_guards(c, "wick-check");
  CHECK_FALSE(r.ok());
  CHECK(mentions(r.violations, "violates h_t <= eps^2/10"));
  CHECK(format_guard_report(r).find("VIOLATION wick-check") != std::string::npos);

  c = Config();
  c.set("wick-check", "steps", "1250");
  CHECK(check_guards(c, "wick-check").ok());

  c = Config();
  c.set("wick-check", "t", "1.0");
  r = check_guards(c, "wick-check");
  CHECK(r.ok());
  CHECK(mentions(r.warnings, "exceeds the small-time bound"));

  c = Config();
  c.set("fk-vs-pde", "spacing", "0.02");
  r = check_guards(c, "fk-vs-pde");
  CHECK(mentions(r.violations, "violates h <= eps/8"));

  c = Config();
  c.set("fk-vs-pde", "dt", "0.001");
  r = check_guards(c, "fk-vs-pde");
  CHECK(mentions(r.violations, "dt <= h^2/4"));
  CHECK(mentions(r.violations, "required dt <="));

  c = Config();
  c.set("renorm-fit", "eps", "0.1, 0.05");
  CHECK(mentions(check_guards(c, "renorm-fit").violations, "three strictly decreasing"));
}

TEST_CASE("a guard violation stops a run before any work") {
  Config c;
  c.set("renorm-fit", "eps", "0.05, 0.1, 0.025");
  CHECK_THROWS_AS(run_experiment("renorm-fit", c), ConfigurationError);
  CHECK_THROWS_AS(run_experiment("no-such-study", c), InvalidParameter);
}

TEST_CASE("a study produces records, CSV tables and a summary embedding the config") {
  Config c;
  c.set("renorm-fit", "t_grid", "0.05, 0.1, 0.2");
  const RunResult r = run_experiment("renorm-fit", c);
  CHECK(r.config_hash == c.hash());
  CHECK(r.record("renorm_mu2").pass);
  CHECK(r.csv.count("renorm_ledger.csv") == 1);
  CHECK(r.csv.at("renorm_ledger.csv").rfind("eps,t,C_eps,m_eps,r_eps,mu1,mu2\n", 0) == 0);
  const std::string json = r.summary_json(c);
  CHECK(json.find("\"config_hash\": \"" + c.hash() + "\"") != std::string::npos);
  CHECK(json.find("\"t_grid\": \"0.05, 0.1, 0.2\"") != std::string::npos);
  CHECK(json.find("\"wall_time\"") != std::string::npos);
  for (const auto& [name, body] : r.csv) CHECK(body.find("wall") == std::string::npos);
}

TEST_CASE("CSV outputs do not depend on the thread count") {
  Config c;
  c.set("polymer-density", "paths", "600");
  c.set("polymer-density", "unit_paths", "600");
  c.set("polymer-density", "grid_cells", "60");
  const unsigned before = thread_count();
  set_thread_count(1);
  const RunResult one = run_experiment("polymer-density", c);
  set_thread_count(3);
  const RunResult three = run_experiment("polymer-density", c);
  set_thread_count(before);
  CHECK(one.csv == three.csv);
}
