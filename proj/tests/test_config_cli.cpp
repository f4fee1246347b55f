#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "delreg/config.hpp"

using namespace delreg;
using nlohmann::ordered_json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;  // stdout and stderr merged
};

std::string temp_dir() {
  static std::string dir = [] {
    auto d = std::filesystem::temp_directory_path() / "delreg_cli_test";
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir;
}

std::string write_temp(const std::string& text, const char* ext = ".json") {
  static int counter = 0;
  std::string path = temp_dir() + "/cfg" + std::to_string(counter++) + ext;
  std::ofstream f(path);
  f << text;
  return path;
}

CliRun run_cli(const std::string& args) {
  std::string cmd = std::string(DELREG_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliRun r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

CliRun run_with_config(const std::string& sub, const ordered_json& cfg,
                       const std::string& extra = "") {
  std::string path = write_temp(cfg.dump());
  return run_cli(sub + " --config " + path + (extra.empty() ? "" : " " + extra));
}

ordered_json base_config() {
  ordered_json j;
  j["preferences"] = {{"kind", "quadratic"}, {"R", 1.0}};
  return j;
}

ordered_json parse_out(const std::string& text) {
  return ordered_json::parse(text);
}

}  // namespace

TEST_CASE("config parses and round-trips through emission") {
  ordered_json j = base_config();
  j["welfare"] = {{"beta", 1.0}, {"gamma", 0.2}};
  j["delta"] = 0.5;
  j["prior"] = {{"family", "power"}, {"k", 2.0}};
  j["policy"] = {{"q_min", 0.0}, {"q_max", 0.5}, {"q_d", 0.375}, {"c_d", 0.515625}};
  j["theta"] = 0.75;
  j["seed"] = 42;

  RunConfig cfg = parse_config(j.dump());
  CHECK(cfg.prefs.kind == PreferencePair::Kind::Quadratic);
  CHECK(cfg.prefs.quad.R == 1.0);
  CHECK(cfg.welfare.beta == 1.0);
  CHECK(cfg.welfare.alpha == 0.5);  // default materialized
  CHECK(cfg.delta == 0.5);
  CHECK(cfg.prior.family == Prior::Family::Power);
  CHECK(cfg.policy.q_d == 0.375);
  CHECK(cfg.theta == 0.75);
  CHECK(cfg.seed == 42);
  CHECK(cfg.has_seed);
  CHECK(!cfg.has_sweep);

  ordered_json resolved = resolved_config(cfg);
  std::string emitted = dump_json12(resolved);
  RunConfig cfg2 = parse_config(emitted);
  CHECK(resolved_config(cfg2) == resolved);
  CHECK(cfg2.policy.c_d == cfg.policy.c_d);
  CHECK(cfg2.welfare.gamma == cfg.welfare.gamma);
}

TEST_CASE("unknown keys are rejected with their path") {
  ordered_json j = base_config();
  j["betaa"] = 1.0;
  CHECK_THROWS_WITH_AS((void)parse_config(j.dump()), "unknown key 'betaa'",
                       ConfigError);

  ordered_json k = base_config();
  k["welfare"] = {{"beta", 1.0}, {"beta2", 2.0}};
  CHECK_THROWS_WITH_AS((void)parse_config(k.dump()),
                       "unknown key 'welfare.beta2'", ConfigError);

  ordered_json p = base_config();
  p["preferences"]["foo"] = 1;
  CHECK_THROWS_WITH_AS((void)parse_config(p.dump()),
                       "unknown key 'preferences.foo'", ConfigError);
}

TEST_CASE("missing and ill-typed fields name the offending path") {
  CHECK_THROWS_WITH_AS((void)parse_config("{}"),
                       "missing field 'preferences'", ConfigError);

  ordered_json j = base_config();
  j["policy"] = {{"q_min", 0.0}, {"q_max", 0.5}, {"q_d", 0.25}};
  CHECK_THROWS_WITH_AS((void)parse_config(j.dump()),
                       "missing field 'policy.c_d'", ConfigError);

  ordered_json t = base_config();
  t["theta"] = "one";
  CHECK_THROWS_WITH_AS((void)parse_config(t.dump()),
                       "field 'theta' must be a number", ConfigError);

  CHECK_THROWS_AS((void)parse_config("not json"), ConfigError);
}

TEST_CASE("range validation matches the documented messages") {
  ordered_json j = base_config();
  j["delta"] = 1.5;
  CHECK_THROWS_WITH_AS((void)parse_config(j.dump()), "delta out of range",
                       ConfigError);
  j["delta"] = -0.2;
  CHECK_THROWS_WITH_AS((void)parse_config(j.dump()), "delta out of range",
                       ConfigError);

  ordered_json w = base_config();
  w["welfare"] = {{"beta", -1.0}};
  CHECK_THROWS_AS((void)parse_config(w.dump()), ConfigError);
  w["welfare"] = {{"alpha", 1.0}};
  CHECK_THROWS_AS((void)parse_config(w.dump()), ConfigError);

  ordered_json o = base_config();
  o["oracle"] = {{"op", "policy-search"}, {"resolution", 50}};
  CHECK_THROWS_AS((void)parse_config(o.dump()), ConfigError);
  o["oracle"] = {{"op", "grid"}};
  CHECK_THROWS_AS((void)parse_config(o.dump()), ConfigError);

  ordered_json pr = base_config();
  pr["prior"] = {{"family", "tabulated"},
                 {"theta", {0.0, 1.0}},
                 {"cdf", {0.0, 0.5}}};
  try {
    (void)parse_config(pr.dump());
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("prior") != std::string::npos);
  }
}

TEST_CASE("numbers snap to twelve significant digits at parse time") {
  CHECK(snap12(0.515625) == 0.515625);
  CHECK(snap12(1.0 / 3.0) == 0.333333333333);
  ordered_json j = base_config();
  j["theta"] = 0.12345678901234567;
  RunConfig cfg = parse_config(j.dump());
  CHECK(cfg.theta == 0.123456789012);

  ordered_json v;
  v["x"] = 1.0 / 3.0;
  std::string s = dump_json12(v, 0);
  CHECK(s.find("0.333333333333") != std::string::npos);
  CHECK(s.find("3333333333333") == std::string::npos);
}

TEST_CASE("cli bargain renegotiates the firm-control default") {
  ordered_json j = base_config();
  j["delta"] = 0.0;
  j["policy"] = {{"q_min", 0.0}, {"q_max", 1.0}, {"q_d", 0.375}, {"c_d", 0.0}};
  j["theta"] = 1.0;
  CliRun r = run_with_config("bargain", j);
  REQUIRE(r.code == 0);
  ordered_json out = parse_out(r.out);
  CHECK(out["tool"]["name"] == "delreg");
  CHECK(out["tool"]["version"].get<std::string>().size() > 0);
  CHECK(out["result"]["contract"]["q"].get<double>() == doctest::Approx(0.5));
  CHECK(out["result"]["contract"]["c"].get<double>() ==
        doctest::Approx(-0.140625));
  CHECK(out["result"]["gains_w"].get<double>() == doctest::Approx(0.0));

  // the embedded config re-parses to an identical resolved config
  RunConfig echoed = parse_config(out["config"].dump());
  CHECK(resolved_config(echoed) == out["config"]);
}

TEST_CASE("cli reports config errors with field paths and exit 2") {
  ordered_json j = base_config();
  j["delta"] = 0.0;
  j["policy"] = {{"q_min", 0.0}, {"q_max", 1.0}, {"q_d", 0.375}, {"c_d", 0.0}};
  CliRun r = run_with_config("bargain", j);
  CHECK(r.code == 2);
  CHECK(r.out.find("missing field 'theta'") != std::string::npos);

  j["theta"] = 1.0;
  j["delta"] = 1.5;
  CliRun r2 = run_with_config("bargain", j);
  CHECK(r2.code == 2);
  CHECK(r2.out.find("delta out of range") != std::string::npos);

  CliRun r3 = run_cli("bargain --config /nonexistent/cfg.json");
  CHECK(r3.code == 2);
  CHECK(r3.out.find("config error") != std::string::npos);
}

TEST_CASE("cli solve returns the aligned closed form") {
  ordered_json j = base_config();
  j["welfare"] = {{"beta", 1.0}, {"gamma", 0.2}};
  j["delta"] = 0.5;
  j["prior"] = {{"family", "uniform01"}};
  CliRun r = run_with_config("solve", j);
  REQUIRE(r.code == 0);
  ordered_json out = parse_out(r.out);
  const auto& pol = out["result"]["policy"];
  CHECK(pol["q_min"].get<double>() == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(pol["q_max"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(pol["q_d"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(pol["c_d"].get<double>() ==
        doctest::Approx(0.5 - 1.0 / 12.0).epsilon(1e-9));
  CHECK(out["result"]["branch"] == "closed_form_aligned");
  CHECK(out["result"]["foc_residuals"].size() == 4);
}

TEST_CASE("cli first-best and eval wrap the welfare module") {
  ordered_json j = base_config();
  j["welfare"] = {{"beta", 1.0}};
  j["theta"] = 0.6;
  CliRun r = run_with_config("first-best", j);
  REQUIRE(r.code == 0);
  ordered_json out = parse_out(r.out);
  CHECK(out["result"]["contract"]["q"].get<double>() == doctest::Approx(0.3));
  CHECK(out["result"]["contract"]["c"].get<double>() == doctest::Approx(0.5));
  CHECK(out["result"]["c_indeterminate"] == false);

  ordered_json e = base_config();
  e["welfare"] = {{"beta", 1.0}};
  e["delta"] = 0.5;
  e["prior"] = {{"family", "uniform01"}};
  e["policy"] = {{"q_min", 0.0}, {"q_max", 0.5}, {"q_d", 0.5},
                 {"c_d", 0.5 - 1.0 / 12.0}};
  CliRun re = run_with_config("eval", e);
  REQUIRE(re.code == 0);
  double v = parse_out(re.out)["result"]["expected_swf"].get<double>();
  CHECK(v == doctest::Approx(1.0 - 1.0 / 6.0 - 1.0 / 180.0).epsilon(1e-9));

  e["policy"] = {{"q_min", 0.3}, {"q_max", 0.5}, {"q_d", 0.2}, {"c_d", 0.0}};
  CliRun rb = run_with_config("eval", e);
  CHECK(rb.code == 2);
  CHECK(rb.out.find("invalid policy") != std::string::npos);
}

TEST_CASE("cli check-dd certifies the two-state construction") {
  ordered_json j = base_config();
  j["welfare"] = {{"beta", 1.0}};
  j["delta"] = 0.0;
  j["states"] = {0.0, 1.0};
  CliRun r = run_with_config("check-dd", j);
  REQUIRE(r.code == 0);
  ordered_json out = parse_out(r.out);
  CHECK(out["result"]["feasible"] == true);
  CHECK(out["result"]["q_d"].get<double>() == doctest::Approx(0.375).epsilon(1e-7));
  CHECK(out["result"]["replay"].size() == 2);

  // beta = 0 violates the construction's precondition: config error
  j["welfare"] = {{"beta", 0.0}};
  CliRun r0 = run_with_config("check-dd", j);
  CHECK(r0.code == 2);
}

TEST_CASE("cli maxmin reports the worst-state construction") {
  ordered_json j;
  j["preferences"] = {{"kind", "quadratic"}, {"R", 0.0}};
  j["welfare"] = {{"beta", 1.0}};
  j["delta"] = 0.0;
  j["states"] = {0.0, 0.5, 1.0};
  CliRun r = run_with_config("maxmin", j);
  REQUIRE(r.code == 0);
  ordered_json out = parse_out(r.out);
  CHECK(out["result"]["feasible"] == true);
  CHECK(out["result"]["theta_k"].get<double>() == doctest::Approx(1.0));
  CHECK(out["result"]["q_mk"].get<double>() == doctest::Approx(0.125).epsilon(1e-7));
  CHECK(out["result"]["c_mk"].get<double>() ==
        doctest::Approx(0.515625).epsilon(1e-6));
  CHECK(out["result"]["equilibrium"] == true);
}

TEST_CASE("cli sweep emits the exact csv contract") {
  ordered_json j = base_config();
  j["welfare"] = {{"beta", 1.0}};
  j["delta"] = 0.5;
  j["prior"] = {{"family", "uniform01"}};
  j["sweep"] = {{"axis", "gamma"}, {"grid", {0.0, 0.1, 0.2}}};
  CliRun r = run_with_config("sweep", j);
  REQUIRE(r.code == 0);
  std::string header = r.out.substr(0, r.out.find('\n'));
  CHECK(header == "axis,value,q_min,q_max,q_d,c_d,welfare,branch,flag");
  int lines = 0;
  for (char c : r.out)
    if (c == '\n') ++lines;
  CHECK(lines == 4);
  CHECK(r.out.find("gamma,0,") != std::string::npos);

  CliRun rj = run_with_config("sweep", j, "--format json");
  REQUIRE(rj.code == 0);
  ordered_json out = parse_out(rj.out);
  CHECK(out["result"]["axis"] == "gamma");
  CHECK(out["result"]["rows"].size() == 3);
  CHECK(out["result"]["rows"][2]["policy"]["q_min"].get<double>() ==
        doctest::Approx(0.1).epsilon(1e-6));

  // csv is a sweep-only format
  ordered_json s = base_config();
  s["welfare"] = {{"beta", 1.0}};
  s["delta"] = 0.5;
  s["prior"] = {{"family", "uniform01"}};
  CliRun rc = run_with_config("solve", s, "--format csv");
  CHECK(rc.code == 2);

  // delta axis needs an explicit grid
  j["sweep"] = {{"axis", "delta"}};
  CliRun rd = run_with_config("sweep", j);
  CHECK(rd.code == 2);
  CHECK(rd.out.find("sweep.grid") != std::string::npos);
}

TEST_CASE("cli compare-fosd orders dominated and dominating priors") {
  ordered_json j = base_config();
  j["welfare"] = {{"beta", 2.0}, {"gamma", 0.4}};
  j["prior"] = {{"family", "uniform01"}};
  j["prior_hi"] = {{"family", "power"}, {"k", 2.0}};
  CliRun r = run_with_config("compare-fosd", j);
  REQUIRE(r.code == 0);
  ordered_json out = parse_out(r.out);
  CHECK(out["result"]["fosd_ok"] == true);
  CHECK(out["result"]["ordering_ok"] == true);
  CHECK(out["result"]["hi"]["q_d"].get<double>() == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(out["result"]["lo"]["q_d"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("cli oracle subcommands mirror the three verifiers") {
  ordered_json j = base_config();
  j["delta"] = 0.0;
  j["policy"] = {{"q_min", 0.0}, {"q_max", 1.0}, {"q_d", 0.375}, {"c_d", 0.0}};
  j["theta"] = 1.0;
  j["oracle"] = {{"op", "bargain"}, {"q_points", 401}, {"c_points", 401}};
  CliRun r = run_with_config("oracle", j);
  REQUIRE(r.code == 0);
  ordered_json out = parse_out(r.out);
  CHECK(out["result"]["method"] == "grid_bargain");
  CHECK(out["result"]["best"]["q"].get<double>() == doctest::Approx(0.5).epsilon(1e-2));
  CHECK(out["result"]["discrepancy"].get<double>() <= 1.0 / 400.0 + 1e-9);

  ordered_json m = base_config();
  m["welfare"] = {{"beta", 1.0}};
  m["delta"] = 0.5;
  m["prior"] = {{"family", "uniform01"}};
  m["policy"] = {{"q_min", 0.0}, {"q_max", 0.5}, {"q_d", 0.5},
                 {"c_d", 0.5 - 1.0 / 12.0}};
  m["oracle"] = {{"op", "mc"}, {"samples", 20000}};
  CliRun r1 = run_with_config("oracle", m);
  REQUIRE(r1.code == 0);
  ordered_json o1 = parse_out(r1.out);
  double mean1 = o1["result"]["mean"].get<double>();
  double se1 = o1["result"]["std_error"].get<double>();
  CHECK(se1 > 0.0);
  CHECK(o1["result"]["discrepancy"].get<double>() <= 3.0 * se1);

  // deterministic given (config, seed); a different seed moves the estimate
  CliRun r2 = run_with_config("oracle", m);
  CHECK(parse_out(r2.out)["result"]["mean"].get<double>() == mean1);
  CliRun r3 = run_with_config("oracle", m, "--seed 99");
  REQUIRE(r3.code == 0);
  CHECK(parse_out(r3.out)["result"]["mean"].get<double>() != mean1);
}

TEST_CASE("cli writes to --out and keeps stdout quiet") {
  ordered_json j = base_config();
  j["delta"] = 0.0;
  j["policy"] = {{"q_min", 0.0}, {"q_max", 1.0}, {"q_d", 0.375}, {"c_d", 0.0}};
  j["theta"] = 1.0;
  std::string out_path = temp_dir() + "/bargain_out.json";
  CliRun r = run_with_config("bargain", j, "--out " + out_path);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(out_path);
  std::stringstream buf;
  buf << f.rdbuf();
  ordered_json out = parse_out(buf.str());
  CHECK(out["result"]["contract"]["q"].get<double>() == doctest::Approx(0.5));
  CHECK(out["config"]["out"] == out_path);
}

TEST_CASE("cli rejects unknown subcommands and missing flags") {
  CliRun r = run_cli("frobnicate --config /tmp/x.json");
  CHECK(r.code != 0);
  CliRun r2 = run_cli("solve");
  CHECK(r2.code != 0);
  CHECK(r2.out.find("--config") != std::string::npos);
}
