#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "delreg/bargaining.hpp"
#include "delreg/config.hpp"
#include "delreg/implementability.hpp"
#include "delreg/oracle.hpp"
#include "delreg/policy_solver.hpp"
#include "delreg/statics.hpp"
#include "delreg/welfare.hpp"

using namespace delreg;
using nlohmann::ordered_json;

namespace {

void require_block(bool present, const char* path) {
  if (!present) throw ConfigError(std::string("missing field '") + path + "'");
}

ordered_json contract_json(const Contract& c) {
  return {{"q", c.q}, {"c", c.c}, {"theta", c.theta}};
}

ordered_json policy_json(const Policy& p) {
  return {{"q_min", p.q_min}, {"q_max", p.q_max}, {"q_d", p.q_d}, {"c_d", p.c_d}};
}

ordered_json replay_json(const std::vector<Contract>& replay) {
  ordered_json arr = ordered_json::array();
  for (const Contract& c : replay) arr.push_back(contract_json(c));
  return arr;
}

ordered_json cmd_bargain(const RunConfig& cfg) {
  require_block(cfg.has_delta, "delta");
  require_block(cfg.has_policy, "policy");
  require_block(cfg.has_theta, "theta");
  BargainOutcome out = bargain(cfg.prefs, cfg.delta, cfg.policy, cfg.theta);
  return {{"contract", contract_json(out.contract)},
          {"gains_w", out.gains_w},
          {"gains_f", out.gains_f}};
}

ordered_json cmd_first_best(const RunConfig& cfg) {
  require_block(cfg.has_theta, "theta");
  FirstBest fb = first_best(cfg.prefs, cfg.welfare, cfg.theta);
  return {{"contract", contract_json(fb.contract)},
          {"c_indeterminate", fb.c_indeterminate}};
}

ordered_json cmd_eval(const RunConfig& cfg) {
  require_block(cfg.has_delta, "delta");
  require_block(cfg.has_prior, "prior");
  require_block(cfg.has_policy, "policy");
  auto violations = validate_policy(cfg.policy);
  if (!violations.empty())
    throw ConfigError("invalid policy: " + violations.front());
  double v = expected_swf(cfg.prefs, cfg.welfare, cfg.policy, cfg.prior, cfg.delta);
  return {{"expected_swf", v}};
}

ordered_json solve_report_json(const SolveReport& rep) {
  ordered_json res;
  res["policy"] = policy_json(rep.policy);
  res["expected_welfare"] = rep.expected_welfare;
  res["branch"] = to_string(rep.branch);
  res["foc_residuals"] = rep.foc_residuals;
  res["notes"] = rep.notes;
  return res;
}

ordered_json cmd_solve(const RunConfig& cfg) {
  require_block(cfg.has_delta, "delta");
  require_block(cfg.has_prior, "prior");
  return solve_report_json(solve(cfg.prefs, cfg.welfare, cfg.delta, cfg.prior));
}

ordered_json cmd_check_dd(const RunConfig& cfg) {
  require_block(cfg.has_delta, "delta");
  require_block(cfg.has_states, "states");
  StateSpace states = StateSpace::finite(cfg.states);
  MultiStateReport rep =
      check_multi_state(cfg.prefs, cfg.welfare, cfg.delta, states);
  ordered_json res;
  res["feasible"] = rep.feasible;
  res["q_d"] = rep.q_d;
  res["c_d"] = rep.c_d;
  res["residual_gap"] = rep.residual_gap;
  res["gamma_ok"] = rep.gamma_ok;
  res["violated_pair"] = {rep.violated_pair.first, rep.violated_pair.second};
  res["message"] = rep.message;
  res["replay"] = replay_json(rep.replay);
  return res;
}

ordered_json cmd_maxmin(const RunConfig& cfg) {
  require_block(cfg.has_delta, "delta");
  require_block(cfg.has_states, "states");
  StateSpace states = StateSpace::finite(cfg.states);
  MaxminReport rep = maxmin_construct(cfg.prefs, cfg.welfare, cfg.delta, states);
  ordered_json res;
  res["feasible"] = rep.feasible;
  res["theta_k"] = rep.theta_k;
  res["rest"] = rep.rest;
  res["q_mk"] = rep.q_mk;
  res["c_mk"] = rep.c_mk;
  res["q_d"] = rep.q_d;
  res["c_d"] = rep.c_d;
  res["equilibrium"] = rep.deviations.equilibrium;
  res["min_slack"] = rep.deviations.min_slack;
  res["message"] = rep.message;
  res["replay"] = replay_json(rep.replay);
  return res;
}

SweepTable run_sweep(const RunConfig& cfg) {
  require_block(cfg.has_delta, "delta");
  require_block(cfg.has_prior, "prior");
  require_block(cfg.has_sweep, "sweep");
  std::vector<double> grid = cfg.sweep.grid;
  if (grid.empty()) {
    if (cfg.sweep.axis == "beta")
      grid = default_beta_grid();
    else if (cfg.sweep.axis == "gamma")
      grid = default_gamma_grid();
    else
      throw ConfigError("missing field 'sweep.grid'");
  }
  return sweep(cfg.prefs, cfg.welfare, cfg.delta, cfg.prior, cfg.sweep.axis,
               grid);
}

ordered_json sweep_json(const SweepTable& table) {
  ordered_json rows = ordered_json::array();
  for (const SweepRow& r : table.rows) {
    ordered_json row;
    row["value"] = r.value;
    row["policy"] = policy_json(r.policy);
    row["welfare"] = r.welfare;
    row["branch"] = to_string(r.branch);
    row["failed"] = r.failed;
    row["message"] = r.message;
    rows.push_back(std::move(row));
  }
  return {{"axis", table.axis}, {"rows", rows}};
}

ordered_json cmd_compare_fosd(const RunConfig& cfg) {
  require_block(cfg.has_prior, "prior");
  require_block(cfg.has_prior_hi, "prior_hi");
  FosdReport rep =
      compare_fosd(cfg.prefs, cfg.welfare, cfg.prior, cfg.prior_hi);
  ordered_json res;
  res["fosd_ok"] = rep.fosd_ok;
  res["failing_theta"] = rep.failing_theta;
  res["degenerate"] = rep.degenerate;
  res["ordering_ok"] = rep.ordering_ok;
  res["lo"] = policy_json(rep.lo);
  res["hi"] = policy_json(rep.hi);
  res["welfare_lo"] = rep.welfare_lo;
  res["welfare_hi"] = rep.welfare_hi;
  res["message"] = rep.message;
  return res;
}

ordered_json cmd_oracle(const RunConfig& cfg) {
  require_block(cfg.has_oracle, "oracle");
  ordered_json res;
  if (cfg.oracle.op == "bargain") {
    require_block(cfg.has_delta, "delta");
    require_block(cfg.has_policy, "policy");
    require_block(cfg.has_theta, "theta");
    Contract got = grid_bargain(cfg.prefs, cfg.delta, cfg.policy, cfg.theta,
                                cfg.oracle.q_points, cfg.oracle.c_points);
    Contract exact = bargain(cfg.prefs, cfg.delta, cfg.policy, cfg.theta).contract;
    double step_q =
        (cfg.policy.q_max - cfg.policy.q_min) / (cfg.oracle.q_points - 1);
    res["method"] = "grid_bargain";
    res["resolution"] = step_q;
    res["best"] = contract_json(got);
    res["objective"] = nash_product(cfg.prefs, cfg.delta, got.q, got.c,
                                    cfg.policy.q_d, cfg.policy.c_d, cfg.theta);
    res["analytic"] = contract_json(exact);
    res["discrepancy"] =
        std::max(std::fabs(got.q - exact.q), std::fabs(got.c - exact.c));
  } else if (cfg.oracle.op == "policy-search") {
    require_block(cfg.has_delta, "delta");
    require_block(cfg.has_prior, "prior");
    Policy got = grid_policy_search(cfg.prefs, cfg.welfare, cfg.delta,
                                    cfg.prior, cfg.oracle.resolution);
    SolveReport rep = solve(cfg.prefs, cfg.welfare, cfg.delta, cfg.prior);
    double step = (cfg.prior.support_max() - cfg.prior.support_min()) / 2.0 /
                  (cfg.oracle.resolution - 1);
    res["method"] = "grid_policy_search";
    res["resolution"] = step;
    res["best"] = policy_json(got);
    res["objective"] =
        expected_swf(cfg.prefs, cfg.welfare, got, cfg.prior, cfg.delta);
    res["analytic"] = policy_json(rep.policy);
    res["discrepancy"] = rep.expected_welfare - res["objective"].get<double>();
  } else {
    require_block(cfg.has_delta, "delta");
    require_block(cfg.has_prior, "prior");
    require_block(cfg.has_policy, "policy");
    McResult mc = mc_expected_swf(cfg.prefs, cfg.welfare, cfg.delta, cfg.policy,
                                  cfg.prior, cfg.oracle.samples, cfg.seed);
    double quad =
        expected_swf(cfg.prefs, cfg.welfare, cfg.policy, cfg.prior, cfg.delta);
    res["method"] = "mc_expected_swf";
    res["resolution"] = static_cast<double>(cfg.oracle.samples);
    res["mean"] = mc.mean;
    res["std_error"] = mc.std_error;
    res["analytic"] = quad;
    res["discrepancy"] = std::fabs(mc.mean - quad);
  }
  return res;
}

int write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.has_out) {
    std::ofstream f(cfg.out_path);
    if (!f) {
      std::cerr << "config error: cannot write '" << cfg.out_path << "'\n";
      return 2;
    }
    f << text;
    return 0;
  }
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delegation-with-defaults toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"bargain", "renegotiate one state from the policy default"},
      {"first-best", "per-state welfare-maximizing contract"},
      {"eval", "expected welfare of a given policy"},
      {"solve", "optimal delegation policy for the welfare program"},
      {"check-dd", "first-best implementability certificate on finite states"},
      {"maxmin", "worst-case-state construction on finite states"},
      {"sweep", "comparative statics along one parameter axis"},
      {"compare-fosd", "aligned optima under a dominated vs dominating prior"},
      {"oracle", "brute-force verification of one operation"},
  };
  for (const auto& [name, desc] : cmds) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "path to a JSON config")
        ->required();
    sub->add_option("--out", out_path, "write output here instead of stdout");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--format", format, "json or csv (csv: sweep only)")
        ->check(CLI::IsMember({"json", "csv"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  std::string cmd = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    std::ifstream f(config_path);
    if (!f) throw ConfigError("cannot read config file '" + config_path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    cfg = parse_config(buf.str());
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (app.get_subcommands().front()->count("--seed") > 0) {
    cfg.seed = seed;
    cfg.has_seed = true;
  }
  if (!out_path.empty()) {
    cfg.out_path = out_path;
    cfg.has_out = true;
  }
  if (format == "csv" && cmd != "sweep") {
    std::cerr << "config error: format csv is only available for sweep\n";
    return 2;
  }

  ordered_json envelope;
  envelope["tool"] = {{"name", tool_name()}, {"version", tool_version()}};
  envelope["config"] = resolved_config(cfg);

  try {
    std::string text;
    if (cmd == "sweep" && format != "json") {
      text = to_csv(run_sweep(cfg));
    } else {
      ordered_json result;
      if (cmd == "bargain")
        result = cmd_bargain(cfg);
      else if (cmd == "first-best")
        result = cmd_first_best(cfg);
      else if (cmd == "eval")
        result = cmd_eval(cfg);
      else if (cmd == "solve")
        result = cmd_solve(cfg);
      else if (cmd == "check-dd")
        result = cmd_check_dd(cfg);
      else if (cmd == "maxmin")
        result = cmd_maxmin(cfg);
      else if (cmd == "sweep")
        result = sweep_json(run_sweep(cfg));
      else if (cmd == "compare-fosd")
        result = cmd_compare_fosd(cfg);
      else
        result = cmd_oracle(cfg);
      envelope["result"] = std::move(result);
      text = dump_json12(envelope) + "\n";
    }
    return write_output(cfg, text);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    envelope["error"] = {{"type", "solver"}, {"message", e.what()}};
    std::cout << dump_json12(envelope) << "\n";
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
}
