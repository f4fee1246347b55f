#include "delreg/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

namespace delreg {

using nlohmann::ordered_json;

const char* tool_name() { return "delreg"; }
const char* tool_version() { return "0.1.0"; }

double snap12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

namespace {

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void reject_unknown(const ordered_json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + join_path(path, it.key()) + "'");
  }
}

const ordered_json& object_at(const ordered_json& j, const std::string& path,
                              const std::string& key) {
  if (!j.contains(key))
    throw ConfigError("missing field '" + join_path(path, key) + "'");
  const ordered_json& v = j.at(key);
  if (!v.is_object())
    throw ConfigError("field '" + join_path(path, key) + "' must be an object");
  return v;
}

double num_field(const ordered_json& j, const std::string& path,
                 const std::string& key) {
  if (!j.contains(key))
    throw ConfigError("missing field '" + join_path(path, key) + "'");
  const ordered_json& v = j.at(key);
  if (!v.is_number())
    throw ConfigError("field '" + join_path(path, key) + "' must be a number");
  return snap12(v.get<double>());
}

double num_field_or(const ordered_json& j, const std::string& path,
                    const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  return num_field(j, path, key);
}

long int_field_or(const ordered_json& j, const std::string& path,
                  const std::string& key, long fallback) {
  if (!j.contains(key)) return fallback;
  const ordered_json& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError("field '" + join_path(path, key) + "' must be an integer");
  return v.get<long>();
}

std::string string_field(const ordered_json& j, const std::string& path,
                         const std::string& key) {
  if (!j.contains(key))
    throw ConfigError("missing field '" + join_path(path, key) + "'");
  const ordered_json& v = j.at(key);
  if (!v.is_string())
    throw ConfigError("field '" + join_path(path, key) + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> num_array(const ordered_json& j, const std::string& path,
                              const std::string& key) {
  if (!j.contains(key))
    throw ConfigError("missing field '" + join_path(path, key) + "'");
  const ordered_json& v = j.at(key);
  if (!v.is_array())
    throw ConfigError("field '" + join_path(path, key) + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError("field '" + join_path(path, key) +
                        "' must contain only numbers");
    out.push_back(snap12(e.get<double>()));
  }
  return out;
}

PreferencePair parse_prefs(const ordered_json& j, const std::string& path) {
  std::string kind = string_field(j, path, "kind");
  if (kind == "quadratic") {
    reject_unknown(j, path, {"kind", "R", "y_w", "y_f"});
    double R = num_field(j, path, "R");
    double y_w = num_field_or(j, path, "y_w", 0.0);
    double y_f = num_field_or(j, path, "y_f", 0.0);
    return PreferencePair::quadratic(R, y_w, y_f);
  }
  if (kind == "tabulated") {
    reject_unknown(j, path, {"kind", "q_grid", "theta_grid", "u_w", "u_f", "R"});
    TabulatedPrefs t;
    t.q_grid = num_array(j, path, "q_grid");
    t.theta_grid = num_array(j, path, "theta_grid");
    for (const char* key : {"u_w", "u_f"}) {
      if (!j.contains(key))
        throw ConfigError("missing field '" + join_path(path, key) + "'");
      const ordered_json& rows = j.at(key);
      if (!rows.is_array())
        throw ConfigError("field '" + join_path(path, key) +
                          "' must be an array of arrays");
      std::vector<std::vector<double>> table;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const ordered_json& row = rows.at(r);
        if (!row.is_array())
          throw ConfigError("field '" + join_path(path, key) +
                            "' must be an array of arrays");
        std::vector<double> vals;
        for (const auto& e : row) {
          if (!e.is_number())
            throw ConfigError("field '" + join_path(path, key) +
                              "' must contain only numbers");
          vals.push_back(snap12(e.get<double>()));
        }
        table.push_back(std::move(vals));
      }
      (std::string(key) == "u_w" ? t.u_w : t.u_f) = std::move(table);
    }
    t.R = num_field_or(j, path, "R", 1.0);
    try {
      return PreferencePair::tabulated(std::move(t));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  throw ConfigError("field '" + join_path(path, "kind") +
                    "' must be 'quadratic' or 'tabulated'");
}

WelfareParams parse_welfare(const ordered_json& j, const std::string& path) {
  reject_unknown(j, path, {"beta", "gamma", "alpha", "externality"});
  WelfareParams w;
  w.beta = num_field_or(j, path, "beta", 0.0);
  w.gamma = num_field_or(j, path, "gamma", 0.0);
  w.alpha = num_field_or(j, path, "alpha", 0.5);
  if (w.beta < 0.0)
    throw ConfigError("field '" + join_path(path, "beta") +
                      "' must be nonnegative");
  if (!(w.alpha > 0.0 && w.alpha < 1.0))
    throw ConfigError("field '" + join_path(path, "alpha") +
                      "' must lie strictly between 0 and 1");
  if (j.contains("externality")) {
    const ordered_json& e = object_at(j, path, "externality");
    std::string epath = join_path(path, "externality");
    reject_unknown(e, epath, {"q", "value"});
    w.externality = WelfareParams::Externality::Tabulated;
    w.ext_q = num_array(e, epath, "q");
    w.ext_value = num_array(e, epath, "value");
    if (w.ext_q.size() != w.ext_value.size() || w.ext_q.size() < 2)
      throw ConfigError("field '" + epath +
                        "' needs matching q/value arrays with >= 2 nodes");
  }
  return w;
}

Prior parse_prior(const ordered_json& j, const std::string& path) {
  std::string family = string_field(j, path, "family");
  try {
    if (family == "uniform01") {
      reject_unknown(j, path, {"family"});
      return Prior::uniform01();
    }
    if (family == "power") {
      reject_unknown(j, path, {"family", "k"});
      return Prior::power(num_field(j, path, "k"));
    }
    if (family == "tabulated") {
      reject_unknown(j, path, {"family", "theta", "cdf"});
      return Prior::tabulated(num_array(j, path, "theta"),
                              num_array(j, path, "cdf"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError("field '" + join_path(path, "family") +
                    "' must be 'uniform01', 'power' or 'tabulated'");
}

Policy parse_policy(const ordered_json& j, const std::string& path) {
  reject_unknown(j, path, {"q_min", "q_max", "q_d", "c_d"});
  Policy p;
  p.q_min = num_field(j, path, "q_min");
  p.q_max = num_field(j, path, "q_max");
  p.q_d = num_field(j, path, "q_d");
  p.c_d = num_field(j, path, "c_d");
  return p;
}

ordered_json prefs_json(const PreferencePair& p) {
  ordered_json j;
  if (p.kind == PreferencePair::Kind::Quadratic) {
    j["kind"] = "quadratic";
    j["R"] = p.quad.R;
    j["y_w"] = p.quad.y_w;
    j["y_f"] = p.quad.y_f;
  } else {
    j["kind"] = "tabulated";
    j["q_grid"] = p.tab.q_grid;
    j["theta_grid"] = p.tab.theta_grid;
    j["u_w"] = p.tab.u_w;
    j["u_f"] = p.tab.u_f;
    j["R"] = p.tab.R;
  }
  return j;
}

ordered_json prior_json(const Prior& p) {
  ordered_json j;
  switch (p.family) {
    case Prior::Family::Uniform01:
      j["family"] = "uniform01";
      break;
    case Prior::Family::Power:
      j["family"] = "power";
      j["k"] = p.power_k;
      break;
    case Prior::Family::Tabulated:
      j["family"] = "tabulated";
      j["theta"] = p.grid;
      j["cdf"] = p.cdf_values;
      break;
  }
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(j, "",
                 {"preferences", "welfare", "delta", "prior", "policy", "theta",
                  "states", "sweep", "prior_hi", "oracle", "out", "seed"});

  RunConfig cfg;
  cfg.prefs = parse_prefs(object_at(j, "", "preferences"), "preferences");

  if (j.contains("welfare")) {
    cfg.welfare = parse_welfare(object_at(j, "", "welfare"), "welfare");
    cfg.has_welfare = true;
  }
  if (j.contains("delta")) {
    cfg.delta = num_field(j, "", "delta");
    if (!(cfg.delta >= 0.0 && cfg.delta <= 1.0))
      throw ConfigError("delta out of range");
    cfg.has_delta = true;
  }
  if (j.contains("prior")) {
    cfg.prior = parse_prior(object_at(j, "", "prior"), "prior");
    cfg.has_prior = true;
  }
  if (j.contains("policy")) {
    cfg.policy = parse_policy(object_at(j, "", "policy"), "policy");
    cfg.has_policy = true;
  }
  if (j.contains("theta")) {
    cfg.theta = num_field(j, "", "theta");
    cfg.has_theta = true;
  }
  if (j.contains("states")) {
    cfg.states = num_array(j, "", "states");
    if (cfg.states.size() < 2)
      throw ConfigError("field 'states' needs at least 2 entries");
    cfg.has_states = true;
  }
  if (j.contains("sweep")) {
    const ordered_json& s = object_at(j, "", "sweep");
    reject_unknown(s, "sweep", {"axis", "grid"});
    cfg.sweep.axis = string_field(s, "sweep", "axis");
    if (cfg.sweep.axis != "beta" && cfg.sweep.axis != "gamma" &&
        cfg.sweep.axis != "delta" && cfg.sweep.axis != "prior")
      throw ConfigError("field 'sweep.axis' must be beta, gamma, delta or prior");
    if (s.contains("grid")) cfg.sweep.grid = num_array(s, "sweep", "grid");
    cfg.has_sweep = true;
  }
  if (j.contains("prior_hi")) {
    cfg.prior_hi = parse_prior(object_at(j, "", "prior_hi"), "prior_hi");
    cfg.has_prior_hi = true;
  }
  if (j.contains("oracle")) {
    const ordered_json& o = object_at(j, "", "oracle");
    reject_unknown(o, "oracle",
                   {"op", "q_points", "c_points", "resolution", "samples"});
    cfg.oracle.op = string_field(o, "oracle", "op");
    if (cfg.oracle.op != "bargain" && cfg.oracle.op != "policy-search" &&
        cfg.oracle.op != "mc")
      throw ConfigError("field 'oracle.op' must be bargain, policy-search or mc");
    cfg.oracle.q_points =
        static_cast<int>(int_field_or(o, "oracle", "q_points", 201));
    cfg.oracle.c_points =
        static_cast<int>(int_field_or(o, "oracle", "c_points", 201));
    cfg.oracle.resolution =
        static_cast<int>(int_field_or(o, "oracle", "resolution", 21));
    cfg.oracle.samples = int_field_or(o, "oracle", "samples", 10000);
    if (cfg.oracle.q_points < 2 || cfg.oracle.c_points < 2)
      throw ConfigError("field 'oracle.q_points'/'oracle.c_points' must be >= 2");
    if (cfg.oracle.resolution < 2 || cfg.oracle.resolution > 41)
      throw ConfigError("field 'oracle.resolution' must lie in [2, 41]");
    if (cfg.oracle.samples < 1)
      throw ConfigError("field 'oracle.samples' must be positive");
    cfg.has_oracle = true;
  }
  if (j.contains("out")) {
    cfg.out_path = string_field(j, "", "out");
    cfg.has_out = true;
  }
  if (j.contains("seed")) {
    const ordered_json& v = j.at("seed");
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw ConfigError("field 'seed' must be a nonnegative integer");
    if (v.is_number_integer() && v.get<long long>() < 0)
      throw ConfigError("field 'seed' must be a nonnegative integer");
    cfg.seed = v.get<std::uint64_t>();
    cfg.has_seed = true;
  }
  return cfg;
}

ordered_json resolved_config(const RunConfig& cfg) {
  ordered_json j;
  j["preferences"] = prefs_json(cfg.prefs);
  if (cfg.has_welfare) {
    ordered_json w;
    w["beta"] = cfg.welfare.beta;
    w["gamma"] = cfg.welfare.gamma;
    w["alpha"] = cfg.welfare.alpha;
    if (cfg.welfare.externality == WelfareParams::Externality::Tabulated) {
      w["externality"] = {{"q", cfg.welfare.ext_q},
                          {"value", cfg.welfare.ext_value}};
    }
    j["welfare"] = std::move(w);
  }
  if (cfg.has_delta) j["delta"] = cfg.delta;
  if (cfg.has_prior) j["prior"] = prior_json(cfg.prior);
  if (cfg.has_policy) {
    j["policy"] = {{"q_min", cfg.policy.q_min},
                   {"q_max", cfg.policy.q_max},
                   {"q_d", cfg.policy.q_d},
                   {"c_d", cfg.policy.c_d}};
  }
  if (cfg.has_theta) j["theta"] = cfg.theta;
  if (cfg.has_states) j["states"] = cfg.states;
  if (cfg.has_sweep) {
    ordered_json s;
    s["axis"] = cfg.sweep.axis;
    if (!cfg.sweep.grid.empty()) s["grid"] = cfg.sweep.grid;
    j["sweep"] = std::move(s);
  }
  if (cfg.has_prior_hi) j["prior_hi"] = prior_json(cfg.prior_hi);
  if (cfg.has_oracle) {
    ordered_json o;
    o["op"] = cfg.oracle.op;
    if (cfg.oracle.op == "bargain") {
      o["q_points"] = cfg.oracle.q_points;
      o["c_points"] = cfg.oracle.c_points;
    } else if (cfg.oracle.op == "policy-search") {
      o["resolution"] = cfg.oracle.resolution;
    } else {
      o["samples"] = cfg.oracle.samples;
    }
    j["oracle"] = std::move(o);
  }
  if (cfg.has_out) j["out"] = cfg.out_path;
  if (cfg.has_seed) j["seed"] = cfg.seed;
  return j;
}

namespace {

void emit(const ordered_json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += ordered_json(it.key()).dump();
        out += ": ";
        emit(it.value(), out, indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        emit(e, out, indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      double x = j.get<double>();
      if (!std::isfinite(x))
        throw std::logic_error("cannot emit non-finite number");
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", x);
      out += buf;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json12(const ordered_json& j, int indent) {
  std::string out;
  emit(j, out, indent, 0);
  return out;
}

}  // namespace delreg
