#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "delreg/domain.hpp"
#include "delreg/numeric.hpp"

namespace delreg {

// Raised for malformed or invalid configuration input; the message carries
// the offending field path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepOptions {
  std::string axis;
  std::vector<double> grid;  // empty: use the documented default grid
};

struct OracleOptions {
  std::string op;  // bargain | policy-search | mc
  int q_points = 201;
  int c_points = 201;
  int resolution = 21;
  long samples = 10000;
};

// Parsed, validated run configuration. Block presence is tracked so each
// command can demand exactly the blocks it needs by field path.
struct RunConfig {
  PreferencePair prefs;
  WelfareParams welfare;
  double delta = 0.0;
  Prior prior;
  Policy policy;
  double theta = 0.0;
  std::vector<double> states;
  SweepOptions sweep;
  Prior prior_hi;
  OracleOptions oracle;
  std::string out_path;
  std::uint64_t seed = kDefaultSeed;

  bool has_welfare = false;
  bool has_delta = false;
  bool has_prior = false;
  bool has_policy = false;
  bool has_theta = false;
  bool has_states = false;
  bool has_sweep = false;
  bool has_prior_hi = false;
  bool has_oracle = false;
  bool has_out = false;
  bool has_seed = false;
};

// Parses a JSON config. Unknown keys are rejected with their path; numbers
// are snapped to 12 significant digits so an emitted config re-parses to an
// identical RunConfig.
RunConfig parse_config(const std::string& text);

// Canonical JSON echo of a parsed config: present blocks only, defaults
// inside present blocks materialized.
nlohmann::ordered_json resolved_config(const RunConfig& cfg);

// JSON emission with floating-point numbers at 12 significant digits.
std::string dump_json12(const nlohmann::ordered_json& j, int indent = 2);

// Nearest double with a 12-significant-digit decimal representation.
double snap12(double x);

const char* tool_name();
const char* tool_version();

}  // namespace delreg
