#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "delreg/domain.hpp"

namespace delreg {

// Brute-force verifiers. Deliberately slower and on different grids than the
// solver internals so their errors cannot correlate with what they check.

// Exhaustive Nash-product maximization over a q x c grid. The transfer range
// comes from the two participation bounds evaluated across the quality grid.
// Ties keep the lexicographically first (q, c) cell; when no grid point
// improves on the default, the default contract is returned.
Contract grid_bargain(const PreferencePair& prefs, double delta,
                      const Policy& policy, double theta, int q_points,
                      int c_points);

// Exhaustive policy search on a 4-D grid (at most 41 points per axis),
// scoring each feasible cell by expected welfare. Cells are evaluated in
// parallel and merged deterministically (best welfare, ties by grid index).
Policy grid_policy_search(const PreferencePair& prefs, const WelfareParams& params,
                          double delta, const Prior& prior, int resolution);

struct McResult {
  double mean = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo estimate of expected welfare under a policy: theta drawn by
// inverse-cdf sampling from a seeded generator, outcomes by full bargaining.
McResult mc_expected_swf(const PreferencePair& prefs, const WelfareParams& params,
                         double delta, const Policy& policy, const Prior& prior,
                         long n, std::uint64_t seed);

struct OracleReport {
  std::string method;
  double resolution = 0.0;         // grid step or sample count
  std::vector<double> best_point;  // method-specific coordinates
  double objective = 0.0;
  double discrepancy = 0.0;        // vs the analytic answer under test
};

}  // namespace delreg
