#pragma once

#include <string>
#include <vector>

#include "delreg/domain.hpp"
#include "delreg/policy_solver.hpp"

namespace delreg {

struct SweepRow {
  double value = 0.0;
  Policy policy;
  double welfare = 0.0;
  SolveBranch branch = SolveBranch::Numeric;
  bool failed = false;
  std::string message;  // solver failure text; empty when the row is clean
};

struct SweepTable {
  std::string axis;  // beta | gamma | delta | prior
  std::vector<SweepRow> rows;
};

// One solve per grid value, varying the named axis off the base inputs.
// axis = prior interprets the grid as Power(k) exponents. Rows are computed
// in parallel and assembled in grid order; per-row failures are retained
// with the failed flag set.
SweepTable sweep(const PreferencePair& prefs, const WelfareParams& base,
                 double delta, const Prior& prior, const std::string& axis,
                 const std::vector<double>& grid);

// CSV with header exactly: axis,value,q_min,q_max,q_d,c_d,welfare,branch,flag
std::string to_csv(const SweepTable& table);

std::vector<double> default_beta_grid();   // 0 to 5 by 0.25, then 10, 20, 50
std::vector<double> default_gamma_grid();  // 0 to 1 by 0.05

struct FosdReport {
  bool fosd_ok = false;       // prior_hi dominates prior_lo pointwise
  double failing_theta = 0.0; // first violation when !fosd_ok
  bool degenerate = false;    // identical priors: equalities, no ordering
  bool ordering_ok = false;   // q_d up, c_d down, q_min up (gamma > 0)
  Policy lo, hi;              // aligned optima under each prior
  double welfare_lo = 0.0, welfare_hi = 0.0;
  std::string message;
};

// Aligned-case (delta = alpha) comparison of optima under a dominated and a
// dominating prior; the dominance precondition is checked pointwise on the
// cdf over the joint support hull.
FosdReport compare_fosd(const PreferencePair& prefs, const WelfareParams& params,
                        const Prior& prior_lo, const Prior& prior_hi);

}  // namespace delreg
