#include "delreg/statics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "delreg/numeric.hpp"

namespace delreg {

namespace {

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

SweepTable sweep(const PreferencePair& prefs, const WelfareParams& base,
                 double delta, const Prior& prior, const std::string& axis,
                 const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("sweep: grid must be sorted ascending");
  if (axis != "beta" && axis != "gamma" && axis != "delta" && axis != "prior")
    throw std::invalid_argument("sweep: unknown axis '" + axis + "'");

  SweepTable table;
  table.axis = axis;
  table.rows.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    SweepRow& row = table.rows[i];
    row.value = grid[i];
    try {
      WelfareParams p = base;
      double d = delta;
      const Prior* g = &prior;
      Prior varied;
      if (axis == "beta") p.beta = grid[i];
      else if (axis == "gamma") p.gamma = grid[i];
      else if (axis == "delta") d = grid[i];
      else {
        varied = Prior::power(grid[i]);
        g = &varied;
      }
      SolveReport rep = solve(prefs, p, d, *g);
      row.policy = rep.policy;
      row.welfare = rep.expected_welfare;
      row.branch = rep.branch;
      auto violations = validate_policy(rep.policy);
      if (!violations.empty()) {
        row.failed = true;
        row.message = "invalid policy: " + violations.front();
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.message = e.what();
    }
  });
  return table;
}

std::string to_csv(const SweepTable& table) {
  std::string out = "axis,value,q_min,q_max,q_d,c_d,welfare,branch,flag\n";
  for (const SweepRow& r : table.rows) {
    out += table.axis;
    out += ',' + fmt_g(r.value);
    out += ',' + fmt_g(r.policy.q_min);
    out += ',' + fmt_g(r.policy.q_max);
    out += ',' + fmt_g(r.policy.q_d);
    out += ',' + fmt_g(r.policy.c_d);
    out += ',' + fmt_g(r.welfare);
    out += ',';
    out += to_string(r.branch);
    out += ',';
    out += r.failed ? "failed" : "ok";
    out += '\n';
  }
  return out;
}

std::vector<double> default_beta_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(0.25 * i);
  g.push_back(10.0);
  g.push_back(20.0);
  g.push_back(50.0);
  return g;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(0.05 * i);
  return g;
}

FosdReport compare_fosd(const PreferencePair& prefs, const WelfareParams& params,
                        const Prior& prior_lo, const Prior& prior_hi) {
  FosdReport rep;
  double lo = std::min(prior_lo.support_min(), prior_hi.support_min());
  double hi = std::max(prior_lo.support_max(), prior_hi.support_max());
  int n = 401;
  double max_gap = 0.0;
  rep.fosd_ok = true;
  for (int i = 0; i <= n; ++i) {
    double th = lo + (hi - lo) * i / n;
    double diff = prior_hi.cdf(th) - prior_lo.cdf(th);  // <= 0 under dominance
    max_gap = std::max(max_gap, -diff);
    if (diff > 1e-12 && rep.fosd_ok) {
      rep.fosd_ok = false;
      rep.failing_theta = th;
    }
  }
  if (!rep.fosd_ok) {
    rep.message = "FOSD precondition violated: dominating cdf exceeds the "
                  "dominated one at theta = " + fmt_g(rep.failing_theta);
    return rep;
  }
  SolveReport a = solve_aligned(prefs, params, prior_lo);
  SolveReport b = solve_aligned(prefs, params, prior_hi);
  rep.lo = a.policy;
  rep.hi = b.policy;
  rep.welfare_lo = a.expected_welfare;
  rep.welfare_hi = b.expected_welfare;
  if (max_gap <= 1e-12) {
    rep.degenerate = true;
    rep.message = "degenerate comparison: identical priors";
    return rep;
  }
  rep.ordering_ok = rep.hi.q_d > rep.lo.q_d && rep.hi.c_d < rep.lo.c_d &&
                    (params.gamma <= 0.0 || rep.hi.q_min > rep.lo.q_min);
  if (!rep.ordering_ok)
    rep.message = "ordering violated against the dominance prediction";
  return rep;
}

}  // namespace delreg
