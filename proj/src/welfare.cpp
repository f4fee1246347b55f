#include "delreg/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "delreg/numeric.hpp"

namespace delreg {

WelfareBreakdown swf_eval(const PreferencePair& prefs, const WelfareParams& params,
                          const Contract& contract) {
  WelfareBreakdown b;
  double uw = worker_utility(prefs, contract.q, contract.c, contract.theta);
  double uf = firm_utility(prefs, contract.q, contract.c, contract.theta);
  b.efficiency = uf + uw;
  if (params.alpha == 0.5) {
    double d = uf - uw;
    b.inequity = d * d;
  } else {
    double d = params.alpha * uf - (1.0 - params.alpha) * uw;
    b.inequity = d * d;
  }
  b.externality = params.u_r(contract.q);
  b.total = b.efficiency - params.beta * b.inequity + params.gamma * b.externality;
  return b;
}

FirstBest first_best(const PreferencePair& prefs, const WelfareParams& params,
                     double theta) {
  FirstBest fb;
  double q;
  if (prefs.kind == PreferencePair::Kind::Quadratic &&
      params.externality == WelfareParams::Externality::Linear) {
    q = (2.0 * theta + params.gamma) / 4.0;
  } else {
    // grid argmax of u_w + u_f + gamma*u_r
    double lo, hi;
    if (prefs.kind == PreferencePair::Kind::Tabulated) {
      lo = prefs.tab.q_grid.front();
      hi = prefs.tab.q_grid.back();
    } else {
      lo = theta / 2.0 - 1.0;
      hi = theta / 2.0 + 1.0;
      if (!params.ext_q.empty()) {
        lo = std::min(lo, params.ext_q.front());
        hi = std::max(hi, params.ext_q.back());
      }
    }
    auto qs = candidate_qualities(prefs, lo, hi, 2001);
    if (qs.empty()) throw std::invalid_argument("no feasible quality candidates");
    double best = qs.front(), best_v = -std::numeric_limits<double>::infinity();
    for (double cand : qs) {
      double v = prefs.u_w(cand, theta) + prefs.u_f(cand, theta) +
                 params.gamma * params.u_r(cand);
      if (v > best_v) {
        best_v = v;
        best = cand;
      }
    }
    q = best;
  }
  double c;
  if (params.beta > 0.0) {
    // alpha*U_f = (1-alpha)*U_w  =>  c = alpha*u_f - (1-alpha)*u_w
    c = params.alpha * prefs.u_f(q, theta) - (1.0 - params.alpha) * prefs.u_w(q, theta);
  } else {
    c = std::numeric_limits<double>::quiet_NaN();
    fb.c_indeterminate = true;
  }
  fb.contract = {q, c, theta};
  return fb;
}

namespace {

bool analytic_regions_ok(const PreferencePair& prefs, const WelfareParams& params) {
  return prefs.kind == PreferencePair::Kind::Quadratic &&
         params.externality == WelfareParams::Externality::Linear;
}

}  // namespace

double expected_swf(const PreferencePair& prefs, const WelfareParams& params,
                    const Policy& policy, const Prior& prior, double delta) {
  if (!policy_ok(policy))
    throw std::invalid_argument("invalid policy: " + validate_policy(policy).front());
  double lo = prior.support_min(), hi = prior.support_max();
  auto integrand = [&](double th) {
    BargainOutcome out = bargain(prefs, delta, policy, th);
    return swf_eval(prefs, params, out.contract).total * prior.density(th);
  };
  // split at the clamp cuts (clamped into the support) and at the prior's
  // own segment boundaries so every piece is smooth
  std::set<double> cuts{lo, hi};
  cuts.insert(std::clamp(2.0 * policy.q_min, lo, hi));
  cuts.insert(std::clamp(2.0 * policy.q_max, lo, hi));
  for (double c : prior.segment_cuts()) cuts.insert(std::clamp(c, lo, hi));
  double total = 0.0;
  double prev = *cuts.begin();
  bool poly = analytic_regions_ok(prefs, params);
  for (double c : cuts) {
    if (c <= prev) continue;
    total += poly ? gauss_legendre_64(integrand, prev, c)
                  : integrate(integrand, prev, c, 1e-10);
    prev = c;
  }
  return total;
}

}  // namespace delreg
