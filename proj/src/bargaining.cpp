#include "delreg/bargaining.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "delreg/numeric.hpp"

namespace delreg {

std::vector<double> candidate_qualities(const PreferencePair& prefs, double lo,
                                        double hi, int grid_points) {
  if (prefs.kind == PreferencePair::Kind::Tabulated) {
    lo = std::max(lo, prefs.tab.q_grid.front());
    hi = std::min(hi, prefs.tab.q_grid.back());
  }
  std::vector<double> qs;
  if (!(hi >= lo)) return qs;
  qs.reserve(grid_points + 8);
  for (int i = 0; i < grid_points; ++i)
    qs.push_back(lo + (hi - lo) * i / (grid_points - 1.0));
  if (prefs.kind == PreferencePair::Kind::Tabulated) {
    for (double qn : prefs.tab.q_grid)
      if (qn >= lo && qn <= hi) qs.push_back(qn);
  }
  qs.push_back(lo);
  qs.push_back(hi);
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  return qs;
}

double joint_surplus_maximizer_over(const PreferencePair& prefs,
                                    const std::vector<double>& qs, double theta) {
  if (qs.empty()) throw std::invalid_argument("empty quality menu");
  double best_q = qs.front();
  double best_s = prefs.u_w(best_q, theta) + prefs.u_f(best_q, theta);
  for (double q : qs) {
    double s = prefs.u_w(q, theta) + prefs.u_f(q, theta);
    if (s > best_s) {  // ties keep the smallest q (qs is sorted for menus built here)
      best_s = s;
      best_q = q;
    }
  }
  return best_q;
}

double joint_surplus_maximizer(const PreferencePair& prefs, double q_min,
                               double q_max, double theta, int grid_points) {
  if (!(q_min <= q_max)) throw std::invalid_argument("empty delegation interval");
  if (prefs.kind == PreferencePair::Kind::Quadratic)
    return std::clamp(theta / 2.0, q_min, q_max);
  return joint_surplus_maximizer_over(
      prefs, candidate_qualities(prefs, q_min, q_max, grid_points), theta);
}

namespace {

BargainOutcome settle(const PreferencePair& prefs, double delta, double q,
                      double q_d, double c_d, double theta) {
  BargainOutcome out;
  double uw_d = prefs.u_w(q_d, theta);
  double uf_d = prefs.u_f(q_d, theta);
  double gain_s = (prefs.u_w(q, theta) + prefs.u_f(q, theta)) - (uw_d + uf_d);
  if (gain_s <= 0.0) {
    // no surplus to split: the default stands as-is
    out.contract = {q_d, c_d, theta};
    return out;
  }
  double c;
  if (prefs.kind == PreferencePair::Kind::Quadratic) {
    c = c_d + (1.0 - 2.0 * delta) * (q * q - q_d * q_d) +
        2.0 * (1.0 - delta) * theta * (q_d - q);
  } else {
    // give the worker delta of the surplus gain above the default
    c = c_d + uw_d - prefs.u_w(q, theta) + delta * gain_s;
  }
  out.contract = {q, c, theta};
  out.gains_w = worker_utility(prefs, q, c, theta) - (uw_d + c_d);
  out.gains_f = firm_utility(prefs, q, c, theta) - (uf_d - c_d);
  return out;
}

}  // namespace

BargainOutcome bargain(const PreferencePair& prefs, double delta,
                       const Policy& policy, double theta, int grid_points) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta out of range");
  if (!policy_ok(policy))
    throw std::invalid_argument("invalid policy: " + validate_policy(policy).front());
  double q;
  if (prefs.kind == PreferencePair::Kind::Quadratic) {
    q = std::clamp(theta / 2.0, policy.q_min, policy.q_max);
  } else {
    auto qs = candidate_qualities(prefs, policy.q_min, policy.q_max, grid_points);
    qs.push_back(policy.q_d);
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    q = joint_surplus_maximizer_over(prefs, qs, theta);
  }
  return settle(prefs, delta, q, policy.q_d, policy.c_d, theta);
}

BargainOutcome bargain_over_menu(const PreferencePair& prefs, double delta,
                                 const std::vector<double>& menu, double q_d,
                                 double c_d, double theta) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta out of range");
  std::vector<double> qs = menu;
  qs.push_back(q_d);
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  double q = joint_surplus_maximizer_over(prefs, qs, theta);
  return settle(prefs, delta, q, q_d, c_d, theta);
}

namespace {

BargainOutcome settle_utilities(const UtilityFn& u_w, const UtilityFn& u_f,
                                double delta, double q, double q_d, double c_d,
                                double theta) {
  BargainOutcome out;
  double uw_d = u_w(q_d, theta);
  double uf_d = u_f(q_d, theta);
  double gain_s = (u_w(q, theta) + u_f(q, theta)) - (uw_d + uf_d);
  if (gain_s <= 0.0) {
    out.contract = {q_d, c_d, theta};
    return out;
  }
  double c = c_d + uw_d - u_w(q, theta) + delta * gain_s;
  out.contract = {q, c, theta};
  out.gains_w = delta * gain_s;
  out.gains_f = (1.0 - delta) * gain_s;
  return out;
}

}  // namespace

BargainOutcome bargain_utilities(const UtilityFn& u_w, const UtilityFn& u_f,
                                 double delta, const Policy& policy,
                                 double theta, int grid_points) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta out of range");
  if (!policy_ok(policy))
    throw std::invalid_argument("invalid policy: " + validate_policy(policy).front());
  auto surplus = [&](double q) { return u_w(q, theta) + u_f(q, theta); };
  double best_q = policy.q_d;
  double best_s = surplus(best_q);
  double step = (policy.q_max - policy.q_min) / (grid_points - 1.0);
  for (int i = 0; i < grid_points; ++i) {
    double q = policy.q_min + step * i;
    double s = surplus(q);
    if (s > best_s) {
      best_s = s;
      best_q = q;
    }
  }
  // polish inside the neighbouring cells; endpoints stay reachable
  double lo = std::max(policy.q_min, best_q - step);
  double hi = std::min(policy.q_max, best_q + step);
  if (hi > lo) {
    double polished = golden_min([&](double q) { return -surplus(q); }, lo, hi);
    if (surplus(polished) > best_s) best_q = polished;
  }
  return settle_utilities(u_w, u_f, delta, best_q, policy.q_d, policy.c_d, theta);
}

BargainOutcome bargain_utilities_over_menu(const UtilityFn& u_w,
                                           const UtilityFn& u_f, double delta,
                                           const std::vector<double>& menu,
                                           double q_d, double c_d,
                                           double theta) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta out of range");
  std::vector<double> qs = menu;
  qs.push_back(q_d);
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  double best_q = qs.front();
  double best_s = u_w(best_q, theta) + u_f(best_q, theta);
  for (double q : qs) {
    double s = u_w(q, theta) + u_f(q, theta);
    if (s > best_s) {
      best_s = s;
      best_q = q;
    }
  }
  return settle_utilities(u_w, u_f, delta, best_q, q_d, c_d, theta);
}

double nash_product(const PreferencePair& prefs, double delta, double q,
                    double c, double q_d, double c_d, double theta) {
  double gw = worker_utility(prefs, q, c, theta) -
              worker_utility(prefs, q_d, c_d, theta);
  double gf = firm_utility(prefs, q, c, theta) -
              firm_utility(prefs, q_d, c_d, theta);
  if (gw < 0.0 || gf < 0.0) return 0.0;
  return std::pow(gw, delta) * std::pow(gf, 1.0 - delta);
}

}  // namespace delreg
