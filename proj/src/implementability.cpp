#include "delreg/implementability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "delreg/numeric.hpp"

namespace delreg {

namespace {

constexpr double kConsistencyTol = 1e-7;
constexpr double kRootTol = 1e-10;
// Expanding the bracket past ~1e6 in quality units hits float absorption
// (q^2 swallows O(1) constants), which can fake an exact zero of a constant
// condition. Each expansion triples the width, so cap the count.
constexpr int kMaxExpand = 14;

double cross_partial(const UtilityFn& u, double q, double theta, double h = 1e-4) {
  return (u(q + h, theta + h) - u(q + h, theta - h) - u(q - h, theta + h) +
          u(q - h, theta - h)) /
         (4.0 * h * h);
}

struct FbPoint {
  double q = 0.0;
  double c = 0.0;
};

// beta-SWF per-state optimum for a general utility pair: quality maximizes the
// joint surplus, the transfer equates the alpha-weighted utilities.
FbPoint util_first_best(const UtilPair& u, double alpha, double theta) {
  auto neg_s = [&](double q) { return -(u.u_w(q, theta) + u.u_f(q, theta)); };
  int n = 2001;
  double best_q = u.box.lo, best = neg_s(best_q);
  double step = (u.box.hi - u.box.lo) / (n - 1.0);
  for (int i = 1; i < n; ++i) {
    double q = u.box.lo + step * i;
    double v = neg_s(q);
    if (v < best) {
      best = v;
      best_q = q;
    }
  }
  double lo = std::max(u.box.lo, best_q - step);
  double hi = std::min(u.box.hi, best_q + step);
  double polished = golden_min(neg_s, lo, hi);
  if (neg_s(polished) < best) best_q = polished;
  FbPoint fb;
  fb.q = best_q;
  fb.c = alpha * u.u_f(best_q, theta) - (1.0 - alpha) * u.u_w(best_q, theta);
  return fb;
}

// Core of the two-state construction, parameterized over the replayer so the
// PreferencePair and UtilPair entry points share it.
DDCertificate two_state_core(
    const UtilPair& u, double delta, double theta_l, double theta_h,
    const FbPoint& fb_l, const FbPoint& fb_h,
    const std::function<Contract(const Policy&, double)>& replay) {
  DDCertificate cert;
  QualityMap fb = [=](double th) { return th == theta_h ? fb_h.q : fb_l.q; };
  double target = fb_l.c - fb_h.c;
  auto f = [&](double q_d) {
    return dd_condition(u, fb, delta, q_d, theta_h, theta_l) - target;
  };
  double lo0 = std::min(fb_l.q, fb_h.q);
  double hi0 = std::max(fb_l.q, fb_h.q);
  if (hi0 - lo0 < 1e-3) {
    lo0 -= 0.5;
    hi0 += 0.5;
  }
  RootResult root = bisect_expand(f, lo0, hi0, kRootTol, kMaxExpand);
  cert.bracket_lo = root.bracket_lo;
  cert.bracket_hi = root.bracket_hi;
  if (!root.found) {
    cert.message = "no root in bracket";
    return cert;
  }
  cert.q_d = root.x;
  cert.residual = root.residual;

  auto surplus = [&](double q, double th) { return u.u_w(q, th) + u.u_f(q, th); };
  auto recover_c_d = [&](double th, const FbPoint& fbp) {
    double gain = surplus(fbp.q, th) - surplus(cert.q_d, th);
    return u.u_w(fbp.q, th) + fbp.c - u.u_w(cert.q_d, th) - delta * gain;
  };
  cert.c_d = recover_c_d(theta_h, fb_h);
  double c_d_low = recover_c_d(theta_l, fb_l);
  if (std::abs(cert.c_d - c_d_low) > kConsistencyTol) {
    cert.message = "transfer recovery mismatch between states";
    return cert;
  }

  Policy pol;
  pol.q_min = std::min({fb_l.q, fb_h.q, cert.q_d});
  pol.q_max = std::max({fb_l.q, fb_h.q, cert.q_d});
  pol.q_d = cert.q_d;
  pol.c_d = cert.c_d;
  Contract out_l = replay(pol, theta_l);
  Contract out_h = replay(pol, theta_h);
  cert.replay = {out_l, out_h};
  bool ok = std::abs(out_l.q - fb_l.q) <= kConsistencyTol &&
            std::abs(out_l.c - fb_l.c) <= kConsistencyTol &&
            std::abs(out_h.q - fb_h.q) <= kConsistencyTol &&
            std::abs(out_h.c - fb_h.c) <= kConsistencyTol;
  if (!ok) {
    cert.message = "bargaining replay does not reproduce first-best";
    return cert;
  }
  cert.feasible = true;
  return cert;
}

void require_two_state_pre(const WelfareParams& params, const StateSpace& states) {
  if (states.kind != StateSpace::Kind::Finite || states.values.size() != 2)
    throw std::invalid_argument("two-state construction needs exactly two states");
  if (!(params.beta > 0.0))
    throw std::invalid_argument("two-state construction needs beta > 0");
  if (params.gamma != 0.0)
    throw std::invalid_argument("two-state construction needs gamma = 0");
}

}  // namespace

UtilPair UtilPair::from(const PreferencePair& p) {
  UtilPair u;
  u.u_w = [p](double q, double th) { return p.u_w(q, th); };
  u.u_f = [p](double q, double th) { return p.u_f(q, th); };
  if (p.kind == PreferencePair::Kind::Tabulated)
    u.box = {p.tab.q_grid.front(), p.tab.q_grid.back()};
  return u;
}

double double_difference(const UtilityFn& u, const QualityMap& fb, double q,
                         double theta_h, double theta_l) {
  double high = u(fb(theta_h), theta_h) - u(q, theta_h);
  double low = u(fb(theta_l), theta_l) - u(q, theta_l);
  return high - low;
}

double dd_condition(const UtilPair& u, const QualityMap& fb, double delta,
                    double q_d, double theta_h, double theta_l) {
  return (1.0 - delta) * double_difference(u.u_w, fb, q_d, theta_h, theta_l) -
         delta * double_difference(u.u_f, fb, q_d, theta_h, theta_l);
}

DDCertificate solve_default_two_state(const PreferencePair& prefs,
                                      const WelfareParams& params, double delta,
                                      const StateSpace& states) {
  require_two_state_pre(params, states);
  double theta_l = states.values[0], theta_h = states.values[1];
  FirstBest fl = first_best(prefs, params, theta_l);
  FirstBest fh = first_best(prefs, params, theta_h);
  FbPoint fb_l{fl.contract.q, fl.contract.c};
  FbPoint fb_h{fh.contract.q, fh.contract.c};
  auto replay = [&](const Policy& pol, double th) {
    return bargain(prefs, delta, pol, th).contract;
  };
  return two_state_core(UtilPair::from(prefs), delta, theta_l, theta_h, fb_l,
                        fb_h, replay);
}

DDCertificate solve_default_two_state(const UtilPair& prefs,
                                      const WelfareParams& params, double delta,
                                      const StateSpace& states) {
  require_two_state_pre(params, states);
  double theta_l = states.values[0], theta_h = states.values[1];
  FbPoint fb_l = util_first_best(prefs, params.alpha, theta_l);
  FbPoint fb_h = util_first_best(prefs, params.alpha, theta_h);
  auto replay = [&](const Policy& pol, double th) {
    return bargain_utilities(prefs.u_w, prefs.u_f, delta, pol, th).contract;
  };
  return two_state_core(prefs, delta, theta_l, theta_h, fb_l, fb_h, replay);
}

MarginReport check_cross_margin(const UtilPair& prefs, double delta, const Box& q_box,
                      const Box& theta_box, double margin_x, int grid_points) {
  MarginReport rep;
  double min_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    double q = q_box.lo + (q_box.hi - q_box.lo) * i / (grid_points - 1.0);
    for (int j = 0; j < grid_points; ++j) {
      double th =
          theta_box.lo + (theta_box.hi - theta_box.lo) * j / (grid_points - 1.0);
      double e = (1.0 - delta) * cross_partial(prefs.u_w, q, th) -
                 delta * cross_partial(prefs.u_f, q, th);
      min_abs = std::min(min_abs, std::abs(e));
    }
  }
  rep.min_margin = min_abs;
  rep.holds = min_abs > margin_x;
  return rep;
}

MarginReport check_cross_margin(const PreferencePair& prefs, double delta,
                      const Box& q_box, const Box& theta_box, double margin_x,
                      int grid_points) {
  return check_cross_margin(UtilPair::from(prefs), delta, q_box, theta_box, margin_x,
                    grid_points);
}

DistanceTable default_distance_vs_delta(const UtilPair& prefs,
                                        const WelfareParams& params,
                                        const StateSpace& states,
                                        const std::vector<double>& deltas) {
  if (states.kind != StateSpace::Kind::Finite || states.values.size() != 2)
    throw std::invalid_argument("distance table needs exactly two states");
  DistanceTable table;

  // hypothesis: constant cross-partials with b > a > 0
  double theta_l = states.values[0], theta_h = states.values[1];
  double b_min = std::numeric_limits<double>::infinity(), b_max = -b_min;
  double a_min = b_min, a_max = -b_min;
  for (int i = 0; i < 9; ++i) {
    double q = prefs.box.lo + (prefs.box.hi - prefs.box.lo) * i / 8.0;
    for (int j = 0; j < 9; ++j) {
      double th = theta_l + (theta_h - theta_l) * j / 8.0;
      double mw = cross_partial(prefs.u_w, q, th);
      double mf = cross_partial(prefs.u_f, q, th);
      b_min = std::min(b_min, mw), b_max = std::max(b_max, mw);
      a_min = std::min(a_min, -mf), a_max = std::max(a_max, -mf);
    }
  }
  table.b = 0.5 * (b_min + b_max);
  table.a = 0.5 * (a_min + a_max);
  bool constant = (b_max - b_min) <= 1e-6 * (1.0 + std::abs(table.b)) &&
                  (a_max - a_min) <= 1e-6 * (1.0 + std::abs(table.a));
  table.hypothesis_ok = constant && table.b > table.a + 1e-9 && table.a > 1e-9;
  if (!table.hypothesis_ok)
    table.warning = constant
                        ? "cross-partial ordering b > a > 0 violated"
                        : "cross-partials are not constant over the box";

  double q_h = util_first_best(prefs, params.alpha, theta_h).q;
  for (double d : deltas) {
    DistanceRow row;
    row.delta = d;
    DDCertificate cert = solve_default_two_state(prefs, params, d, states);
    row.feasible = cert.feasible;
    if (cert.feasible) {
      row.q_d = cert.q_d;
      row.distance = std::abs(cert.q_d - q_h);
    }
    table.rows.push_back(row);
  }
  return table;
}

GammaReport check_gamma_condition(const PreferencePair& prefs,
                                  const QualityMap& fb,
                                  const StateSpace& states) {
  if (states.kind != StateSpace::Kind::Finite || states.values.empty())
    throw std::invalid_argument("gamma condition needs a finite state space");
  GammaReport rep;
  const auto& th = states.values;
  if (th.size() == 1) {  // vacuous
    rep.worst_theta = rep.worst_other = th[0];
    return rep;
  }
  auto surplus = [&](double q, double t) {
    return prefs.u_w(q, t) + prefs.u_f(q, t);
  };
  double worst = std::numeric_limits<double>::infinity();
  for (double ti : th) {
    for (double tj : th) {
      if (ti == tj) continue;
      double slack = surplus(fb(ti), ti) - surplus(fb(tj), ti);
      if (slack < worst) {
        worst = slack;
        rep.worst_theta = ti;
        rep.worst_other = tj;
      }
    }
  }
  rep.worst_slack = worst;
  rep.holds = worst >= -1e-12;
  return rep;
}

ReducedGame two_state_game(const PreferencePair& prefs,
                           const WelfareParams& params,
                           const StateSpace& states,
                           const DDCertificate& cert) {
  if (states.kind != StateSpace::Kind::Finite || states.values.size() != 2)
    throw std::invalid_argument("two-state game needs exactly two states");
  ReducedGame g;
  g.states = states.values;
  g.truthful_report = {0, 1};
  FirstBest fl = first_best(prefs, params, g.states[0]);
  FirstBest fh = first_best(prefs, params, g.states[1]);
  Contract d{cert.q_d, cert.c_d, 0.0};
  g.cell = {{fl.contract, d}, {d, fh.contract}};
  g.q_min = std::min({fl.contract.q, fh.contract.q, cert.q_d});
  g.q_max = std::max({fl.contract.q, fh.contract.q, cert.q_d});
  return g;
}

namespace {

template <typename Renegotiate, typename Uw, typename Uf>
DeviationReport verify_impl(const ReducedGame& game, const Renegotiate& reneg,
                            const Uw& uw, const Uf& uf) {
  DeviationReport rep;
  rep.min_slack = std::numeric_limits<double>::infinity();
  int r_count = static_cast<int>(game.cell.size());
  for (size_t si = 0; si < game.states.size(); ++si) {
    double th = game.states[si];
    int r = game.truthful_report[si];
    const Contract& t = game.cell[r][r];
    double uw_true = uw(t.q, th) + t.c;
    double uf_true = uf(t.q, th) - t.c;
    for (int dr = 0; dr < r_count; ++dr) {
      if (dr == r) continue;
      {  // worker misreports dr, firm truthful
        Contract cell = game.cell[dr][r];
        Contract got = reneg(cell, th);
        DeviationConstraint c;
        c.agent = 'w';
        c.true_theta = th;
        c.report = dr;
        c.slack = uw_true - (uw(got.q, th) + got.c);
        c.tight = std::abs(c.slack) <= kConsistencyTol;
        rep.min_slack = std::min(rep.min_slack, c.slack);
        rep.constraints.push_back(c);
      }
      {  // firm misreports dr, worker truthful
        Contract cell = game.cell[r][dr];
        Contract got = reneg(cell, th);
        DeviationConstraint c;
        c.agent = 'f';
        c.true_theta = th;
        c.report = dr;
        c.slack = uf_true - (uf(got.q, th) - got.c);
        c.tight = std::abs(c.slack) <= kConsistencyTol;
        rep.min_slack = std::min(rep.min_slack, c.slack);
        rep.constraints.push_back(c);
      }
    }
  }
  rep.equilibrium = rep.min_slack >= -kConsistencyTol;
  return rep;
}

}  // namespace

DeviationReport verify_no_deviation(const ReducedGame& game,
                                    const PreferencePair& prefs, double delta) {
  auto reneg = [&](const Contract& cell, double th) {
    if (!game.menu.empty())
      return bargain_over_menu(prefs, delta, game.menu, cell.q, cell.c, th)
          .contract;
    Policy pol{std::min(game.q_min, cell.q), std::max(game.q_max, cell.q),
               cell.q, cell.c};
    return bargain(prefs, delta, pol, th).contract;
  };
  auto uw = [&](double q, double th) { return prefs.u_w(q, th); };
  auto uf = [&](double q, double th) { return prefs.u_f(q, th); };
  return verify_impl(game, reneg, uw, uf);
}

DeviationReport verify_no_deviation(const ReducedGame& game,
                                    const UtilPair& prefs, double delta) {
  auto reneg = [&](const Contract& cell, double th) {
    if (!game.menu.empty())
      return bargain_utilities_over_menu(prefs.u_w, prefs.u_f, delta, game.menu,
                                         cell.q, cell.c, th)
          .contract;
    Policy pol{std::min(game.q_min, cell.q), std::max(game.q_max, cell.q),
               cell.q, cell.c};
    return bargain_utilities(prefs.u_w, prefs.u_f, delta, pol, th).contract;
  };
  return verify_impl(game, reneg, prefs.u_w, prefs.u_f);
}

MultiStateReport check_multi_state(const PreferencePair& prefs,
                                   const WelfareParams& params, double delta,
                                   const StateSpace& states) {
  if (states.kind != StateSpace::Kind::Finite || states.values.size() < 2)
    throw std::invalid_argument("multi-state check needs a finite state space");
  if (!(params.beta > 0.0))
    throw std::invalid_argument("multi-state check needs beta > 0");
  MultiStateReport rep;
  const auto& th = states.values;
  size_t n = th.size();

  if (n == 2) {
    DDCertificate cert = solve_default_two_state(prefs, params, delta, states);
    rep.feasible = cert.feasible;
    rep.q_d = cert.q_d;
    rep.c_d = cert.c_d;
    rep.residual_gap = std::abs(cert.residual);
    rep.replay = cert.replay;
    rep.message = cert.message.empty()
                      ? "two states: routed to the two-state construction"
                      : cert.message;
    return rep;
  }

  std::vector<FbPoint> fb(n);
  for (size_t i = 0; i < n; ++i) {
    FirstBest f = first_best(prefs, params, th[i]);
    fb[i] = {f.contract.q, f.contract.c};
  }
  auto fb_map_for = [&](size_t hi_idx, size_t lo_idx) {
    double thh = th[hi_idx], qh = fb[hi_idx].q;
    double thl = th[lo_idx], ql = fb[lo_idx].q;
    return QualityMap([=](double t) { return t == thh ? qh : (t == thl ? ql : 0.0); });
  };
  UtilPair up = UtilPair::from(prefs);
  auto pair_residual = [&](size_t i, size_t j, double q_d) {
    // condition for the ordered pair (theta_i high, theta_j low)
    return dd_condition(up, fb_map_for(i, j), delta, q_d, th[i], th[j]) -
           (fb[j].c - fb[i].c);
  };

  // anchor: the top adjacent pair
  size_t ai = n - 1, aj = n - 2;
  auto f_anchor = [&](double q_d) { return pair_residual(ai, aj, q_d); };
  double lo0 = std::min(fb[ai].q, fb[aj].q), hi0 = std::max(fb[ai].q, fb[aj].q);
  if (hi0 - lo0 < 1e-3) {
    lo0 -= 0.5;
    hi0 += 0.5;
  }
  RootResult root = bisect_expand(f_anchor, lo0, hi0, kRootTol, kMaxExpand);
  if (!root.found) {
    rep.violated_pair = {th[ai], th[aj]};
    rep.message = "no root in bracket for the anchor pair";
    return rep;
  }
  rep.q_d = root.x;

  double gap = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < i; ++j) {
      double r = std::abs(pair_residual(i, j, rep.q_d));
      if (r > gap) {
        gap = r;
        rep.violated_pair = {th[i], th[j]};
      }
    }
  }
  rep.residual_gap = gap;
  if (gap > kConsistencyTol) {
    rep.message = "pairwise conditions are inconsistent at the anchor root";
    if (params.gamma > 0.0) {
      rep.gamma = check_gamma_condition(
          prefs, [&](double t) {
            for (size_t i = 0; i < n; ++i)
              if (t == th[i]) return fb[i].q;
            return 0.0;
          },
          states);
      rep.gamma_ok = rep.gamma.holds;
    }
    return rep;
  }

  // transfer recovery in every state
  auto surplus = [&](double q, double t) {
    return prefs.u_w(q, t) + prefs.u_f(q, t);
  };
  auto recover = [&](size_t i) {
    double gain = surplus(fb[i].q, th[i]) - surplus(rep.q_d, th[i]);
    return prefs.u_w(fb[i].q, th[i]) + fb[i].c - prefs.u_w(rep.q_d, th[i]) -
           delta * gain;
  };
  rep.c_d = recover(n - 1);
  for (size_t i = 0; i < n; ++i) {
    if (std::abs(recover(i) - rep.c_d) > kConsistencyTol) {
      rep.message = "transfer recovery mismatch across states";
      rep.violated_pair = {th[n - 1], th[i]};
      return rep;
    }
  }

  // replay over the first-best menu (the delegation set of the construction)
  std::vector<double> menu;
  for (const auto& p : fb) menu.push_back(p.q);
  bool replay_ok = true;
  for (size_t i = 0; i < n; ++i) {
    Contract got =
        bargain_over_menu(prefs, delta, menu, rep.q_d, rep.c_d, th[i]).contract;
    rep.replay.push_back(got);
    if (std::abs(got.q - fb[i].q) > kConsistencyTol ||
        std::abs(got.c - fb[i].c) > kConsistencyTol)
      replay_ok = false;
  }
  if (!replay_ok) {
    rep.message = "bargaining replay does not reproduce first-best";
    return rep;
  }

  if (params.gamma > 0.0) {
    rep.gamma = check_gamma_condition(
        prefs, [&](double t) {
          for (size_t i = 0; i < n; ++i)
            if (t == th[i]) return fb[i].q;
          return 0.0;
        },
        states);
    rep.gamma_ok = rep.gamma.holds;
    if (!rep.gamma_ok) {
      rep.message = "joint-surplus ranking condition violated";
      return rep;
    }
  }

  rep.feasible = true;
  return rep;
}

MaxminReport maxmin_construct(const PreferencePair& prefs,
                              const WelfareParams& params, double delta,
                              const StateSpace& states) {
  if (states.kind != StateSpace::Kind::Finite || states.values.size() < 2)
    throw std::invalid_argument("maxmin construction needs a finite state space");
  if (!(params.beta > 0.0))
    throw std::invalid_argument("maxmin construction needs beta > 0");
  MaxminReport rep;
  const auto& th = states.values;
  size_t n = th.size();

  std::vector<FbPoint> fb(n);
  std::vector<double> welfare(n);
  for (size_t i = 0; i < n; ++i) {
    FirstBest f = first_best(prefs, params, th[i]);
    fb[i] = {f.contract.q, f.contract.c};
    welfare[i] = swf_eval(prefs, params, f.contract).total;
  }
  // argmin over states, ties toward the larger theta
  size_t k = n - 1;
  for (size_t i = n - 1; i-- > 0;)
    if (welfare[i] < welfare[k]) k = i;
  rep.theta_k = th[k];
  for (size_t i = 0; i < n; ++i)
    if (i != k) rep.rest.push_back(th[i]);

  if (n == 2) {
    DDCertificate cert = solve_default_two_state(prefs, params, delta, states);
    size_t other = 1 - k;
    rep.q_mk = fb[other].q;
    rep.c_mk = fb[other].c;
    rep.q_d = cert.q_d;
    rep.c_d = cert.c_d;
    rep.replay = cert.replay;
    if (!cert.feasible) {
      rep.message = cert.message;
      return rep;
    }
    rep.game = two_state_game(prefs, params, states, cert);
    rep.deviations = verify_no_deviation(rep.game, prefs, delta);
    rep.feasible = rep.deviations.equilibrium;
    rep.message = "two states: degenerate partition";
    return rep;
  }

  double mean_rest = 0.0;
  for (double t : rep.rest) mean_rest += t;
  mean_rest /= static_cast<double>(rep.rest.size());
  UtilPair up = UtilPair::from(prefs);
  rep.q_mk = util_first_best(up, params.alpha, mean_rest).q;

  // equality conditions, one per non-k state; differencing removes c_mk
  double q_k = fb[k].q, c_k = fb[k].c;
  auto condition = [&](double theta_m, double q_d) {
    QualityMap map = [=](double t) { return t == th[k] ? q_k : rep.q_mk; };
    return dd_condition(up, map, delta, q_d, th[k], theta_m);
  };
  auto diff = [&](double q_d) {
    return condition(rep.rest[0], q_d) - condition(rep.rest[1], q_d);
  };
  double lo0 = std::min(rep.q_mk, q_k), hi0 = std::max(rep.q_mk, q_k);
  if (hi0 - lo0 < 1e-3) {
    lo0 -= 0.5;
    hi0 += 0.5;
  }
  RootResult root = bisect_expand(diff, lo0, hi0, kRootTol, kMaxExpand);
  if (!root.found) {
    rep.message = "no consistent (q_{-k},c_{-k},q_d,c_d)";
    return rep;
  }
  rep.q_d = root.x;
  for (size_t m = 2; m < rep.rest.size(); ++m) {
    if (std::abs(condition(rep.rest[0], rep.q_d) -
                 condition(rep.rest[m], rep.q_d)) > kConsistencyTol) {
      rep.message = "no consistent (q_{-k},c_{-k},q_d,c_d)";
      return rep;
    }
  }
  rep.c_mk = c_k + condition(rep.rest[0], rep.q_d);

  // c_d from the worker's delta-share equation in state theta_k
  auto surplus = [&](double q, double t) {
    return prefs.u_w(q, t) + prefs.u_f(q, t);
  };
  double gain_k = surplus(q_k, th[k]) - surplus(rep.q_d, th[k]);
  if (gain_k < -1e-12) {
    rep.message = "default dominates first-best in the worst state";
    return rep;
  }
  rep.c_d = prefs.u_w(q_k, th[k]) + c_k - prefs.u_w(rep.q_d, th[k]) -
            delta * gain_k;

  rep.game.states = th;
  rep.game.truthful_report.assign(n, 0);
  rep.game.truthful_report[k] = 1;
  Contract merged{rep.q_mk, rep.c_mk, 0.0};
  Contract dflt{rep.q_d, rep.c_d, 0.0};
  Contract top{q_k, c_k, th[k]};
  rep.game.cell = {{merged, dflt}, {dflt, top}};
  rep.game.menu = {rep.q_mk, q_k};

  for (size_t i = 0; i < n; ++i) {
    rep.replay.push_back(
        bargain_over_menu(prefs, delta, rep.game.menu, rep.q_d, rep.c_d, th[i])
            .contract);
  }
  Contract at_k = rep.replay[k];
  bool fb_at_k = std::abs(at_k.q - q_k) <= kConsistencyTol &&
                 std::abs(at_k.c - c_k) <= kConsistencyTol;
  rep.deviations = verify_no_deviation(rep.game, prefs, delta);
  rep.feasible = fb_at_k && rep.deviations.equilibrium;
  if (!fb_at_k)
    rep.message = "renegotiation from the default misses first-best in theta_k";
  else if (!rep.deviations.equilibrium)
    rep.message = "profitable deviation remains";
  return rep;
}

}  // namespace delreg
