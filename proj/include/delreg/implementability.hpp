#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "delreg/bargaining.hpp"
#include "delreg/domain.hpp"
#include "delreg/welfare.hpp"

namespace delreg {

// Analytic utility pair for preference families outside PreferencePair
// (e.g. a state-dependent firm). box bounds the quality search.
struct UtilPair {
  UtilityFn u_w;
  UtilityFn u_f;
  Box box{-1.0, 2.0};

  static UtilPair from(const PreferencePair& p);
};

// [u(fb(th),th) - u(q,th)] - [u(fb(tl),tl) - u(q,tl)]
double double_difference(const UtilityFn& u, const QualityMap& fb, double q,
                         double theta_h, double theta_l);

// (1-delta)*DDw(q_d) - delta*DDf(q_d); the two-state construction solves
// dd_condition(q_d) = c_l - c_h for q_d.
double dd_condition(const UtilPair& u, const QualityMap& fb, double delta,
                    double q_d, double theta_h, double theta_l);

struct DDCertificate {
  bool feasible = false;
  double q_d = 0.0;
  double c_d = 0.0;
  double residual = 0.0;  // condition value minus target at q_d
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::string message;
  std::vector<Contract> replay;  // bargaining replays, one per state
};

// Two-state default construction: root-finds the transfer condition in q_d
// over an expanding bracket, recovers c_d from the worker's delta-share
// equation in the high state, cross-checks it in the low state, then replays
// the bargaining engine in both states. Requires beta > 0, gamma = 0 and
// exactly two states.
DDCertificate solve_default_two_state(const PreferencePair& prefs,
                                      const WelfareParams& params, double delta,
                                      const StateSpace& states);
DDCertificate solve_default_two_state(const UtilPair& prefs,
                                      const WelfareParams& params, double delta,
                                      const StateSpace& states);

struct MarginReport {
  bool holds = false;
  double min_margin = 0.0;  // min |(1-delta)*uw_qth - delta*uf_qth| on the grid
};

// Cross-partial margin check over a (q, theta) rectangle.
MarginReport check_cross_margin(const UtilPair& prefs, double delta, const Box& q_box,
                      const Box& theta_box, double margin_x,
                      int grid_points = 21);
MarginReport check_cross_margin(const PreferencePair& prefs, double delta,
                      const Box& q_box, const Box& theta_box, double margin_x,
                      int grid_points = 21);

struct DistanceRow {
  double delta = 0.0;
  bool feasible = false;
  double q_d = 0.0;
  double distance = 0.0;  // |q_d - fb quality in the high state|
};

struct DistanceTable {
  std::vector<DistanceRow> rows;
  bool hypothesis_ok = false;  // constant cross-partials with b > a > 0
  double b = 0.0;              // worker cross-partial
  double a = 0.0;              // minus the firm cross-partial
  std::string warning;
};

// Re-solves the two-state construction per delta and tabulates the distance
// between the default quality and the high state's first-best quality.
DistanceTable default_distance_vs_delta(const UtilPair& prefs,
                                        const WelfareParams& params,
                                        const StateSpace& states,
                                        const std::vector<double>& deltas);

struct GammaReport {
  bool holds = true;
  double worst_slack = 0.0;   // min over pairs of s_th(fb(th)) - s_th(fb(th'))
  double worst_theta = 0.0;   // state whose surplus is evaluated
  double worst_other = 0.0;   // state whose first-best quality is borrowed
};

// Joint-surplus ranking condition across a finite state space: in every state
// the own first-best quality must weakly beat every other state's.
GammaReport check_gamma_condition(const PreferencePair& prefs,
                                  const QualityMap& fb,
                                  const StateSpace& states);

// Direct-mechanism outcome table indexed by (worker report, firm report).
// For the two-state game the diagonal holds the per-state first-best
// contracts and reports coincide with states; coarser games (max-min) map
// several states onto one report cell.
struct ReducedGame {
  std::vector<double> states;               // true states
  std::vector<int> truthful_report;         // report cell per true state
  std::vector<std::vector<Contract>> cell;  // [worker report][firm report]
  std::vector<double> menu;                 // renegotiation menu; empty = interval
  double q_min = 0.0;
  double q_max = 1.0;
};

ReducedGame two_state_game(const PreferencePair& prefs,
                           const WelfareParams& params,
                           const StateSpace& states,
                           const DDCertificate& cert);

struct DeviationConstraint {
  char agent = 'w';  // 'w' worker, 'f' firm
  double true_theta = 0.0;
  int report = 0;    // the deviant report cell
  double slack = 0.0;  // truthful payoff minus deviation payoff
  bool tight = false;  // |slack| <= 1e-7
};

struct DeviationReport {
  bool equilibrium = false;
  double min_slack = 0.0;
  std::vector<DeviationConstraint> constraints;
};

// Checks every unilateral misreport: the off-path contract is renegotiated
// via the bargaining engine in the true state, then both agents' deviation
// payoffs are compared with truthful play.
DeviationReport verify_no_deviation(const ReducedGame& game,
                                    const PreferencePair& prefs, double delta);
DeviationReport verify_no_deviation(const ReducedGame& game,
                                    const UtilPair& prefs, double delta);

struct MultiStateReport {
  bool feasible = false;
  double q_d = 0.0;
  double c_d = 0.0;
  std::pair<double, double> violated_pair{0.0, 0.0};
  double residual_gap = 0.0;  // worst pairwise residual at the anchor root
  bool gamma_ok = true;
  GammaReport gamma;
  std::string message;
  std::vector<Contract> replay;
};

// Solves the top adjacent pair's condition for q_d, then tests every other
// ordered pair at that root; consistency within 1e-7 plus transfer recovery
// and bargain replay in all states are required for feasibility. Two states
// route to solve_default_two_state.
MultiStateReport check_multi_state(const PreferencePair& prefs,
                                   const WelfareParams& params, double delta,
                                   const StateSpace& states);

struct MaxminReport {
  bool feasible = false;
  double theta_k = 0.0;             // worst first-best welfare state
  std::vector<double> rest;         // the other states, merged into one cell
  double q_mk = 0.0, c_mk = 0.0;    // merged-cell contract
  double q_d = 0.0, c_d = 0.0;
  ReducedGame game;
  DeviationReport deviations;
  std::vector<Contract> replay;     // renegotiation replay per state
  std::string message;
};

// Worst-case-state construction: partitions the states into {theta_k} vs the
// rest, pins the merged quality at the joint-surplus maximizer of the mean
// non-k state, solves the equality conditions for (q_d, c_mk), recovers c_d
// from the worker's delta-share equation in theta_k, and verifies the 2x2
// game. Argmin ties break toward the larger theta.
MaxminReport maxmin_construct(const PreferencePair& prefs,
                              const WelfareParams& params, double delta,
                              const StateSpace& states);

}  // namespace delreg
