#pragma once

#include <vector>

#include "delreg/domain.hpp"

namespace delreg {

struct BargainOutcome {
  Contract contract;
  double gains_w = 0.0;  // worker utility gain over the default
  double gains_f = 0.0;  // firm utility gain over the default
};

// Candidate qualities used by grid argmax for tabulated preferences: a
// uniform grid over [lo, hi] (1001 points by default) joined with the
// tabulation nodes and both endpoints. For a piecewise-bilinear surface the
// node-aware set makes the argmax exact.
std::vector<double> candidate_qualities(const PreferencePair& prefs, double lo,
                                        double hi, int grid_points = 1001);

// Joint-surplus maximizer on [q_min, q_max]: clamp(theta/2, q_min, q_max) for
// the quadratic family, grid argmax (ties to the smallest q) otherwise.
double joint_surplus_maximizer(const PreferencePair& prefs, double q_min,
                               double q_max, double theta,
                               int grid_points = 1001);

// Variant over an explicit finite quality menu.
double joint_surplus_maximizer_over(const PreferencePair& prefs,
                                    const std::vector<double>& qs, double theta);

// Nash bargaining from the policy's default in state theta. Quadratic
// preferences use the closed-form transfer
//   c = c_d + (1-2*delta)*(q^2 - q_d^2) + 2*(1-delta)*theta*(q_d - q),
// tabulated ones split the realized surplus gain delta:(1-delta).
BargainOutcome bargain(const PreferencePair& prefs, double delta,
                       const Policy& policy, double theta,
                       int grid_points = 1001);

// Bargaining where renegotiation may only pick qualities from a finite menu
// (the default's quality must be on the menu).
BargainOutcome bargain_over_menu(const PreferencePair& prefs, double delta,
                                 const std::vector<double>& menu, double q_d,
                                 double c_d, double theta);

// General-utilities bargaining: grid surplus argmax over [q_min, q_max]
// refined by golden section, then the delta-share transfer. Serves utility
// pairs outside the PreferencePair families.
BargainOutcome bargain_utilities(const UtilityFn& u_w, const UtilityFn& u_f,
                                 double delta, const Policy& policy,
                                 double theta, int grid_points = 2001);

// Menu variant of the above.
BargainOutcome bargain_utilities_over_menu(const UtilityFn& u_w,
                                           const UtilityFn& u_f, double delta,
                                           const std::vector<double>& menu,
                                           double q_d, double c_d,
                                           double theta);

// (gain_w)^delta * (gain_f)^(1-delta); zero when either gain is negative.
double nash_product(const PreferencePair& prefs, double delta, double q,
                    double c, double q_d, double c_d, double theta);

}  // namespace delreg
