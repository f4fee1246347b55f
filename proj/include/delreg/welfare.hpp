#pragma once

#include "delreg/bargaining.hpp"
#include "delreg/domain.hpp"

namespace delreg {

struct WelfareBreakdown {
  double efficiency = 0.0;   // U_f + U_w
  double inequity = 0.0;     // squared penalty term, before beta
  double externality = 0.0;  // u_r(q), before gamma
  double total = 0.0;        // efficiency - beta*inequity + gamma*externality
};

// Inequity convention: (U_f - U_w)^2 at alpha = 1/2, the raw weighted form
// (alpha*U_f - (1-alpha)*U_w)^2 otherwise. The alpha = 1/2 choice equals the
// weighted form with beta rescaled by 4; see README.
WelfareBreakdown swf_eval(const PreferencePair& prefs, const WelfareParams& params,
                          const Contract& contract);

struct FirstBest {
  Contract contract;
  bool c_indeterminate = false;  // beta = 0: any transfer is first-best
};

// Per-state welfare maximizer. Quadratic with linear externality:
// q = (2*theta + gamma)/4 and c solves alpha*U_f = (1-alpha)*U_w.
FirstBest first_best(const PreferencePair& prefs, const WelfareParams& params,
                     double theta);

// E_theta[swf(bargain(theta))] under the prior. Region decomposition at the
// clamp cuts 2*q_min and 2*q_max, 64-node Gauss-Legendre per smooth segment,
// adaptive fallback for tabulated inputs.
double expected_swf(const PreferencePair& prefs, const WelfareParams& params,
                    const Policy& policy, const Prior& prior, double delta);

}  // namespace delreg
