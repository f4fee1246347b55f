#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "delreg/domain.hpp"

namespace delreg {

enum class SolveBranch {
  ClosedFormDelta0,
  ClosedFormAligned,
  ClosedFormDelta1,
  Numeric,
};

const char* to_string(SolveBranch b);

struct SolveReport {
  Policy policy;
  double expected_welfare = 0.0;
  SolveBranch branch = SolveBranch::Numeric;
  // d/d{q_min, q_max, c_d, q_d} of expected welfare at the reported policy
  std::array<double, 4> foc_residuals{};
  std::string notes;
};

// Closed-form pieces of the delta = 0, Uniform01 system, exposed for direct
// inspection of the coupled equations.
double delta0_default_quality(double q_min, double q_max);
double delta0_default_transfer(double q_d, double q_min, double q_max, double R);
// Interior roots (in d_lo = 2*q_min resp. d_hi = 1-2*q_max) of the interval
// first-order conditions, given A = 2*c_d - 2*q_d^2 - R. Zero means corner.
double delta0_dlo_root(double A, double q_d, double beta, double gamma);
double delta0_dhi_root(double A, double q_d, double beta, double gamma);

// delta = alpha: moment closed forms; the default decouples from the interval.
SolveReport solve_aligned(const PreferencePair& prefs, const WelfareParams& params,
                          const Prior& prior);
// delta = 0 with a Uniform01 prior: damped fixed point on the coupled system,
// with the unconstrained branch short-circuited below the equity threshold.
SolveReport solve_firm_control(const PreferencePair& prefs,
                               const WelfareParams& params, const Prior& prior);
// delta = 1: the default is pinned only through c_d + q_d^2; a representative
// default is reported and the indeterminacy class recorded in the notes.
SolveReport solve_worker_control(const PreferencePair& prefs,
                                 const WelfareParams& params, const Prior& prior);
// Any delta: multi-start numeric maximization of expected welfare.
SolveReport solve_numeric(const PreferencePair& prefs, const WelfareParams& params,
                          double delta, const Prior& prior);
// Routes to the closed-form branch when one applies, otherwise solve_numeric.
SolveReport solve(const PreferencePair& prefs, const WelfareParams& params,
                  double delta, const Prior& prior);

// Analytic first-order conditions of the regulator program at a given policy,
// order {q_min, q_max, c_d, q_d}. Quadratic preferences, linear externality.
std::array<double, 4> foc_residuals(const PreferencePair& prefs,
                                    const WelfareParams& params, double delta,
                                    const Prior& prior, const Policy& policy);

// Best interval for a fixed default contract (the other half of the
// aligned-case decoupling). Returns (q_min, q_max).
std::pair<double, double> solve_interval_given_default(
    const PreferencePair& prefs, const WelfareParams& params, double delta,
    const Prior& prior, double q_d, double c_d);

struct BiasReport {
  std::vector<double> theta;     // sample grid over the support
  std::vector<double> t_values;  // backward-bias statistic T at the samples
  std::vector<double> t_second;  // second differences, size n-2
  std::vector<bool> solved;      // per-sample conditional optimum found
  bool convex = false;
};

// Samples T(theta) = G(theta) * (q*(theta) - E[q*(z) | z <= theta]) where
// q*(theta) is the regulator's pointwise optimum given the default contract;
// convexity of T certifies that interval delegation is without loss.
BiasReport backward_bias_check(const PreferencePair& prefs,
                               const WelfareParams& params, double delta,
                               const Prior& prior, const Contract& dflt,
                               int samples = 50);

}  // namespace delreg
