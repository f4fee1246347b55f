#pragma once

#include <functional>
#include <string>
#include <vector>

namespace delreg {

using UtilityFn = std::function<double(double /*q*/, double /*theta*/)>;
using QualityMap = std::function<double(double /*theta*/)>;

struct StateSpace {
  enum class Kind { Interval, Finite };
  Kind kind = Kind::Interval;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;  // Finite only; strictly increasing

  static StateSpace interval(double lo, double hi);
  static StateSpace finite(std::vector<double> vals);
  double support_min() const;
  double support_max() const;
};

struct Prior {
  enum class Family { Uniform01, Power, Tabulated };
  Family family = Family::Uniform01;
  double power_k = 1.0;            // Power: G(theta) = theta^k on [0,1], k >= 1
  std::vector<double> grid;        // Tabulated: theta nodes (increasing)
  std::vector<double> cdf_values;  // Tabulated: G at nodes, 0 -> 1, nondecreasing

  static Prior uniform01();
  static Prior power(double k);
  static Prior tabulated(std::vector<double> theta, std::vector<double> cdf);

  double support_min() const;
  double support_max() const;
  double cdf(double theta) const;
  double density(double theta) const;  // piecewise-constant for Tabulated
  double quantile(double u) const;
  // Points where the density may be non-smooth; integration splits here.
  std::vector<double> segment_cuts() const;
};

struct Moments {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
  bool degenerate = false;  // zero variance: moment-ratio formulas unusable
};

Moments prior_moments(const Prior& prior);

struct QuadraticPrefs {
  double R = 1.0;
  double y_w = 0.0;  // worker income offset, added to u_w
  double y_f = 0.0;  // firm income offset, added to u_f
};

struct TabulatedPrefs {
  std::vector<double> q_grid;                // increasing
  std::vector<double> theta_grid;            // increasing
  std::vector<std::vector<double>> u_w;      // [iq][itheta]
  std::vector<std::vector<double>> u_f;
  double R = 1.0;
};

// u_w(q;theta) = -(q-theta)^2 + y_w, u_f(q) = R - q^2 + y_f in the quadratic
// family; bilinear interpolation between nodes in the tabulated one.
struct PreferencePair {
  enum class Kind { Quadratic, Tabulated };
  Kind kind = Kind::Quadratic;
  QuadraticPrefs quad;
  TabulatedPrefs tab;

  static PreferencePair quadratic(double R, double y_w = 0.0, double y_f = 0.0);
  static PreferencePair tabulated(TabulatedPrefs t);

  double u_w(double q, double theta) const;
  double u_f(double q, double theta) const;
  double R() const;
};

struct WelfareParams {
  double beta = 0.0;   // inequity weight, >= 0
  double gamma = 0.0;  // externality weight, >= 0
  double alpha = 0.5;  // target worker share, in (0,1)
  enum class Externality { Linear, Tabulated };
  Externality externality = Externality::Linear;
  std::vector<double> ext_q;      // Tabulated externality nodes
  std::vector<double> ext_value;  // values at nodes; linear interpolation

  double u_r(double q) const;  // Linear: u_r(q) = q
};

struct Policy {
  double q_min = 0.0;
  double q_max = 0.0;
  double q_d = 0.0;
  double c_d = 0.0;
};

struct Contract {
  double q = 0.0;
  double c = 0.0;
  double theta = 0.0;
};

// Returns the list of violated invariants; empty when the policy is valid.
std::vector<std::string> validate_policy(const Policy& policy);
bool policy_ok(const Policy& policy);

// Default quality search box: [support_min - 1, support_max + 1].
struct Box {
  double lo = -1.0;
  double hi = 2.0;
};
Box quality_box(double support_min, double support_max);

// Full worker/firm utilities (quasilinear money).
inline double worker_utility(const PreferencePair& p, double q, double c, double theta) {
  return p.u_w(q, theta) + c;
}
inline double firm_utility(const PreferencePair& p, double q, double c, double theta) {
  return p.u_f(q, theta) - c;
}

}  // namespace delreg
