#include "delreg/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace delreg {

StateSpace StateSpace::interval(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("state interval needs lo < hi");
  StateSpace s;
  s.kind = Kind::Interval;
  s.lo = lo;
  s.hi = hi;
  return s;
}

StateSpace StateSpace::finite(std::vector<double> vals) {
  if (vals.empty()) throw std::invalid_argument("finite state list is empty");
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (!(vals[i] > vals[i - 1]))
      throw std::invalid_argument("finite states must be strictly increasing");
  StateSpace s;
  s.kind = Kind::Finite;
  s.values = std::move(vals);
  s.lo = s.values.front();
  s.hi = s.values.back();
  return s;
}

double StateSpace::support_min() const { return kind == Kind::Finite ? values.front() : lo; }
double StateSpace::support_max() const { return kind == Kind::Finite ? values.back() : hi; }

Prior Prior::uniform01() { return Prior{}; }

Prior Prior::power(double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("power prior needs k >= 1");
  Prior p;
  p.family = Family::Power;
  p.power_k = k;
  return p;
}

Prior Prior::tabulated(std::vector<double> theta, std::vector<double> cdf) {
  if (theta.size() != cdf.size() || theta.size() < 2)
    throw std::invalid_argument("tabulated prior needs matching grids, >= 2 nodes");
  for (std::size_t i = 1; i < theta.size(); ++i) {
    if (!(theta[i] > theta[i - 1]))
      throw std::invalid_argument("tabulated prior grid must be increasing");
    if (cdf[i] < cdf[i - 1] - 1e-12)
      throw std::invalid_argument("tabulated cdf must be nondecreasing");
  }
  if (std::abs(cdf.front()) > 1e-12 || std::abs(cdf.back() - 1.0) > 1e-12)
    throw std::invalid_argument("tabulated cdf must start at 0 and end at 1");
  Prior p;
  p.family = Family::Tabulated;
  p.grid = std::move(theta);
  p.cdf_values = std::move(cdf);
  p.cdf_values.front() = 0.0;
  p.cdf_values.back() = 1.0;
  return p;
}

double Prior::support_min() const {
  return family == Family::Tabulated ? grid.front() : 0.0;
}

double Prior::support_max() const {
  return family == Family::Tabulated ? grid.back() : 1.0;
}

double Prior::cdf(double theta) const {
  switch (family) {
    case Family::Uniform01:
      return std::clamp(theta, 0.0, 1.0);
    case Family::Power:
      return std::pow(std::clamp(theta, 0.0, 1.0), power_k);
    case Family::Tabulated: {
      if (theta <= grid.front()) return 0.0;
      if (theta >= grid.back()) return 1.0;
      auto it = std::upper_bound(grid.begin(), grid.end(), theta);
      std::size_t i = static_cast<std::size_t>(it - grid.begin());
      double t = (theta - grid[i - 1]) / (grid[i] - grid[i - 1]);
      return cdf_values[i - 1] + t * (cdf_values[i] - cdf_values[i - 1]);
    }
  }
  return 0.0;
}

double Prior::density(double theta) const {
  switch (family) {
    case Family::Uniform01:
      return (theta >= 0.0 && theta <= 1.0) ? 1.0 : 0.0;
    case Family::Power:
      return (theta >= 0.0 && theta <= 1.0)
                 ? power_k * std::pow(theta, power_k - 1.0)
                 : 0.0;
    case Family::Tabulated: {
      if (theta < grid.front() || theta > grid.back()) return 0.0;
      auto it = std::upper_bound(grid.begin(), grid.end(), theta);
      std::size_t i = static_cast<std::size_t>(it - grid.begin());
      if (i == 0) i = 1;
      if (i == grid.size()) i = grid.size() - 1;
      double w = grid[i] - grid[i - 1];
      return w > 0 ? (cdf_values[i] - cdf_values[i - 1]) / w : 0.0;
    }
  }
  return 0.0;
}

double Prior::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  switch (family) {
    case Family::Uniform01:
      return u;
    case Family::Power:
      return std::pow(u, 1.0 / power_k);
    case Family::Tabulated: {
      auto it = std::lower_bound(cdf_values.begin(), cdf_values.end(), u);
      std::size_t i = static_cast<std::size_t>(it - cdf_values.begin());
      if (i == 0) return grid.front();
      if (i >= grid.size()) return grid.back();
      double dc = cdf_values[i] - cdf_values[i - 1];
      if (dc <= 0) return grid[i];
      double t = (u - cdf_values[i - 1]) / dc;
      return grid[i - 1] + t * (grid[i] - grid[i - 1]);
    }
  }
  return 0.0;
}

std::vector<double> Prior::segment_cuts() const {
  if (family == Family::Tabulated) return grid;
  return {support_min(), support_max()};
}

Moments prior_moments(const Prior& prior) {
  Moments m;
  switch (prior.family) {
    case Prior::Family::Uniform01:
      m = {0.5, 1.0 / 3.0, 0.25, false};
      break;
    case Prior::Family::Power: {
      double k = prior.power_k;
      m = {k / (k + 1.0), k / (k + 2.0), k / (k + 3.0), false};
      break;
    }
    case Prior::Family::Tabulated: {
      // density is constant on each segment, so the raw moments are exact
      // polynomial integrals segment by segment
      double mu1 = 0, mu2 = 0, mu3 = 0;
      for (std::size_t i = 1; i < prior.grid.size(); ++i) {
        double a = prior.grid[i - 1], b = prior.grid[i];
        double mass = prior.cdf_values[i] - prior.cdf_values[i - 1];
        if (mass <= 0 || b <= a) continue;
        // factored forms avoid cancellation on narrow segments
        mu1 += mass * (a + b) / 2.0;
        mu2 += mass * (a * a + a * b + b * b) / 3.0;
        mu3 += mass * (a + b) * (a * a + b * b) / 4.0;
      }
      m = {mu1, mu2, mu3, false};
      break;
    }
  }
  double var = m.mu2 - m.mu1 * m.mu1;
  m.degenerate = var < 1e-12;
  return m;
}

PreferencePair PreferencePair::quadratic(double R, double y_w, double y_f) {
  PreferencePair p;
  p.kind = Kind::Quadratic;
  p.quad = {R, y_w, y_f};
  return p;
}

PreferencePair PreferencePair::tabulated(TabulatedPrefs t) {
  if (t.q_grid.size() < 3 || t.theta_grid.size() < 2)
    throw std::invalid_argument("tabulated prefs need >= 3 q-points and >= 2 theta-points");
  if (t.u_w.size() != t.q_grid.size() || t.u_f.size() != t.q_grid.size())
    throw std::invalid_argument("tabulated prefs rows must match q grid");
  for (const auto& row : t.u_w)
    if (row.size() != t.theta_grid.size())
      throw std::invalid_argument("tabulated prefs columns must match theta grid");
  for (const auto& row : t.u_f)
    if (row.size() != t.theta_grid.size())
      throw std::invalid_argument("tabulated prefs columns must match theta grid");
  PreferencePair p;
  p.kind = Kind::Tabulated;
  p.tab = std::move(t);
  return p;
}

namespace {

double bilinear(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::vector<std::vector<double>>& v, double x, double y) {
  auto locate = [](const std::vector<double>& g, double t) {
    std::size_t i;
    if (t <= g.front())
      i = 1;
    else if (t >= g.back())
      i = g.size() - 1;
    else
      i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), t) - g.begin());
    return i;
  };
  std::size_t i = locate(xs, x), j = locate(ys, y);
  double tx = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  double ty = (y - ys[j - 1]) / (ys[j] - ys[j - 1]);
  double v00 = v[i - 1][j - 1], v10 = v[i][j - 1], v01 = v[i - 1][j], v11 = v[i][j];
  return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 +
         tx * ty * v11;
}

}  // namespace

double PreferencePair::u_w(double q, double theta) const {
  if (kind == Kind::Quadratic) return -(q - theta) * (q - theta) + quad.y_w;
  return bilinear(tab.q_grid, tab.theta_grid, tab.u_w, q, theta);
}

double PreferencePair::u_f(double q, double theta) const {
  if (kind == Kind::Quadratic) return quad.R - q * q + quad.y_f;
  return bilinear(tab.q_grid, tab.theta_grid, tab.u_f, q, theta);
}

double PreferencePair::R() const {
  return kind == Kind::Quadratic ? quad.R : tab.R;
}

double WelfareParams::u_r(double q) const {
  if (externality == Externality::Linear) return q;
  if (ext_q.empty()) return 0.0;
  if (q <= ext_q.front()) return ext_value.front();
  if (q >= ext_q.back()) return ext_value.back();
  auto it = std::upper_bound(ext_q.begin(), ext_q.end(), q);
  std::size_t i = static_cast<std::size_t>(it - ext_q.begin());
  double t = (q - ext_q[i - 1]) / (ext_q[i] - ext_q[i - 1]);
  return ext_value[i - 1] + t * (ext_value[i] - ext_value[i - 1]);
}

std::vector<std::string> validate_policy(const Policy& policy) {
  std::vector<std::string> v;
  if (!(policy.q_min <= policy.q_max)) v.push_back("empty interval");
  if (policy.q_d < policy.q_min) v.push_back("default below minimum");
  if (policy.q_d > policy.q_max) v.push_back("default above maximum");
  for (double x : {policy.q_min, policy.q_max, policy.q_d, policy.c_d})
    if (!std::isfinite(x)) {
      v.push_back("non-finite field");
      break;
    }
  return v;
}

bool policy_ok(const Policy& policy) { return validate_policy(policy).empty(); }

Box quality_box(double support_min, double support_max) {
  return {support_min - 1.0, support_max + 1.0};
}

}  // namespace delreg
