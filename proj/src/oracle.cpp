#include "delreg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "delreg/bargaining.hpp"
#include "delreg/numeric.hpp"
#include "delreg/welfare.hpp"

namespace delreg {

namespace {

double lerp_at(double lo, double hi, int i, int n) {
  if (n <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

Contract grid_bargain(const PreferencePair& prefs, double delta,
                      const Policy& policy, double theta, int q_points,
                      int c_points) {
  if (q_points < 2 || c_points < 2)
    throw std::invalid_argument("grid_bargain: need at least 2 points per axis");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("grid_bargain: delta out of range");

  const double uw_d = worker_utility(prefs, policy.q_d, policy.c_d, theta);
  const double uf_d = firm_utility(prefs, policy.q_d, policy.c_d, theta);

  // per-column argmax in parallel. Each quality column scans the transfers
  // between its own participation bounds (worker accepts c >= uw_d - u_w(q),
  // firm accepts c <= u_f(q) - uf_d), so narrow feasible bands near
  // default-optimal states stay visible; a few rescans of the window around
  // the best cell keep transfer rounding out of the quality pick. Columns
  // merge in order so ties keep the lexicographically first cell.
  std::vector<double> col_best(q_points, 0.0);
  std::vector<double> col_c(q_points, 0.0);
  std::vector<char> col_found(q_points, 0);
  parallel_for(q_points, [&](int iq) {
    double q = lerp_at(policy.q_min, policy.q_max, iq, q_points);
    double lo = uw_d - prefs.u_w(q, theta);
    double hi = prefs.u_f(q, theta) - uf_d;
    double best = 0.0, best_c = 0.0;
    bool found = false;
    if (hi >= lo) {
      for (int round = 0; round < 8; ++round) {
        int best_ic = -1;
        for (int ic = 0; ic < c_points; ++ic) {
          double c = lerp_at(lo, hi, ic, c_points);
          double p = nash_product(prefs, delta, q, c, policy.q_d, policy.c_d, theta);
          if (p > best) {
            best = p;
            best_c = c;
            best_ic = ic;
            found = true;
          }
        }
        if (!found) break;
        if (best_ic < 0) best_ic = static_cast<int>(
            std::lround((best_c - lo) / std::max(hi - lo, 1e-300) * (c_points - 1)));
        double nlo = lerp_at(lo, hi, std::max(best_ic - 1, 0), c_points);
        double nhi = lerp_at(lo, hi, std::min(best_ic + 1, c_points - 1), c_points);
        if (!(nhi - nlo < hi - lo)) break;
        lo = nlo;
        hi = nhi;
      }
    }
    col_best[iq] = best;
    col_c[iq] = best_c;
    col_found[iq] = found ? 1 : 0;
  });

  double best = 0.0;
  int best_iq = -1;
  for (int iq = 0; iq < q_points; ++iq) {
    if (col_found[iq] && col_best[iq] > best) {
      best = col_best[iq];
      best_iq = iq;
    }
  }
  if (best_iq < 0) return {policy.q_d, policy.c_d, theta};
  return {lerp_at(policy.q_min, policy.q_max, best_iq, q_points),
          col_c[best_iq], theta};
}

Policy grid_policy_search(const PreferencePair& prefs, const WelfareParams& params,
                          double delta, const Prior& prior, int resolution) {
  if (resolution < 2)
    throw std::invalid_argument("grid_policy_search: need at least 2 points per axis");
  if (resolution > 41)
    throw std::invalid_argument("grid_policy_search: resolution capped at 41 points per axis");

  const double th_lo = prior.support_min();
  const double th_hi = prior.support_max();
  const double iv_lo = th_lo / 2.0;
  const double iv_hi = th_hi / 2.0;
  // defaults may sit above the efficient range (large externality or skewed
  // priors), so the q_d axis extends to the support maximum
  const double qd_hi = std::max(iv_hi, th_hi);
  // transfer axis spans the payoff scale so its step matches the quality axes
  double c_ax_lo = std::min(0.0, prefs.R());
  double c_ax_hi = std::max(0.0, prefs.R());
  if (c_ax_hi - c_ax_lo < 1e-9) {
    c_ax_lo = -1.0;
    c_ax_hi = 1.0;
  }

  const int n = resolution;
  const long total = static_cast<long>(n) * n * n * n;

  // per-slice argmax in parallel over the q_min axis, merged by flat index so
  // reruns and thread counts cannot change the winner
  std::vector<double> slice_best(n, -std::numeric_limits<double>::infinity());
  std::vector<long> slice_idx(n, -1);
  parallel_for(n, [&](int i0) {
    double best = -std::numeric_limits<double>::infinity();
    long best_idx = -1;
    double q_min = lerp_at(iv_lo, iv_hi, i0, n);
    for (int i1 = 0; i1 < n; ++i1) {
      double q_max = lerp_at(iv_lo, iv_hi, i1, n);
      if (q_max < q_min) continue;
      for (int i2 = 0; i2 < n; ++i2) {
        double q_d = lerp_at(iv_lo, qd_hi, i2, n);
        if (q_d < q_min || q_d > q_max) continue;
        for (int i3 = 0; i3 < n; ++i3) {
          double c_d = lerp_at(c_ax_lo, c_ax_hi, i3, n);
          Policy pol{q_min, q_max, q_d, c_d};
          double value = expected_swf(prefs, params, pol, prior, delta);
          long idx = ((static_cast<long>(i0) * n + i1) * n + i2) * n + i3;
          if (value > best) {
            best = value;
            best_idx = idx;
          }
        }
      }
    }
    slice_best[i0] = best;
    slice_idx[i0] = best_idx;
  });

  double best = -std::numeric_limits<double>::infinity();
  long best_idx = -1;
  for (int i0 = 0; i0 < n; ++i0) {
    if (slice_idx[i0] >= 0 && slice_best[i0] > best) {
      best = slice_best[i0];
      best_idx = slice_idx[i0];
    }
  }
  if (best_idx < 0 || best_idx >= total)
    throw std::runtime_error("grid_policy_search: no feasible grid cell");

  int i3 = static_cast<int>(best_idx % n);
  int i2 = static_cast<int>((best_idx / n) % n);
  int i1 = static_cast<int>((best_idx / (static_cast<long>(n) * n)) % n);
  int i0 = static_cast<int>(best_idx / (static_cast<long>(n) * n * n));
  return {lerp_at(iv_lo, iv_hi, i0, n), lerp_at(iv_lo, iv_hi, i1, n),
          lerp_at(iv_lo, qd_hi, i2, n), lerp_at(c_ax_lo, c_ax_hi, i3, n)};
}

McResult mc_expected_swf(const PreferencePair& prefs, const WelfareParams& params,
                         double delta, const Policy& policy, const Prior& prior,
                         long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("mc_expected_swf: n must be positive");
  if (n > static_cast<long>(std::numeric_limits<int>::max()))
    throw std::invalid_argument("mc_expected_swf: n too large");

  // sequential draws pin the sample path to the seed; evaluation is parallel
  // and the reduction runs in index order, so results are bit-reproducible
  SplitMix64 rng(seed);
  std::vector<double> thetas(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) thetas[static_cast<std::size_t>(i)] = prior.quantile(rng.uniform());

  std::vector<double> values(static_cast<std::size_t>(n));
  parallel_for(static_cast<int>(n), [&](int i) {
    BargainOutcome out = bargain(prefs, delta, policy, thetas[static_cast<std::size_t>(i)]);
    values[static_cast<std::size_t>(i)] = swf_eval(prefs, params, out.contract).total;
  });

  double sum = 0.0;
  for (double v : values) sum += v;
  double mean = sum / static_cast<double>(n);
  if (n == 1) return {mean, 0.0};

  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double var = ss / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace delreg
