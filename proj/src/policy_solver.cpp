#include "delreg/policy_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "delreg/numeric.hpp"
#include "delreg/welfare.hpp"

namespace delreg {

namespace {

constexpr double kCoordTol = 1e-10;
constexpr int kFixedPointIters = 200;
constexpr double kDamping = 0.5;

void require_quadratic_linear(const PreferencePair& prefs,
                              const WelfareParams& params, const char* who) {
  if (prefs.kind != PreferencePair::Kind::Quadratic)
    throw std::invalid_argument(std::string(who) + ": needs quadratic preferences");
  if (params.externality != WelfareParams::Externality::Linear)
    throw std::invalid_argument(std::string(who) + ": needs the linear externality");
}

// inequity is (U_f-U_w)^2 at alpha=1/2 and (alpha U_f-(1-alpha) U_w)^2
// otherwise; kappa converts the weighted difference to the penalized one
double inequity_scale(double alpha) { return alpha == 0.5 ? 2.0 : 1.0; }

// integral of f * prior density over [lo, hi], split at the prior's own cuts
// and any extra clamp cuts so each piece is polynomial (exact under GL64)
double integrate_pw(const Fn1& f, const Prior& prior, double lo, double hi,
                    const std::vector<double>& extra = {}) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts = prior.segment_cuts();
  cuts.insert(cuts.end(), extra.begin(), extra.end());
  cuts.push_back(lo);
  cuts.push_back(hi);
  for (double& c : cuts) c = std::clamp(c, lo, hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-14; }),
             cuts.end());
  double total = 0.0;
  auto g = [&](double th) { return f(th) * prior.density(th); };
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += gauss_legendre_64(g, cuts[i], cuts[i + 1]);
  return total;
}

struct Ctx {
  double R = 1.0;
  double y_w = 0.0;
  double y_f = 0.0;
  double delta = 0.5;
  double alpha = 0.5;
  double kappa = 2.0;
  Policy pol;

  double q_of(double th) const { return std::clamp(th / 2.0, pol.q_min, pol.q_max); }
  double u_w(double q, double th) const { return -(q - th) * (q - th) + y_w; }
  double u_f(double q) const { return R - q * q + y_f; }
  double s(double q, double th) const { return u_f(q) + u_w(q, th); }
  // weighted utility difference at the bargaining outcome in state th
  double w(double th) const {
    double q = q_of(th);
    double gain = s(q, th) - s(pol.q_d, th);
    double c = pol.c_d + u_w(pol.q_d, th) - u_w(q, th) + delta * gain;
    double uf = u_f(q) - c;
    double uw = u_w(q, th) + c;
    return kappa * (alpha * uf - (1.0 - alpha) * uw);
  }
};

Ctx make_ctx(const PreferencePair& prefs, const WelfareParams& params,
             double delta, const Policy& pol) {
  Ctx c;
  c.R = prefs.R();
  if (prefs.kind == PreferencePair::Kind::Quadratic) {
    c.y_w = prefs.quad.y_w;
    c.y_f = prefs.quad.y_f;
  }
  c.delta = delta;
  c.alpha = params.alpha;
  c.kappa = inequity_scale(params.alpha);
  c.pol = pol;
  return c;
}

void require_no_offsets(const PreferencePair& prefs, const char* who) {
  if (prefs.kind == PreferencePair::Kind::Quadratic &&
      (prefs.quad.y_w != 0.0 || prefs.quad.y_f != 0.0))
    throw std::invalid_argument(std::string(who) +
                                ": income offsets are not covered by the closed "
                                "forms; use solve_numeric");
}

std::string fmt_note(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

void append_note(std::string& notes, const std::string& extra) {
  if (extra.empty()) return;
  if (!notes.empty()) notes += "; ";
  notes += extra;
}

SolveReport finish_report(const PreferencePair& prefs, const WelfareParams& params,
                          double delta, const Prior& prior, Policy pol,
                          SolveBranch branch, std::string notes) {
  SolveReport rep;
  rep.policy = pol;
  rep.branch = branch;
  rep.notes = std::move(notes);
  rep.expected_welfare = expected_swf(prefs, params, pol, prior, delta);
  if (prefs.kind == PreferencePair::Kind::Quadratic &&
      params.externality == WelfareParams::Externality::Linear) {
    rep.foc_residuals = foc_residuals(prefs, params, delta, prior, pol);
  } else {
    double h = 1e-5;
    auto v_of = [&](const Policy& p) {
      return expected_swf(prefs, params, p, prior, delta);
    };
    for (int i = 0; i < 4; ++i) {
      Policy up = pol, dn = pol;
      double* fu[] = {&up.q_min, &up.q_max, &up.c_d, &up.q_d};
      double* fd[] = {&dn.q_min, &dn.q_max, &dn.c_d, &dn.q_d};
      *fu[i] += h;
      *fd[i] -= h;
      rep.foc_residuals[i] = (v_of(up) - v_of(dn)) / (2.0 * h);
    }
    append_note(rep.notes, "finite-difference residuals (non-polynomial inputs)");
  }
  return rep;
}

// ---- aligned (delta = alpha) ------------------------------------------

// root of the minimum-quality FOC with the equity term dropped (it vanishes
// when delta = alpha): integral over [support_min, 2q] of (2th - 4q + gamma)
double aligned_qmin_root(const Prior& prior, double gamma) {
  double lo = prior.support_min() / 2.0, hi = prior.support_max() / 2.0;
  if (gamma <= 0.0) return lo;
  auto h = [&](double ql) {
    return integrate_pw([&](double th) { return 2.0 * th - 4.0 * ql + gamma; },
                        prior, prior.support_min(), 2.0 * ql);
  };
  double probe = lo + 1e-9 * (hi - lo);
  if (h(hi) >= 0.0) return hi;  // externality so strong the minimum saturates
  RootResult r = bisect(h, probe, hi, 1e-13);
  return r.found ? r.x : lo;
}

// ---- delta = 0 uniform closed forms ------------------------------------

struct UniformClampMoments {
  double e_th_q = 0.0;  // E[theta * q_theta]
  double e_q2 = 0.0;    // E[q_theta^2]
};

UniformClampMoments uniform_clamp_moments(double ql, double qh) {
  UniformClampMoments m;
  double ql3 = ql * ql * ql, qh3 = qh * qh * qh;
  m.e_th_q = 2.0 * ql3 + (4.0 / 3.0) * (qh3 - ql3) +
             qh * (1.0 - 4.0 * qh * qh) / 2.0;
  m.e_q2 = 2.0 * ql3 + (2.0 / 3.0) * (qh3 - ql3) + qh * qh * (1.0 - 2.0 * qh);
  return m;
}

struct FixedPointResult {
  double ql = 0.0, qh = 0.5, qd = 0.375, cd = 0.0;
  bool converged = false;
  bool default_bound = false;  // interval clamp pinched the default quality
};

FixedPointResult delta0_fixed_point(double R, double beta, double gamma,
                                    bool force_max_corner) {
  FixedPointResult s;
  s.cd = R / 2.0 + 1.0 / 64.0;
  for (int it = 0; it < kFixedPointIters; ++it) {
    double qd_t = delta0_default_quality(s.ql, s.qh);
    double cd_t = delta0_default_transfer(qd_t, s.ql, s.qh, R);
    double A = 2.0 * cd_t - 2.0 * qd_t * qd_t - R;
    double dl = delta0_dlo_root(A, qd_t, beta, gamma);
    double dh = force_max_corner ? 0.0 : delta0_dhi_root(A, qd_t, beta, gamma);
    double ql_t = std::clamp(dl / 2.0, 0.0, qd_t);
    double qh_t = std::clamp((1.0 - dh) / 2.0, qd_t, 0.5);
    s.default_bound = (1.0 - dh) / 2.0 < qd_t - 1e-9 || dl / 2.0 > qd_t + 1e-9;
    double change = std::max({std::abs(ql_t - s.ql), std::abs(qh_t - s.qh),
                              std::abs(qd_t - s.qd), std::abs(cd_t - s.cd)});
    s.ql += kDamping * (ql_t - s.ql);
    s.qh += kDamping * (qh_t - s.qh);
    s.qd += kDamping * (qd_t - s.qd);
    s.cd += kDamping * (cd_t - s.cd);
    if (change < kCoordTol) {
      s.converged = true;
      break;
    }
  }
  s.qd = std::clamp(s.qd, s.ql, s.qh);
  return s;
}

// ---- numeric solver ------------------------------------------------------

// With quadratic preferences the inner (q_d, c_d) problem is exact: the
// weighted difference is w = kappa*(u(th) + q_d*v(th) + (1-2 delta) q_d^2
// + delta*R - c_d), so E[w]=0 pins c_d and Var[u + q_d v] is quadratic in q_d.
struct InnerSolution {
  double qd = 0.0, cd = 0.0, value = 0.0;
  double qd_target = 0.0;  // unconstrained minimizer (prior mean when flat)
  bool qd_flat = false;
};

InnerSolution inner_quadratic(const Ctx& base, const WelfareParams& params,
                              const Prior& prior, double ql, double qh) {
  Ctx ctx = base;
  ctx.pol.q_min = ql;
  ctx.pol.q_max = qh;
  double th_lo = prior.support_min(), th_hi = prior.support_max();
  std::vector<double> cuts = {std::clamp(2.0 * ql, th_lo, th_hi),
                              std::clamp(2.0 * qh, th_lo, th_hi)};
  double d = ctx.delta, a = ctx.alpha;
  auto u_fn = [&](double th) {
    double q = ctx.q_of(th);
    double g0 = a * ctx.u_f(q) - (1.0 - a) * ctx.u_w(q, th) + ctx.u_w(q, th) -
                d * ctx.s(q, th);
    return g0 + (1.0 - d) * th * th;
  };
  auto v_fn = [&](double th) { return -2.0 * (1.0 - d) * th; };
  auto eff_ext = [&](double th) {
    double q = ctx.q_of(th);
    return ctx.s(q, th) + params.gamma * q;
  };
  double base_val = integrate_pw(eff_ext, prior, th_lo, th_hi, cuts);
  double Eu = integrate_pw(u_fn, prior, th_lo, th_hi, cuts);
  double Ev = integrate_pw(v_fn, prior, th_lo, th_hi, cuts);
  double Euu = integrate_pw([&](double th) { double x = u_fn(th); return x * x; },
                            prior, th_lo, th_hi, cuts);
  double Euv = integrate_pw([&](double th) { return u_fn(th) * v_fn(th); },
                            prior, th_lo, th_hi, cuts);
  double Evv = integrate_pw([&](double th) { double x = v_fn(th); return x * x; },
                            prior, th_lo, th_hi, cuts);
  double var_u = Euu - Eu * Eu;
  double cov_uv = Euv - Eu * Ev;
  double var_v = Evv - Ev * Ev;

  InnerSolution out;
  Moments m = prior_moments(prior);
  if (params.beta <= 0.0 || var_v <= 1e-14) {
    // flat direction: welfare does not move with q_d
    out.qd_target = m.mu1;
    out.qd = std::clamp(out.qd_target, ql, qh);
    out.qd_flat = true;
    out.value = base_val;
    if (params.beta > 0.0) {
      double var = var_u + 2.0 * out.qd * cov_uv + out.qd * out.qd * var_v;
      out.value -= params.beta * ctx.kappa * ctx.kappa * var;
    }
  } else {
    out.qd_target = -cov_uv / var_v;
    out.qd = std::clamp(out.qd_target, ql, qh);
    double var = var_u + 2.0 * out.qd * cov_uv + out.qd * out.qd * var_v;
    out.value = base_val - params.beta * ctx.kappa * ctx.kappa * var;
  }
  out.cd = Eu + out.qd * Ev + (1.0 - 2.0 * d) * out.qd * out.qd + d * ctx.R -
           ctx.y_w + d * (ctx.y_w + ctx.y_f);
  return out;
}

SolveReport numeric_quadratic(const PreferencePair& prefs,
                              const WelfareParams& params, double delta,
                              const Prior& prior) {
  Ctx base = make_ctx(prefs, params, delta, Policy{});
  double th_lo = prior.support_min(), th_hi = prior.support_max();
  double lo = th_lo / 2.0, hi = th_hi / 2.0;
  // the maximum may sit above support_max/2 purely to host the default
  double hi2 = std::max(hi, th_hi);
  auto clamp_pair = [&](double a, double b) {
    if (b < a) std::swap(a, b);
    a = std::clamp(a, lo, hi);
    b = std::clamp(b, a, hi2);
    return std::make_pair(a, b);
  };
  auto value_of = [&](double ql, double qh) {
    auto [a, b] = clamp_pair(ql, qh);
    return inner_quadratic(base, params, prior, a, b).value;
  };

  int n_starts = 16;
  std::vector<NelderMeadResult> results(n_starts);
  std::vector<std::pair<double, double>> starts(n_starts);
  SplitMix64 rng(kDefaultSeed);
  for (int i = 0; i < n_starts; ++i) {
    double a = rng.uniform(lo, hi), b = rng.uniform(lo, hi2);
    starts[i] = {std::min(a, b), std::max(a, b)};
  }
  parallel_for(n_starts, [&](int i) {
    auto f = [&](const std::vector<double>& x) { return -value_of(x[0], x[1]); };
    results[i] = nelder_mead(f, {starts[i].first, starts[i].second},
                             0.1 * (hi - lo) + 1e-3);
  });
  double best_ql = lo, best_qh = hi, best_v = value_of(lo, hi);
  for (const auto& r : results) {
    auto [ql, qh] = clamp_pair(r.x[0], r.x[1]);
    double v = -r.fval;
    if (v > best_v + 1e-13 ||
        (std::abs(v - best_v) <= 1e-13 &&
         std::make_pair(ql, qh) < std::make_pair(best_ql, best_qh))) {
      best_v = v;
      best_ql = ql;
      best_qh = qh;
    }
  }
  for (int round = 0; round < 3; ++round) {
    double width = (hi - lo) * (round == 0 ? 0.25 : 0.02);
    double a0 = std::max(lo, best_ql - width), a1 = std::min(best_qh, best_ql + width);
    best_ql = golden_min([&](double x) { return -value_of(x, best_qh); }, a0, a1);
    double b0 = std::max(best_ql, best_qh - width), b1 = std::min(hi2, best_qh + width);
    best_qh = golden_min([&](double x) { return -value_of(best_ql, x); }, b0, b1);
  }
  best_v = value_of(best_ql, best_qh);
  // canonical corners: snap to the support edges, or to the default-hosting
  // maximum max(support_max/2, q_d), whenever welfare is unchanged
  if (value_of(lo, best_qh) >= best_v - 1e-11) best_ql = lo;
  {
    InnerSolution probe = inner_quadratic(base, params, prior, best_ql, best_qh);
    double qh_c = std::clamp(std::max(hi, probe.qd_target), best_ql, hi2);
    if (value_of(best_ql, qh_c) >= best_v - 1e-11) best_qh = qh_c;
  }

  InnerSolution in = inner_quadratic(base, params, prior, best_ql, best_qh);
  Policy pol{best_ql, best_qh, in.qd, in.cd};
  std::string notes = "numeric: 16-start simplex over the interval, exact inner default";
  if (in.qd_flat && params.beta <= 0.0)
    append_note(notes, "beta=0: default contract does not affect welfare (flat direction)");
  else if (in.qd_flat)
    append_note(notes,
                "delta=1: only c_d + q_d^2 is pinned; representative default reported");
  return finish_report(prefs, params, delta, prior, pol, SolveBranch::Numeric,
                       std::move(notes));
}

SolveReport numeric_general(const PreferencePair& prefs, const WelfareParams& params,
                            double delta, const Prior& prior) {
  double th_lo = prior.support_min(), th_hi = prior.support_max();
  double lo = std::min(0.0, th_lo / 2.0), hi = std::max(1.0, th_hi / 2.0);
  if (prefs.kind == PreferencePair::Kind::Tabulated) {
    lo = std::max(lo, prefs.tab.q_grid.front());
    hi = std::min(hi, prefs.tab.q_grid.back());
  }
  double R = prefs.R();
  auto unpack = [&](const std::vector<double>& x) {
    Policy p;
    p.q_min = std::clamp(std::min(x[0], x[1]), lo, hi);
    p.q_max = std::clamp(std::max(x[0], x[1]), p.q_min, hi);
    p.q_d = p.q_min + std::clamp(x[2], 0.0, 1.0) * (p.q_max - p.q_min);
    p.c_d = std::clamp(x[3], -2.0 * std::abs(R) - 1.0, 2.0 * std::abs(R) + 1.0);
    return p;
  };
  auto objective = [&](const std::vector<double>& x) {
    return -expected_swf(prefs, params, unpack(x), prior, delta);
  };
  int n_starts = 16;
  std::vector<NelderMeadResult> results(n_starts);
  SplitMix64 rng(kDefaultSeed);
  std::vector<std::vector<double>> starts(n_starts);
  for (int i = 0; i < n_starts; ++i)
    starts[i] = {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(),
                 rng.uniform(-std::abs(R), std::abs(R))};
  parallel_for(n_starts, [&](int i) {
    results[i] = nelder_mead(objective, starts[i], 0.1, 1e-12, 2000);
  });
  size_t best = 0;
  for (size_t i = 1; i < results.size(); ++i)
    if (results[i].fval < results[best].fval - 1e-13) best = i;
  std::vector<double> x = results[best].x;
  for (int round = 0; round < 2; ++round)
    for (int k = 0; k < 4; ++k) {
      auto f1 = [&](double t) {
        std::vector<double> y = x;
        y[k] = t;
        return objective(y);
      };
      double span = k == 3 ? 0.5 : 0.1;
      x[k] = golden_min(f1, x[k] - span, x[k] + span);
    }
  Policy pol = unpack(x);
  return finish_report(prefs, params, delta, prior, pol, SolveBranch::Numeric,
                       "numeric: 16-start simplex over all four coordinates");
}

SolveReport solve_degenerate(const PreferencePair& prefs, const WelfareParams& params,
                             double delta, const Prior& prior) {
  Moments m = prior_moments(prior);
  double th0 = m.mu1;
  Ctx ctx = make_ctx(prefs, params, delta, Policy{});
  double q_star = th0 / 2.0;
  double q_d = th0;
  double a = params.alpha;
  double gain = ctx.s(q_star, th0) - ctx.s(q_d, th0);
  double c_target = a * ctx.u_f(q_star) - (1.0 - a) * ctx.u_w(q_star, th0);
  double c_d = c_target - ctx.u_w(q_d, th0) + ctx.u_w(q_star, th0) - delta * gain;
  Policy pol{std::min(q_star, q_d), std::max(q_star, q_d), q_d, c_d};
  return finish_report(prefs, params, delta, prior, pol, SolveBranch::Numeric,
                       "degenerate prior: single-state optimum pinned at the atom");
}

}  // namespace

const char* to_string(SolveBranch b) {
  switch (b) {
    case SolveBranch::ClosedFormDelta0: return "closed_form_delta0";
    case SolveBranch::ClosedFormAligned: return "closed_form_aligned";
    case SolveBranch::ClosedFormDelta1: return "closed_form_delta1";
    case SolveBranch::Numeric: return "numeric";
  }
  return "unknown";
}

double delta0_default_quality(double q_min, double q_max) {
  double l3 = q_min * q_min * q_min, h3 = q_max * q_max * q_max;
  return (1.0 + 2.0 * q_max - 8.0 * (1.0 - q_max) * h3 + 8.0 * (1.0 - q_min) * l3) /
         4.0;
}

double delta0_default_transfer(double q_d, double q_min, double q_max, double R) {
  UniformClampMoments m = uniform_clamp_moments(q_min, q_max);
  return R / 2.0 + q_d * q_d - q_d +
         (1.0 / 3.0 + 2.0 * m.e_th_q - 2.0 * m.e_q2) / 2.0;
}

double delta0_dlo_root(double A, double q_d, double beta, double gamma) {
  double a = (8.0 / 3.0) * beta * q_d;
  double b = 1.0 + 2.0 * beta * A;
  if (a <= 1e-14) {
    if (gamma <= 0.0 || b <= 0.0) return 0.0;
    return gamma / b;
  }
  double disc = b * b + 4.0 * a * gamma;
  return std::max(0.0, (-b + std::sqrt(disc)) / (2.0 * a));
}

double delta0_dhi_root(double A, double q_d, double beta, double gamma) {
  double a = 2.0 * beta * (1.0 - (4.0 / 3.0) * q_d);
  double b = 1.0 + 2.0 * beta * (A + 4.0 * q_d - 1.5);
  if (a <= 1e-14) {
    if (gamma > 0.0 && b < 0.0) return -gamma / b;
    return 0.0;
  }
  if (gamma <= 0.0) return std::max(0.0, -b / a);
  if (b >= 0.0) return 0.0;
  double disc = b * b - 4.0 * a * gamma;
  if (disc < 0.0) return 0.0;
  return (-b + std::sqrt(disc)) / (2.0 * a);  // the larger root is the local max
}

SolveReport solve_aligned(const PreferencePair& prefs, const WelfareParams& params,
                          const Prior& prior) {
  require_quadratic_linear(prefs, params, "solve_aligned");
  require_no_offsets(prefs, "solve_aligned");
  Moments m = prior_moments(prior);
  if (m.degenerate) {
    SolveReport rep = solve_numeric(prefs, params, params.alpha, prior);
    append_note(rep.notes, "aligned moment formula undefined (degenerate prior)");
    return rep;
  }
  double R = prefs.R(), a = params.alpha;
  double q_d = (m.mu3 - m.mu1 * m.mu2) / (2.0 * (m.mu2 - m.mu1 * m.mu1));
  double c_d = a * R - a * q_d * q_d +
               (1.0 - a) * (q_d * q_d - 2.0 * q_d * m.mu1 + m.mu2);
  double q_min = aligned_qmin_root(prior, params.gamma);
  std::string notes;
  if (q_min > q_d) {
    q_min = q_d;
    append_note(notes, "externality saturates the minimum at the default quality");
  }
  double q_max = prior.support_max() / 2.0;
  if (q_max < q_d) {
    q_max = q_d;
    append_note(notes, "maximum non-binding; reported at the default quality");
  } else {
    append_note(notes, "maximum non-binding; reported at support_max/2");
  }
  Policy pol{q_min, q_max, q_d, c_d};
  return finish_report(prefs, params, params.alpha, prior, pol,
                       SolveBranch::ClosedFormAligned, std::move(notes));
}

SolveReport solve_firm_control(const PreferencePair& prefs,
                               const WelfareParams& params, const Prior& prior) {
  require_quadratic_linear(prefs, params, "solve_firm_control");
  require_no_offsets(prefs, "solve_firm_control");
  if (prior.family != Prior::Family::Uniform01)
    throw std::invalid_argument(
        "solve_firm_control: closed forms are specific to the Uniform01 prior");
  double R = prefs.R(), beta = params.beta, gamma = params.gamma;

  if (gamma <= 0.0 && beta <= 2.0) {
    Policy pol{0.0, 0.5, 0.375, R / 2.0 + 1.0 / 64.0};
    return finish_report(prefs, params, 0.0, prior, pol,
                         SolveBranch::ClosedFormDelta0,
                         "interval constraints slack (below the equity threshold)");
  }

  FixedPointResult fp = delta0_fixed_point(R, beta, gamma, false);
  std::string notes = "coupled system solved by damped fixed point";
  if (!fp.converged) {
    SolveReport rep = solve_numeric(prefs, params, 0.0, prior);
    append_note(rep.notes, "fixed point did not converge; numeric fallback");
    return rep;
  }
  if (fp.default_bound) {
    // the interval wants to pinch the default quality, so the interior
    // first-order system stops describing the optimum
    SolveReport rep = solve_numeric(prefs, params, 0.0, prior);
    append_note(rep.notes,
                "delegation bound binds the default quality; numeric solve");
    return rep;
  }
  if (gamma > 0.0 && fp.qh < 0.5 - 1e-12) {
    // an interior maximum root appeared; compare against the corner branch
    FixedPointResult corner = delta0_fixed_point(R, beta, gamma, true);
    if (corner.converged) {
      Policy p_int{fp.ql, fp.qh, fp.qd, fp.cd};
      Policy p_cor{corner.ql, corner.qh, corner.qd, corner.cd};
      double v_int = expected_swf(prefs, params, p_int, prior, 0.0);
      double v_cor = expected_swf(prefs, params, p_cor, prior, 0.0);
      if (v_cor >= v_int) {
        fp = corner;
        append_note(notes, "maximum corner branch preferred");
      }
    }
  }
  if (fp.qh >= 0.5 - 1e-12)
    append_note(notes, "maximum non-binding; reported at support_max/2");
  Policy pol{fp.ql, fp.qh, fp.qd, fp.cd};
  return finish_report(prefs, params, 0.0, prior, pol,
                       SolveBranch::ClosedFormDelta0, std::move(notes));
}

SolveReport solve_worker_control(const PreferencePair& prefs,
                                 const WelfareParams& params, const Prior& prior) {
  require_quadratic_linear(prefs, params, "solve_worker_control");
  require_no_offsets(prefs, "solve_worker_control");
  double R = prefs.R(), beta = params.beta, gamma = params.gamma;
  double a = params.alpha, kappa = inequity_scale(a);
  double th_lo = prior.support_min(), th_hi = prior.support_max();
  double lo = th_lo / 2.0, hi = th_hi / 2.0;

  struct Stats { double eh, eh2, eq; };
  auto stats_at = [&](double ql) {
    ql = std::min(ql, hi);
    auto q_of = [&](double th) { return std::clamp(th / 2.0, ql, hi); };
    auto h_of = [&](double th) {
      double q = q_of(th);
      return q * q + (q - th) * (q - th);
    };
    std::vector<double> cuts = {std::clamp(2.0 * ql, th_lo, th_hi)};
    Stats s;
    s.eh = integrate_pw(h_of, prior, th_lo, th_hi, cuts);
    s.eh2 = integrate_pw([&](double th) { double h = h_of(th); return h * h; },
                         prior, th_lo, th_hi, cuts);
    s.eq = integrate_pw(q_of, prior, th_lo, th_hi, cuts);
    return s;
  };
  double eq_scale = beta * kappa * kappa * (1.0 - a) * (1.0 - a);
  auto v_of = [&](double ql) {
    Stats s = stats_at(ql);
    return (R - s.eh) + gamma * s.eq - eq_scale * (s.eh2 - s.eh * s.eh);
  };

  int n = 41;
  double best_ql = lo, best_v = v_of(lo);
  for (int i = 1; i < n; ++i) {
    double ql = lo + (hi - lo) * i / (n - 1.0);
    double v = v_of(ql);
    if (v > best_v) {
      best_v = v;
      best_ql = ql;
    }
  }
  double step = (hi - lo) / (n - 1.0);
  double g_lo = std::max(lo, best_ql - step), g_hi = std::min(hi, best_ql + step);
  double polished = golden_min([&](double x) { return -v_of(x); }, g_lo, g_hi);
  if (v_of(polished) > best_v) best_ql = polished;
  if (best_ql - lo < 1e-7) best_ql = lo;

  Stats s = stats_at(best_ql);
  double K = a * R + (1.0 - a) * s.eh;
  Moments m = prior_moments(prior);
  double q_d = std::clamp(m.mu1, best_ql, hi);
  double c_d = K - q_d * q_d;
  Policy pol{best_ql, hi, q_d, c_d};

  // FOC decomposition at the chosen minimum, by central differences per term
  double h = 1e-6;
  auto d_of = [&](auto&& term) {
    return (term(best_ql + h) - term(std::max(lo, best_ql - h))) /
           (best_ql - h < lo ? h : 2.0 * h);
  };
  double d_eff = d_of([&](double ql) { return R - stats_at(ql).eh; });
  double d_ext = d_of([&](double ql) { return gamma * stats_at(ql).eq; });
  double d_eqy = d_of([&](double ql) {
    Stats t = stats_at(ql);
    return -eq_scale * (t.eh2 - t.eh * t.eh);
  });
  std::string notes = fmt_note(
      "delta=1: default pinned only through c_d + q_d^2 = K = %.10g "
      "(from E[U_w] = U_f); firm default value F_d = -K = %.10g, per-state firm "
      "utility R - K = %.10g; representative default at the prior mean",
      K, -K, R - K);
  append_note(notes, "maximum non-binding; reported at support_max/2");
  append_note(notes, fmt_note("minimum FOC terms: efficiency %.3g, externality %.3g, "
                              "equity %.3g", d_eff, d_ext, d_eqy));
  return finish_report(prefs, params, 1.0, prior, pol,
                       SolveBranch::ClosedFormDelta1, std::move(notes));
}

SolveReport solve_numeric(const PreferencePair& prefs, const WelfareParams& params,
                          double delta, const Prior& prior) {
  if (delta < 0.0 || delta > 1.0)
    throw std::invalid_argument("solve_numeric: delta must lie in [0, 1]");
  Moments m = prior_moments(prior);
  if (m.degenerate && prefs.kind == PreferencePair::Kind::Quadratic &&
      params.externality == WelfareParams::Externality::Linear)
    return solve_degenerate(prefs, params, delta, prior);
  if (prefs.kind == PreferencePair::Kind::Quadratic &&
      params.externality == WelfareParams::Externality::Linear)
    return numeric_quadratic(prefs, params, delta, prior);
  return numeric_general(prefs, params, delta, prior);
}

SolveReport solve(const PreferencePair& prefs, const WelfareParams& params,
                  double delta, const Prior& prior) {
  if (delta < 0.0 || delta > 1.0)
    throw std::invalid_argument("solve: delta must lie in [0, 1]");
  bool closed_ok = prefs.kind == PreferencePair::Kind::Quadratic &&
                   params.externality == WelfareParams::Externality::Linear &&
                   prefs.quad.y_w == 0.0 && prefs.quad.y_f == 0.0;
  if (!closed_ok) return solve_numeric(prefs, params, delta, prior);
  Moments m = prior_moments(prior);
  if (m.degenerate) return solve_numeric(prefs, params, delta, prior);
  if (delta <= 1e-12 && prior.family == Prior::Family::Uniform01)
    return solve_firm_control(prefs, params, prior);
  if (std::abs(delta - params.alpha) <= 1e-12)
    return solve_aligned(prefs, params, prior);
  if (delta >= 1.0 - 1e-12) return solve_worker_control(prefs, params, prior);
  return solve_numeric(prefs, params, delta, prior);
}

std::array<double, 4> foc_residuals(const PreferencePair& prefs,
                                    const WelfareParams& params, double delta,
                                    const Prior& prior, const Policy& policy) {
  require_quadratic_linear(prefs, params, "foc_residuals");
  Ctx ctx = make_ctx(prefs, params, delta, policy);
  double th_lo = prior.support_min(), th_hi = prior.support_max();
  double lo_cut = std::clamp(2.0 * policy.q_min, th_lo, th_hi);
  double hi_cut = std::clamp(2.0 * policy.q_max, th_lo, th_hi);
  if (hi_cut < lo_cut) hi_cut = lo_cut;
  double beta = params.beta, gamma = params.gamma;
  double a = params.alpha, d = delta, kappa = ctx.kappa;

  std::array<double, 4> r{};
  auto d_qmin = [&](double th) {
    double sp = 2.0 * th - 4.0 * policy.q_min;
    return sp + gamma - 2.0 * beta * ctx.w(th) * kappa * (a - d) * sp;
  };
  r[0] = integrate_pw(d_qmin, prior, th_lo, lo_cut);
  auto d_qmax = [&](double th) {
    double sp = 2.0 * th - 4.0 * policy.q_max;
    return sp + gamma - 2.0 * beta * ctx.w(th) * kappa * (a - d) * sp;
  };
  r[1] = integrate_pw(d_qmax, prior, hi_cut, th_hi);
  std::vector<double> cuts = {lo_cut, hi_cut};
  r[2] = 2.0 * kappa * beta *
         integrate_pw([&](double th) { return ctx.w(th); }, prior, th_lo, th_hi,
                      cuts);
  r[3] = 2.0 * kappa * beta *
         integrate_pw(
             [&](double th) {
               return ctx.w(th) *
                      ((4.0 * d - 2.0) * policy.q_d + (2.0 - 2.0 * d) * th);
             },
             prior, th_lo, th_hi, cuts);
  return r;
}

std::pair<double, double> solve_interval_given_default(
    const PreferencePair& prefs, const WelfareParams& params, double delta,
    const Prior& prior, double q_d, double c_d) {
  double th_lo = prior.support_min(), th_hi = prior.support_max();
  double lo = std::min(th_lo / 2.0, q_d), hi = std::max(th_hi / 2.0, q_d);
  auto v_of = [&](double ql, double qh) {
    Policy p{ql, qh, q_d, c_d};
    return expected_swf(prefs, params, p, prior, delta);
  };
  auto grid_golden = [&](auto&& f, double a, double b) {
    if (b - a < 1e-12) return a;
    int n = 33;
    double best_x = a, best = f(a);
    for (int i = 1; i < n; ++i) {
      double x = a + (b - a) * i / (n - 1.0);
      double v = f(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    double step = (b - a) / (n - 1.0);
    double g = golden_min([&](double x) { return -f(x); },
                          std::max(a, best_x - step), std::min(b, best_x + step));
    return f(g) > best ? g : best_x;
  };
  double ql = grid_golden([&](double x) { return v_of(x, hi); }, lo, q_d);
  double qh = grid_golden([&](double x) { return v_of(ql, x); }, q_d, hi);
  if (ql - lo < 1e-9) ql = lo;
  if (hi - qh < 1e-9) qh = hi;
  return {ql, qh};
}

BiasReport backward_bias_check(const PreferencePair& prefs,
                               const WelfareParams& params, double delta,
                               const Prior& prior, const Contract& dflt,
                               int samples) {
  if (samples < 3) throw std::invalid_argument("backward_bias_check: samples < 3");
  require_quadratic_linear(prefs, params, "backward_bias_check");
  Ctx ctx = make_ctx(prefs, params, delta, Policy{});
  double th_lo = prior.support_min(), th_hi = prior.support_max();
  double a = params.alpha, beta = params.beta, gamma = params.gamma;
  bool closed = beta <= 0.0 || std::abs(delta - a) <= 1e-12;
  Box qb = quality_box(th_lo, th_hi);

  // pointwise regulator optimum given the default contract
  auto q_star = [&](double th) {
    if (closed) return (2.0 * th + gamma) / 4.0;
    auto obj = [&](double q) {
      double gain = ctx.s(q, th) - ctx.s(dflt.q, th);
      double c = dflt.c + ctx.u_w(dflt.q, th) - ctx.u_w(q, th) + delta * gain;
      double uf = ctx.u_f(q) - c, uw = ctx.u_w(q, th) + c;
      double w = ctx.kappa * (a * uf - (1.0 - a) * uw);
      return -(ctx.s(q, th) + gamma * q - beta * w * w);
    };
    int n = 801;
    double best_q = qb.lo, best = obj(best_q);
    double step = (qb.hi - qb.lo) / (n - 1.0);
    for (int i = 1; i < n; ++i) {
      double q = qb.lo + step * i;
      double v = obj(q);
      if (v < best) {
        best = v;
        best_q = q;
      }
    }
    double g = golden_min(obj, std::max(qb.lo, best_q - step),
                          std::min(qb.hi, best_q + step));
    return obj(g) < best ? g : best_q;
  };

  BiasReport rep;
  rep.theta.resize(samples);
  rep.t_values.resize(samples);
  rep.solved.assign(samples, true);
  std::vector<double> qs(samples);
  double h = (th_hi - th_lo) / (samples - 1.0);
  for (int i = 0; i < samples; ++i) {
    rep.theta[i] = th_lo + h * i;
    qs[i] = q_star(rep.theta[i]);
    if (!std::isfinite(qs[i])) rep.solved[i] = false;
  }
  // cumulative integral of q*(z) dG by trapezoid on the sample grid
  double cum = 0.0;
  double prev_g = qs[0] * prior.density(rep.theta[0]);
  rep.t_values[0] = prior.cdf(rep.theta[0]) * qs[0] - 0.0;
  for (int i = 1; i < samples; ++i) {
    double g_i = qs[i] * prior.density(rep.theta[i]);
    cum += 0.5 * (prev_g + g_i) * h;
    prev_g = g_i;
    rep.t_values[i] = prior.cdf(rep.theta[i]) * qs[i] - cum;
  }
  rep.t_second.resize(samples - 2);
  rep.convex = true;
  for (int i = 1; i + 1 < samples; ++i) {
    rep.t_second[i - 1] =
        (rep.t_values[i + 1] - 2.0 * rep.t_values[i] + rep.t_values[i - 1]) /
        (h * h);
    if (!rep.solved[i - 1] || !rep.solved[i] || !rep.solved[i + 1]) continue;
    if (rep.t_second[i - 1] < -1e-8) rep.convex = false;
  }
  return rep;
}

}  // namespace delreg
