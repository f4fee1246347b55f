#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace delreg {

using Fn1 = std::function<double(double)>;

// 64-node Gauss-Legendre rule on [a,b]. Exact for polynomials up to degree 127.
double gauss_legendre_64(const Fn1& f, double a, double b);

// Adaptive bisection on top of the 64-node rule; abs_tol is the absolute
// error target for the whole interval.
double integrate(const Fn1& f, double a, double b, double abs_tol = 1e-9);

struct RootResult {
  bool found = false;
  double x = 0.0;
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// Bisection after expanding [lo, hi] symmetrically by doubling until the
// function changes sign (or max_expand doublings are exhausted).
RootResult bisect_expand(const Fn1& f, double lo, double hi,
                         double residual_tol = 1e-10, int max_expand = 60);

// Plain bisection on a bracket already known to change sign.
RootResult bisect(const Fn1& f, double lo, double hi,
                  double residual_tol = 1e-10);

// Golden-section minimization on [a,b]; returns argmin.
double golden_min(const Fn1& f, double a, double b, double x_tol = 1e-11);

struct NelderMeadResult {
  std::vector<double> x;
  double fval = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead simplex minimization. start must be feasible for f (finite).
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, double step,
                             double f_tol = 1e-13, int max_iter = 4000);

// splitmix64: deterministic seed expansion used everywhere randomness is
// needed; one documented seed constant keeps runs reproducible.
inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eedULL;

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed = kDefaultSeed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform in [0,1)
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

// Central finite difference of f at x.
double central_diff(const Fn1& f, double x, double h);
double second_diff(const Fn1& f, double x, double h);

// Runs fn(i) for i in [0,n) on a small thread pool; results are assembled
// in index order so the output is deterministic.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace delreg
