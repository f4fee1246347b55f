#include "delreg/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace delreg {

namespace {

struct GL64 {
  std::array<double, 64> x{};  // nodes on (-1,1)
  std::array<double, 64> w{};
  GL64() {
    // Newton iteration on the Legendre polynomial P_64.
    const int n = 64;
    for (int i = 0; i < n / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        double z1 = z;
        z = z1 - p0 / pp;
        if (std::abs(z - z1) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
};

const GL64& gl64() {
  static const GL64 rule;
  return rule;
}

double integrate_rec(const Fn1& f, double a, double b, double whole,
                     double tol, int depth) {
  double m = 0.5 * (a + b);
  double left = gauss_legendre_64(f, a, m);
  double right = gauss_legendre_64(f, m, b);
  if (std::abs(left + right - whole) <= tol || depth >= 24)
    return left + right;
  return integrate_rec(f, a, m, left, tol / 2, depth + 1) +
         integrate_rec(f, m, b, right, tol / 2, depth + 1);
}

}  // namespace

double gauss_legendre_64(const Fn1& f, double a, double b) {
  if (!(b > a)) return 0.0;
  const GL64& g = gl64();
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 64; ++i) acc += g.w[i] * f(mid + half * g.x[i]);
  return acc * half;
}

double integrate(const Fn1& f, double a, double b, double abs_tol) {
  if (!(b > a)) return 0.0;
  double whole = gauss_legendre_64(f, a, b);
  return integrate_rec(f, a, b, whole, abs_tol, 0);
}

RootResult bisect(const Fn1& f, double lo, double hi, double residual_tol) {
  RootResult r;
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {true, lo, 0.0, lo, hi};
  if (fhi == 0.0) return {true, hi, 0.0, lo, hi};
  if ((flo > 0) == (fhi > 0)) return r;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (std::abs(fm) <= residual_tol || (hi - lo) < 1e-15 * (1 + std::abs(mid))) {
      r.found = true;
      r.x = mid;
      r.residual = fm;
      return r;
    }
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  r.found = true;
  r.x = 0.5 * (lo + hi);
  r.residual = f(r.x);
  return r;
}

RootResult bisect_expand(const Fn1& f, double lo, double hi,
                         double residual_tol, int max_expand) {
  if (hi < lo) std::swap(lo, hi);
  if (hi == lo) hi = lo + 1e-6;
  double flo = f(lo), fhi = f(hi);
  int n = 0;
  while ((flo > 0) == (fhi > 0) && flo != 0.0 && fhi != 0.0 && n < max_expand) {
    double width = hi - lo;
    lo -= width;
    hi += width;
    flo = f(lo);
    fhi = f(hi);
    ++n;
  }
  if ((flo > 0) == (fhi > 0) && flo != 0.0 && fhi != 0.0) {
    RootResult r;
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    return r;
  }
  RootResult r = bisect(f, lo, hi, residual_tol);
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  return r;
}

double golden_min(const Fn1& f, double a, double b, double x_tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while ((b - a) > x_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, double step,
                             double f_tol, int max_iter) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  NelderMeadResult out;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    // order
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> np(n + 1);
    std::vector<double> nf(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      np[i] = pts[idx[i]];
      nf[i] = fv[idx[i]];
    }
    pts.swap(np);
    fv.swap(nf);
    if (std::abs(fv[n] - fv[0]) <= f_tol * (1.0 + std::abs(fv[0]))) {
      out.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / n;
    auto mix = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j)
        p[j] = centroid[j] + t * (pts[n][j] - centroid[j]);
      return p;
    };
    std::vector<double> xr = mix(-1.0);
    double fr = f(xr);
    if (fr < fv[0]) {
      std::vector<double> xe = mix(-2.0);
      double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
    } else {
      std::vector<double> xc = mix(fr < fv[n] ? -0.5 : 0.5);
      double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        pts[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  out.x = pts[best];
  out.fval = fv[best];
  out.iterations = iter;
  return out;
}

double central_diff(const Fn1& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double second_diff(const Fn1& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int workers = std::max(1, std::min<int>(n, hw ? static_cast<int>(hw) : 4));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace delreg
