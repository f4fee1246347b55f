#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "delreg/numeric.hpp"

using namespace delreg;

TEST_CASE("gauss-legendre is exact on polynomials") {
  auto f = [](double x) { return 3 * x * x * x * x * x - 2 * x * x + x - 7; };
  // antiderivative: x^6/2 - 2x^3/3 + x^2/2 - 7x
  auto F = [](double x) {
    return x * x * x * x * x * x / 2 - 2 * x * x * x / 3 + x * x / 2 - 7 * x;
  };
  CHECK(gauss_legendre_64(f, -1.3, 2.7) == doctest::Approx(F(2.7) - F(-1.3)).epsilon(1e-13));
  CHECK(gauss_legendre_64(f, 2.0, 2.0) == 0.0);
}

TEST_CASE("adaptive integrate handles kinks") {
  auto f = [](double x) { return std::abs(x - 0.3); };
  // exact: int_0^1 |x-0.3| = 0.3^2/2 + 0.7^2/2 = 0.29
  CHECK(integrate(f, 0.0, 1.0, 1e-11) == doctest::Approx(0.29).epsilon(1e-9));
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("bisection with bracket expansion") {
  auto f = [](double x) { return x * x * x - 10.0; };
  RootResult r = bisect_expand(f, 1.0, 1.5);
  REQUIRE(r.found);
  CHECK(r.x == doctest::Approx(std::cbrt(10.0)).epsilon(1e-9));
  CHECK(std::abs(r.residual) <= 1e-10);

  // no root anywhere: expansion gives up and reports the searched bracket
  RootResult none = bisect_expand([](double) { return 1.0; }, 0.0, 1.0, 1e-10, 8);
  CHECK_FALSE(none.found);
  CHECK(none.bracket_hi > none.bracket_lo);
}

TEST_CASE("golden section finds the minimum") {
  double x = golden_min([](double t) { return (t - 0.37) * (t - 0.37) + 1.0; }, -4.0, 9.0);
  CHECK(x == doctest::Approx(0.37).epsilon(1e-8));
}

TEST_CASE("nelder-mead minimizes a quadratic bowl") {
  auto f = [](const std::vector<double>& v) {
    double a = v[0] - 1.0, b = v[1] + 2.0;
    return a * a + 3 * b * b + 5.0;
  };
  NelderMeadResult r = nelder_mead(f, {0.0, 0.0}, 0.5);
  CHECK(r.fval == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-4));
}

TEST_CASE("splitmix64 is deterministic and in range") {
  SplitMix64 a(42), b(42), c(43);
  bool same = true, diff = false;
  for (int i = 0; i < 100; ++i) {
    double xa = a.uniform(), xb = b.uniform(), xc = c.uniform();
    same = same && (xa == xb);
    diff = diff || (xa != xc);
    CHECK(xa >= 0.0);
    CHECK(xa < 1.0);
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(257, [&](int i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("finite differences") {
  auto f = [](double x) { return std::sin(x); };
  CHECK(central_diff(f, 0.3, 1e-6) == doctest::Approx(std::cos(0.3)).epsilon(1e-8));
  CHECK(second_diff(f, 0.3, 1e-4) == doctest::Approx(-std::sin(0.3)).epsilon(1e-6));
}
