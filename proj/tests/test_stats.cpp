#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "slabperc/geometry.hpp"
#include "slabperc/rng.hpp"
#include "slabperc/stats.hpp"

using namespace slabperc;

TEST_CASE("Wilson interval") {
  const Interval all = wilson_interval(10, 10);
  CHECK(all.hi == 1.0);
  CHECK(all.lo < 1.0);
  const Interval none = wilson_interval(0, 10);
  CHECK(none.lo == 0.0);
  CHECK(none.hi > 0.0);
  // Reference value: 50 of 100 at z = 1.96 gives [0.4038, 0.5962].
  const Interval half = wilson_interval(50, 100);
  CHECK(half.lo == doctest::Approx(0.40383).epsilon(1e-4));
  CHECK(half.hi == doctest::Approx(0.59617).epsilon(1e-4));
  CHECK(half.contains(0.5));
  CHECK(half.half_width() == doctest::Approx(0.0962).epsilon(1e-3));
  CHECK_THROWS_AS(wilson_interval(0, 0), DomainError);
}

TEST_CASE("Wilson interval covers at the nominal rate") {
  CounterRng rng(2024);
  for (double p : {0.05, 0.3, 0.5}) {
    int covered = 0;
    const int reps = 1000;
    const int n = 200;
    for (int r = 0; r < reps; ++r) {
      int s = 0;
      for (int i = 0; i < n; ++i) s += rng.uniform() < p;
      covered += wilson_interval(s, n).contains(p);
    }
    CHECK(covered >= 930);
  }
}

TEST_CASE("proportion standard error stays positive") {
  CHECK(proportion_se(0, 100) > 0.0);
  CHECK(proportion_se(100, 100) > 0.0);
  CHECK(proportion_se(50, 100) == doctest::Approx(std::sqrt(0.25 / 100)).epsilon(0.02));
}

TEST_CASE("weighted line fit") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 - 0.5 * v);
  const std::vector<double> s(5, 0.1);
  const LineFit f = weighted_line_fit(x, y, s);
  CHECK(f.slope == doctest::Approx(-0.5));
  CHECK(f.intercept == doctest::Approx(2.0));
  CHECK(f.chi2 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(f.dof == 3);
  // Unscaled slope error for equal sigma: sigma / sqrt(sum (x - mean)^2).
  CHECK(f.slope_se == doctest::Approx(0.1 / std::sqrt(10.0)));

  const std::vector<double> noisy{1.9, 1.0, 0.6, -0.1, -0.4};
  const LineFit g = weighted_line_fit(x, noisy, s);
  CHECK(g.chi2 > 0.0);
  CHECK(g.slope_se >= f.slope_se);

  CHECK_THROWS_AS(weighted_line_fit(std::vector<double>{1}, std::vector<double>{1},
                                    std::vector<double>{1}),
                  DomainError);
  CHECK_THROWS_AS(weighted_line_fit(x, y, std::vector<double>{1, 1, 0, 1, 1}), DomainError);
}
