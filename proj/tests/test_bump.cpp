#include <cmath>

#include "core/bump.hpp"
#include "core/cube.hpp"
#include "core/error.hpp"
#include "doctest.h"

using namespace ellab;

TEST_CASE("profile values and symmetry") {
  CHECK(bump_profile(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(bump_profile(1.0) == 0.0);
  CHECK(bump_profile(-1.2) == 0.0);
  CHECK(bump_profile(0.5) == doctest::Approx(std::exp(-4.0 / 3.0)).epsilon(1e-15));
  CHECK(bump_profile(0.3) == bump_profile(-0.3));
}

TEST_CASE("profile derivatives match finite differences") {
  const double eps = 1e-6;
  for (double t : {0.0, 0.2, -0.35, 0.6, -0.8}) {
    const double fd1 =
        (bump_profile(t + eps) - bump_profile(t - eps)) / (2.0 * eps);
    CHECK(bump_profile_derivative(t, 1) ==
          doctest::Approx(fd1).epsilon(1e-6));
    const double fd2 = (bump_profile(t + eps) - 2.0 * bump_profile(t) +
                        bump_profile(t - eps)) /
                       (eps * eps);
    CHECK(bump_profile_derivative(t, 2) == doctest::Approx(fd2).epsilon(1e-4));
  }
}

TEST_CASE("profile derivative sups are stable reference values") {
  CHECK(profile_derivative_sup(0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // Oracles: dense independent scan at a different resolution.
  for (int k : {1, 2}) {
    double best = 0.0;
    for (int i = 0; i <= 333'333; ++i) {
      const double t = -1.0 + 2.0 * i / 333'333.0;
      best = std::max(best, std::abs(bump_profile_derivative(t, k)));
    }
    CHECK(profile_derivative_sup(k) == doctest::Approx(best).epsilon(1e-7));
  }
  CHECK(profile_derivative_sup(1) > 0.3);
  CHECK(profile_derivative_sup(2) > 1.0);
}

TEST_CASE("profile integral against two-interval refinement") {
  const double v = profile_integral();
  // Gauss-type oracle: trapezoid on 1e6 intervals.
  double acc = 0.0;
  const int steps = 1'000'000;
  for (int i = 0; i < steps; ++i) {
    const double a = -1.0 + 2.0 * i / steps;
    const double b = -1.0 + 2.0 * (i + 1) / steps;
    acc += 0.5 * (bump_profile(a) + bump_profile(b)) * (b - a);
  }
  CHECK(v == doctest::Approx(acc).epsilon(1e-9));
  CHECK(v > 0.4);
  CHECK(v < 0.5);
}

TEST_CASE("cutoff profile plateau and support") {
  CHECK(cutoff_profile(0.0) == 1.0);
  CHECK(cutoff_profile(0.999) == 1.0);
  CHECK(cutoff_profile(-1.0) == 1.0);
  CHECK(cutoff_profile(2.0) == 0.0);
  CHECK(cutoff_profile(-2.5) == 0.0);
  const double mid = cutoff_profile(1.5);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(cutoff_profile(1.5) == doctest::Approx(cutoff_profile(-1.5)));
  // Monotone decay on [1, 2].
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = cutoff_profile(1.0 + i / 100.0);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("standard dictionary sizes and support constraint") {
  auto base = standard_bump_dictionary(2, 2, false);
  CHECK(base.entries.size() == 21);  // width 1 keeps only the centered bump
  auto doubled = standard_bump_dictionary(2, 2, true);
  CHECK(doubled.entries.size() > base.entries.size());
  for (const auto& e : doubled.entries) {
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(e.offset[a]) + e.width <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("bump amplitude scales with width and enforces the class") {
  // Narrow bumps must pay for their steeper derivatives.
  const BumpSpec wide{1.0, {0.0, 0.0, 0.0}};
  const BumpSpec narrow{0.25, {0.0, 0.0, 0.0}};
  CHECK(bump_amplitude(wide, 2, 2) > bump_amplitude(narrow, 2, 2));
  BumpSpec bad{0.5, {0.8, 0.0, 0.0}};
  CHECK_THROWS_AS(bump_amplitude(bad, 2, 2), Error);

  Cube q({0.3, -0.2, 0.0}, 0.7, 2);
  for (const auto& e : standard_bump_dictionary(2, 2, true).entries) {
    CHECK(bump_class_ratio(e, q, 2, 400) <= 1.0 + 1e-9);
  }
  // The certificate is tight for the binding derivative order (within the
  // sampling tolerance): at least one entry uses most of its budget.
  double best = 0.0;
  for (const auto& e : standard_bump_dictionary(2, 2, true).entries) {
    best = std::max(best, bump_class_ratio(e, q, 2, 400));
  }
  CHECK(best > 0.9);
}

TEST_CASE("bump values vanish outside support and scale with the cube") {
  BumpSpec s{0.5, {0.5, 0.0, 0.0}};
  Cube q({0.0, 0.0, 0.0}, 1.0, 2);
  CHECK(bump_value(s, q, 2, {-0.25, 0.0, 0.0}) == 0.0);  // outside support
  CHECK(bump_value(s, q, 2, {0.5, 0.0, 0.0}) > 0.0);     // at bump center
  // Same relative point in a scaled cube gives the same value (amplitude is
  // scale-free for the sup constraint; derivative constraints scale too).
  Cube big({0.0, 0.0, 0.0}, 4.0, 2);
  CHECK(bump_value(s, big, 2, {2.0, 0.0, 0.0}) ==
        doctest::Approx(bump_value(s, q, 2, {0.5, 0.0, 0.0})).epsilon(1e-13));
}
