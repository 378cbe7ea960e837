#include <cmath>

#include "core/error.hpp"
#include "core/field.hpp"
#include "doctest.h"

using namespace ellab;

namespace {

ScalarField fill_scalar(const GridSpec& g, double (*f)(double, double)) {
  ScalarField s(g);
  for (long i = 0; i < g.node_count(); ++i) {
    auto p = g.node_point(i);
    s.v[i] = f(p[0], p[1]);
  }
  return s;
}

}  // namespace

TEST_CASE("multilinear sampling reproduces nodes and affine fields") {
  GridSpec g(Cube({0.0, 0.0, 0.0}, 1.0, 2), 9);
  ScalarField s = fill_scalar(g, [](double x, double y) { return 2 * x - y; });
  double out = 0.0;
  sample_at(g, s.v, 1, g.node_point({3, 5, 0}), &out);
  CHECK(out == doctest::Approx(2 * g.node_point({3, 5, 0})[0] -
                               g.node_point({3, 5, 0})[1])
                   .epsilon(1e-14));
  sample_at(g, s.v, 1, {0.13, -0.41, 0.0}, &out);
  CHECK(out == doctest::Approx(2 * 0.13 + 0.41).epsilon(1e-12));
  CHECK_THROWS_AS(sample_at(g, s.v, 1, {1.5, 0.0, 0.0}, &out), Error);
}

TEST_CASE("resample between aligned grids is exact for bilinear data") {
  GridSpec coarse(Cube({0.0, 0.0, 0.0}, 1.0, 2), 9);
  GridSpec fine(Cube({0.0, 0.0, 0.0}, 1.0, 2), 17);
  ScalarField s = fill_scalar(coarse, [](double x, double y) { return x * y; });
  ScalarField r = resample(s, fine);
  for (long i = 0; i < fine.node_count(); ++i) {
    auto p = fine.node_point(i);
    CHECK(r.v[i] == doctest::Approx(p[0] * p[1]).epsilon(1e-13));
  }
}

TEST_CASE("mean over a cube uses midpoint quadrature") {
  // For f(x) = x^2 on [-1, 1]^2 the rule evaluates the multilinear
  // interpolant at each cell centroid; per cell that equals the midpoint
  // value plus h^2/4, so the mean is exactly 1/3 + h^2/6 and converges to
  // the continuum mean at rate h^2.
  Cube dom({0.0, 0.0, 0.0}, 1.0, 2);
  auto defect = [&](int m) {
    GridSpec g(dom, m);
    ScalarField s = fill_scalar(g, [](double x, double) { return x * x; });
    return mean_over(s, dom) - 1.0 / 3.0;
  };
  const double d9 = defect(9);
  const double d17 = defect(17);
  GridSpec g9(dom, 9);
  CHECK(d9 == doctest::Approx(g9.h() * g9.h() / 6.0).epsilon(1e-10));
  CHECK(std::abs(d9 / d17) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("mean over a subcube counts only its own cells") {
  GridSpec g(Cube({0.0, 0.0, 0.0}, 1.0, 2), 9);
  ScalarField s = fill_scalar(g, [](double x, double) { return x < 0 ? -1.0 : 1.0; });
  // Left quarter: every corner of every contributing cell has x < 0.
  CHECK(mean_over(s, Cube({-0.75, 0.0, 0.0}, 0.25, 2)) ==
        doctest::Approx(-1.0));
  Cube tiny({0.9, 0.9, 0.0}, 1e-4, 2);
  CHECK_THROWS_AS(mean_over(ScalarField(g), tiny), Error);
}

TEST_CASE("vector mean and oscillation") {
  GridSpec g(Cube({0.0, 0.0, 0.0}, 1.0, 2), 17);
  VectorField f(g);
  for (long i = 0; i < g.node_count(); ++i) {
    auto p = g.node_point(i);
    f.at(i)[0] = 3.0;
    f.at(i)[1] = p[0];
  }
  auto m = mean_over(f, g.domain);
  CHECK(m[0] == doctest::Approx(3.0));
  CHECK(m[1] == doctest::Approx(0.0).epsilon(1e-12));
  // Var of x over midpoint samples: h^2/12 less than 1/3.
  const double expect = std::sqrt(1.0 / 3.0 - g.h() * g.h() / 12.0);
  CHECK(oscillation_l2(f, g.domain) == doctest::Approx(expect).epsilon(1e-10));
  // Constant field has zero oscillation.
  VectorField c(g);
  for (long i = 0; i < g.node_count(); ++i) c.at(i)[0] = 2.5;
  CHECK(oscillation_l2(c, g.domain) == doctest::Approx(0.0));
}

TEST_CASE("power mean interpolates between norms") {
  GridSpec g(Cube({0.0, 0.0, 0.0}, 1.0, 2), 17);
  ScalarField s(g);
  for (long i = 0; i < g.node_count(); ++i) s.v[i] = 2.0;
  for (double q : {0.8, 1.0, 2.0, 2.25}) {
    CHECK(power_mean(s, g.domain, q) == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(power_mean(s, g.domain, 0.0), Error);
}

TEST_CASE("holder seminorm of x is the diameter power") {
  Cube dom({0.0, 0.0, 0.0}, 1.0, 2);
  GridSpec g(dom, 17);
  ScalarField s = fill_scalar(g, [](double x, double) { return x; });
  // sup |x1 - y1| / |x - y|^alpha over the grid: maximized along axis pairs,
  // giving side / side^alpha = side^(1-alpha); for alpha = 1 it is 1.
  CHECK(holder_seminorm(s, 1.0, dom) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(holder_seminorm(s, 0.5, dom) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // Scaling law: f(x) = sqrt distance profile has seminorm independent of
  // grid resolution for matched endpoints.
  ScalarField c(g);
  for (auto& x : c.v) x = 7.0;
  CHECK(holder_seminorm(c, 0.5, dom) == doctest::Approx(0.0));
}

TEST_CASE("holder seminorm sampled path still finds short-range peaks") {
  Cube dom({0.0, 0.0, 0.0}, 1.0, 2);
  GridSpec g(dom, 65);  // 4225 nodes: beyond the exhaustive pair budget
  ScalarField s(g);
  // A single spike: its neighbors give the largest quotient, which the
  // short-range window must catch exactly.
  s.v[g.node_index({32, 32, 0})] = 1.0;
  const double expect = 1.0 / std::pow(g.h(), 0.5);
  CHECK(holder_seminorm(s, 0.5, dom) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("probe directions are unit vectors with expected counts") {
  const auto& d2 = probe_directions(2);
  CHECK(d2.size() == 64);
  const auto& d3 = probe_directions(3);
  CHECK(d3.size() == 182);
  for (const auto& v : d3) {
    CHECK(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("operator norm matches closed form for 2x2") {
  // A = [[3, 1], [0, 2]]: A^T A = [[9, 3], [3, 5]], eigenvalues 7 +- sqrt(13).
  const double a[4] = {3.0, 1.0, 0.0, 2.0};
  CHECK(operator_norm(a, 2) ==
        doctest::Approx(std::sqrt(7.0 + std::sqrt(13.0))).epsilon(1e-13));
  CHECK(smallest_singular_value(a, 2) ==
        doctest::Approx(std::sqrt(7.0 - std::sqrt(13.0))).epsilon(1e-13));
  const double id3[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  CHECK(operator_norm(id3, 3) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(smallest_singular_value(id3, 3) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("ellipticity check accepts the window and rejects violations") {
  GridSpec g(Cube({0.0, 0.0, 0.0}, 1.0, 2), 9);
  MatrixField a(g);
  for (long i = 0; i < g.node_count(); ++i) {
    double* m = a.at(i);
    m[0] = 2.0;
    m[1] = 0.5;
    m[2] = -0.5;  // antisymmetric part is invisible to the quadratic form
    m[3] = 2.0;
  }
  // Quadratic form is exactly 2 in every direction; operator norm is
  // sqrt(4.25) ~ 2.0616.
  auto coef = ellipticity_check(a, 1.0, 3.0);
  CHECK(coef.lambda == 1.0);
  CHECK_THROWS_AS(ellipticity_check(a, 2.5, 3.0), EllipticityError);
  CHECK_THROWS_AS(ellipticity_check(a, 1.0, 2.0), EllipticityError);
  try {
    ellipticity_check(a, 2.5, 3.0);
  } catch (const EllipticityError& e) {
    CHECK(e.margin() < 0.0);
    CHECK(e.node() >= 0);
  }
  CHECK(spectrum_in_range(a, 2.0, 2.1));
  CHECK(!spectrum_in_range(a, 2.1, 3.0));
}
