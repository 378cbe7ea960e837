#include <cmath>

#include "core/bump.hpp"
#include "core/error.hpp"
#include "core/iterate.hpp"
#include "core/solver.hpp"
#include "doctest.h"

using namespace ellab;

namespace {

CoefficientField constant_coefficient(const GridSpec& g, double a11,
                                      double a12, double a22) {
  MatrixField a(g);
  for (long i = 0; i < g.node_count(); ++i) {
    double* m = a.at(i);
    m[0] = a11;
    m[1] = a12;
    m[2] = a12;
    m[3] = a22;
  }
  const double tr = a11 + a22;
  const double disc = std::sqrt((a11 - a22) * (a11 - a22) + 4.0 * a12 * a12);
  return ellipticity_check(a, 0.5 * (tr - disc) - 1e-9,
                           0.5 * (tr + disc) + 1e-9);
}

CoefficientField smooth_coefficient(const GridSpec& g, double amp) {
  MatrixField a(g);
  for (long i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_point(i);
    double* m = a.at(i);
    const double off = 0.5 * amp * std::sin(p[0] + p[1]);
    m[0] = 1.0 + amp * std::sin(1.3 * p[0]) * std::cos(0.7 * p[1]);
    m[1] = off;
    m[2] = off;
    m[3] = 1.0 + amp * std::cos(0.9 * p[0]) * std::sin(1.1 * p[1]);
  }
  return ellipticity_check(a, 1.0 - 1.6 * amp, 1.0 + 1.6 * amp);
}

VectorField smooth_datum(const GridSpec& g) {
  VectorField f(g);
  for (long i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_point(i);
    f.at(i)[0] = std::cos(1.7 * p[0] + 0.3 * p[1] + 0.5);
    f.at(i)[1] = std::sin(0.8 * p[0] - 1.2 * p[1]) + 0.4;
  }
  return f;
}

MatrixField smooth_multiplier(const GridSpec& g) {
  MatrixField b(g);
  for (long i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_point(i);
    double* m = b.at(i);
    m[0] = 1.0 + 0.2 * std::sin(p[0] + p[1]);
    m[1] = 0.15 * std::cos(p[0]);
    m[2] = 0.1 * std::sin(p[1] - p[0]);
    m[3] = 0.9 + 0.1 * std::cos(2.0 * p[0]);
  }
  return b;
}

// The peak-one bump of q as a scalar multiple of the identity matrix.
MatrixField bump_multiplier(const GridSpec& g, const Cube& q) {
  MatrixField b(g);
  const double amp = std::pow(bump_profile(0.0), -q.n);
  const double inv = 1.0 / q.side();
  for (long i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_point(i);
    double psi = amp;
    for (int a = 0; a < q.n; ++a) {
      psi *= bump_profile((p[a] - q.center[a]) * inv);
    }
    double* m = b.at(i);
    m[0] = psi;
    m[3] = psi;
  }
  return b;
}

// Discrete solution of the homogeneous equation driven by smooth boundary
// data, so that every interior test gradient pairs to zero against A grad u.
ScalarField boundary_driven_solution(const CoefficientField& a, double tol) {
  const GridSpec& g = a.base.spec;
  ScalarField trace(g);
  for (long i = 0; i < g.node_count(); ++i) {
    const auto p = g.node_point(i);
    trace.v[i] = std::sin(1.1 * p[0] + 0.4) + 0.6 * std::cos(0.9 * p[1] - 0.2) +
                 0.3 * p[0] * p[1];
  }
  EllipticProblem prob{a, VectorField(g), BoundaryCondition::inherited(trace)};
  return solve_dirichlet(prob, tol).u;
}

template <typename F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;  // sentinel: nothing thrown
}

}  // namespace

TEST_CASE("sharp split recombines a boundary-driven solution") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(dilate(q0, 3.0), 97);
  const CoefficientField a = smooth_coefficient(g, 0.3);
  const ScalarField u = boundary_driven_solution(a, 1e-12);
  const VectorField datum = smooth_datum(g);
  const MatrixField b = smooth_multiplier(g);

  const PairingSplit split =
      pairing_split(a, u, b, datum, q0, SplitVariant::lq, 1e-12);
  CHECK(split.variant == SplitVariant::lq);
  CHECK(split.cubes.size() == 64);
  CHECK(split.direct != 0.0);
  // Measured ~4.6e-13; the identity closes to solver tolerance.
  CHECK(split.recombination_error() < 1e-11);

  for (const SplitCube& c : split.cubes) {
    CHECK(c.defect > 0.0);
    CHECK(c.p.half_side == doctest::Approx(q0.half_side / 8.0));
    CHECK(contains_cube(q0, c.p, 1e-12));
    // Correction data live on the tripled-subcube grid.
    CHECK(c.t_grad.spec.m == 13);
    CHECK(c.t_grad.spec.domain.half_side ==
          doctest::Approx(3.0 * c.p.half_side));
    CHECK(c.defect_grad.spec.m == 13);
  }
}

TEST_CASE("smooth split recombines under partition-of-unity weights") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(dilate(q0, 4.0), 145);
  const CoefficientField a = smooth_coefficient(g, 0.25);
  const ScalarField u = boundary_driven_solution(a, 1e-12);
  const VectorField datum = smooth_datum(g);
  const MatrixField b = bump_multiplier(g, q0);

  const PairingSplit split =
      pairing_split(a, u, b, datum, q0, SplitVariant::holder, 1e-12);
  CHECK(split.cubes.size() == 729);
  CHECK(split.direct != 0.0);
  // Measured ~3.9e-13; the partition-of-unity weights sum to one at every
  // node the masked cells touch, so the telescoping is exact.
  CHECK(split.recombination_error() < 1e-11);

  const Cube q3 = dilate(q0, 3.0);
  for (size_t k = 0; k < split.cubes.size(); k += 73) {
    const SplitCube& c = split.cubes[k];
    CHECK(c.p.half_side == doctest::Approx(q3.half_side / 27.0));
    CHECK(contains_cube(q3, c.p, 1e-12));
    CHECK(c.t_grad.spec.m == 13);
  }
}

TEST_CASE("split against the matching constant coefficient leaves no "
          "correction") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(dilate(q0, 1.5), 73);
  const CoefficientField a = constant_coefficient(g, 2.0, 0.25, 1.5);
  const ScalarField u = boundary_driven_solution(a, 1e-12);
  const VectorField datum = smooth_datum(g);
  const MatrixField b = smooth_multiplier(g);

  const PairingSplit split =
      pairing_split(a, u, b, datum, q0, SplitVariant::lq, 1e-12);
  for (const SplitCube& c : split.cubes) {
    CHECK(c.defect == 0.0);
    CHECK(c.ii_value == 0.0);
  }
  CHECK(split.term_ii == 0.0);
  // Measured ~8.1e-14: with no correction share the frozen solves alone
  // carry the identity.
  CHECK(split.recombination_error() < 1e-11);
}

TEST_CASE("zero datum gives an all-zero split") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(dilate(q0, 1.5), 73);
  const CoefficientField a = smooth_coefficient(g, 0.2);
  const ScalarField u = boundary_driven_solution(a, 1e-10);

  const PairingSplit split = pairing_split(a, u, MatrixField(g),
                                           VectorField(g), q0,
                                           SplitVariant::lq, 1e-10);
  CHECK(split.direct == 0.0);
  CHECK(split.term_i == 0.0);
  CHECK(split.term_ii == 0.0);
  CHECK(split.recombination_error() == 0.0);
}

TEST_CASE("split validation rejects misaligned or under-resolved regions") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(dilate(q0, 3.0), 73);
  const CoefficientField a = smooth_coefficient(g, 0.2);
  const ScalarField u = boundary_driven_solution(a, 1e-10);
  const VectorField datum = smooth_datum(g);
  const MatrixField b = smooth_multiplier(g);

  // Node-misaligned cube: center pushed off the lattice.
  const Cube off({0.3 * g.h(), 0.0, 0.0}, 0.5, 2);
  CHECK(code_of([&] {
          pairing_split(a, u, b, datum, off, SplitVariant::lq);
        }) == ErrorCode::InvalidArgument);

  // Aligned but with a cell span not divisible by the family ratio.
  const Cube ragged({0.0, 0.0, 0.0}, 0.5 - g.h(), 2);
  CHECK(code_of([&] {
          pairing_split(a, u, b, datum, ragged, SplitVariant::lq);
        }) == ErrorCode::InvalidArgument);

  // Divisible span, but an odd cell count per subcube: the tripled subcube
  // grids would need an even node count, which grids do not allow.
  CHECK(code_of([&] {
          pairing_split(a, u, b, datum, q0, SplitVariant::lq);
        }) == ErrorCode::InvalidArgument);

  // Even cells per subcube, but the tripled subcubes get fewer than 9 nodes.
  const Cube small({0.0, 0.0, 0.0}, 8.0 * g.h(), 2);
  CHECK(code_of([&] {
          pairing_split(a, u, b, datum, small, SplitVariant::lq);
        }) == ErrorCode::TooCoarse);

  // A cube close enough to the boundary that subcube triples leave the
  // domain.
  const Cube edge({1.0, 0.0, 0.0}, 0.25, 2);
  CHECK(code_of([&] {
          pairing_split(a, u, b, datum, edge, SplitVariant::holder);
        }) != ErrorCode::Internal);

  // Datum on a different grid.
  const GridSpec g2(dilate(q0, 3.0), 49);
  CHECK(code_of([&] {
          pairing_split(a, u, b, smooth_datum(g2), q0, SplitVariant::lq);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("constant coefficient kills every deeper level of the iteration") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);

  SUBCASE("sharp flavor, fully enumerated levels") {
    const GridSpec g(dilate(q0, 3.0), 65);
    const CoefficientField a = constant_coefficient(g, 2.0, 0.25, 1.5);
    const ScalarField u = boundary_driven_solution(a, 1e-10);
    const IterationTrace tr =
        run_iteration(a, u, smooth_datum(g), q0, 3, SplitVariant::lq, 2.25,
                      64, 2026, 13);
    REQUIRE(tr.levels.size() == 3);
    CHECK(tr.levels[0].term_sum > 0.0);
    CHECK(tr.levels[1].term_sum == 0.0);
    CHECK(tr.levels[2].term_sum == 0.0);
    CHECK(tr.decay_ratio == 0.0);
    CHECK(!tr.truncated);
    CHECK(tr.levels[0].remainder == 0.0);
    CHECK(tr.levels[1].cube_count == 64);
    CHECK(tr.levels[2].cube_count == 4096);
    CHECK(tr.levels[2].evaluated == 4096);
  }

  SUBCASE("smooth flavor, sampled deep level") {
    const GridSpec g(dilate(q0, 4.0), 109);
    const CoefficientField a = constant_coefficient(g, 2.0, 0.25, 1.5);
    const ScalarField u = boundary_driven_solution(a, 1e-10);
    const IterationTrace tr =
        run_iteration(a, u, smooth_datum(g), q0, 3, SplitVariant::holder, 0.8,
                      4, 2026, 13);
    REQUIRE(tr.levels.size() == 3);
    CHECK(tr.levels[0].term_sum > 0.0);
    CHECK(tr.levels[1].term_sum == 0.0);
    CHECK(tr.levels[2].term_sum == 0.0);
    CHECK(tr.levels[1].evaluated == 729);
    CHECK(tr.levels[2].cube_count == 729L * 729L);
    CHECK(tr.levels[2].evaluated == 4);  // sampled estimate
    CHECK(!tr.truncated);
  }
}

TEST_CASE("sharp-flavor level sums decay geometrically for a mild "
          "perturbation") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(dilate(q0, 3.0), 97);
  const CoefficientField a = smooth_coefficient(g, 0.05);
  const ScalarField u = boundary_driven_solution(a, 1e-10);
  const IterationTrace tr = run_iteration(a, u, smooth_datum(g), q0, 2,
                                          SplitVariant::lq, 2.25, 64, 2026,
                                          25);
  REQUIRE(tr.levels.size() == 2);
  CHECK(tr.levels[0].term_sum > 0.0);
  CHECK(tr.levels[1].term_sum > 0.0);
  // Measured decay ratio ~1.4e-3 for this 5% perturbation.
  CHECK(tr.decay_ratio < 0.5);
  CHECK(tr.levels[0].remainder == tr.levels[1].term_sum);
  CHECK(tr.levels[1].remainder == 0.0);
  CHECK(tr.levels[1].subcube_side ==
        doctest::Approx(3.0 * q0.side() / 8.0));
  CHECK(tr.levels[1].fresh_m == 25);
}

TEST_CASE("smooth-flavor weighted level sums decrease") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(dilate(q0, 4.0), 109);
  const CoefficientField a = smooth_coefficient(g, 0.2);
  const ScalarField u = boundary_driven_solution(a, 1e-10);
  const IterationTrace tr =
      run_iteration(a, u, smooth_datum(g), q0, 3, SplitVariant::holder, 0.8,
                    8, 2026, 13);
  REQUIRE(tr.levels.size() == 3);
  // Measured ~5.0e-1, ~3.9e-4, ~2.3e-10: the 27^-(alpha+n) level weight
  // dominates the growth of the family.
  CHECK(tr.levels[0].term_sum > 0.0);
  CHECK(tr.levels[1].term_sum > 0.0);
  CHECK(tr.levels[1].term_sum < tr.levels[0].term_sum);
  CHECK(tr.levels[2].term_sum < tr.levels[1].term_sum);
  CHECK(tr.decay_ratio < 1.0);
  CHECK(!tr.truncated);
}

TEST_CASE("iteration truncates honestly when subcubes outrun the data grid") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(dilate(q0, 3.0), 33);
  const CoefficientField a = smooth_coefficient(g, 0.2);
  const ScalarField u = boundary_driven_solution(a, 1e-10);
  const IterationTrace tr = run_iteration(a, u, smooth_datum(g), q0, 4,
                                          SplitVariant::lq, 2.25, 16, 2026,
                                          13);
  CHECK(tr.truncated);
  CHECK(tr.levels.size() == 2);  // level 2 subcubes are below grid scale
  CHECK(tr.depth == 2);
  CHECK(tr.levels[1].work_cells > 1.0);
}

TEST_CASE("iteration validation rejects bad exponents and coverage") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(dilate(q0, 3.0), 49);
  const CoefficientField a = smooth_coefficient(g, 0.2);
  const ScalarField u = boundary_driven_solution(a, 1e-10);
  const VectorField datum = smooth_datum(g);

  CHECK(code_of([&] {
          run_iteration(a, u, datum, q0, 2, SplitVariant::lq, 2.0);
        }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] {
          run_iteration(a, u, datum, q0, 2, SplitVariant::holder, 0.5);
        }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] {
          run_iteration(a, u, datum, q0, 0, SplitVariant::lq, 2.25);
        }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] {
          run_iteration(a, u, datum, q0, 2, SplitVariant::lq, 2.25, 64, 2026,
                        12);
        }) == ErrorCode::InvalidArgument);
  // The smooth flavor needs the 4-fold dilate inside the data domain.
  CHECK(code_of([&] {
          run_iteration(a, u, datum, q0, 2, SplitVariant::holder, 0.8);
        }) == ErrorCode::DomainMargin);
}

TEST_CASE("operator chain walks nested cubes and keeps supports") {
  const Cube q0({0.0, 0.0, 0.0}, 0.5, 2);

  SUBCASE("sharp flavor") {
    const GridSpec g(dilate(q0, 3.0), 65);
    const CoefficientField a = smooth_coefficient(g, 0.2);
    const VectorField datum = smooth_datum(g);
    const FrozenOperatorChain chain =
        operator_chain(a, datum, q0, {5, 17}, SplitVariant::lq, 13);
    REQUIRE(chain.parents.size() == 3);
    REQUIRE(chain.fields.size() == 3);
    CHECK(chain.fields[0].v == datum.v);  // no cutoff in the sharp flavor
    CHECK(contains_cube(q0, chain.parents[1], 1e-12));
    CHECK(contains_cube(chain.parents[1], chain.parents[2], 1e-12));
    CHECK(chain.parents[2].half_side ==
          doctest::Approx(q0.half_side / 64.0));
    for (size_t j = 1; j < chain.fields.size(); ++j) {
      const Cube& dom = chain.fields[j].spec.domain;
      CHECK(dom.half_side ==
            doctest::Approx(3.0 * chain.parents[j].half_side));
      for (int axis = 0; axis < 2; ++axis) {
        CHECK(dom.center[axis] ==
              doctest::Approx(chain.parents[j].center[axis]).epsilon(1e-12));
      }
      for (double x : chain.fields[j].v) CHECK(std::isfinite(x));
    }
  }

  SUBCASE("smooth flavor applies the base cutoff to the datum") {
    const GridSpec g(dilate(q0, 4.0), 73);
    const CoefficientField a = smooth_coefficient(g, 0.2);
    const VectorField datum = smooth_datum(g);
    const FrozenOperatorChain chain =
        operator_chain(a, datum, q0, {364}, SplitVariant::holder, 13);
    REQUIRE(chain.fields.size() == 2);
    // Peak value 1 at the center of q0, zero outside its double.
    const long center = g.node_index(g.nearest_node(q0.center));
    CHECK(chain.fields[0].at(center)[0] ==
          doctest::Approx(datum.at(center)[0]).epsilon(1e-12));
    for (long i = 0; i < g.node_count(); ++i) {
      const auto p = g.node_point(i);
      const double off = std::max(std::fabs(p[0]), std::fabs(p[1]));
      if (off >= q0.side() - 1e-12) {
        CHECK(chain.fields[0].at(i)[0] == 0.0);
        CHECK(chain.fields[0].at(i)[1] == 0.0);
      }
    }
    CHECK(contains_cube(dilate(q0, 3.0), chain.parents[1], 1e-12));
  }
}

TEST_CASE("gradient bounds from the pairing dual are consistent") {
  const Cube q0({0.0, 0.0, 0.0}, 0.25, 2);

  SUBCASE("affine solutions have zero quotient and matching norms") {
    const GridSpec g(Cube({0.0, 0.0, 0.0}, 1.0, 2), 65);
    const CoefficientField a = constant_coefficient(g, 1.0, 0.0, 1.0);
    ScalarField u(g);
    for (long i = 0; i < g.node_count(); ++i) {
      const auto p = g.node_point(i);
      u.v[i] = 2.0 * p[0] - 0.5 * p[1] + 0.25;
    }
    const GradientBounds b = gradient_bounds_from_duality(a, u, q0, 0.5);
    const double mag = std::sqrt(4.0 + 0.25);
    CHECK(b.holder_quotient == doctest::Approx(0.0));
    CHECK(b.sup_norm == doctest::Approx(mag).epsilon(1e-9));
    CHECK(b.l2_avg == doctest::Approx(mag).epsilon(1e-9));
    CHECK(!b.degenerate);
  }

  SUBCASE("zero solutions are flat, not degenerate") {
    const GridSpec g(Cube({0.0, 0.0, 0.0}, 1.0, 2), 33);
    const CoefficientField a = constant_coefficient(g, 1.0, 0.0, 1.0);
    const GradientBounds b =
        gradient_bounds_from_duality(a, ScalarField(g), q0, 0.5);
    CHECK(b.holder_quotient == 0.0);
    CHECK(b.sup_norm == 0.0);
    CHECK(b.l2_avg == 0.0);
    CHECK(!b.degenerate);
  }

  SUBCASE("rough solutions give a positive quotient") {
    const GridSpec g(Cube({0.0, 0.0, 0.0}, 1.0, 2), 65);
    const CoefficientField a = smooth_coefficient(g, 0.3);
    const ScalarField u = boundary_driven_solution(a, 1e-10);
    const GradientBounds b = gradient_bounds_from_duality(a, u, q0, 0.5);
    CHECK(b.holder_quotient > 0.0);
    CHECK(b.sup_norm > 0.0);
    CHECK(b.sup_norm >= b.l2_avg * 0.1);
    CHECK(!b.degenerate);
  }

  SUBCASE("coverage validation") {
    const GridSpec g(Cube({0.0, 0.0, 0.0}, 1.0, 2), 33);
    const CoefficientField a = constant_coefficient(g, 1.0, 0.0, 1.0);
    CHECK(code_of([&] {
            gradient_bounds_from_duality(a, ScalarField(g),
                                         Cube({0.0, 0.0, 0.0}, 0.3, 2), 0.5);
          }) == ErrorCode::DomainMargin);
    CHECK(code_of([&] {
            gradient_bounds_from_duality(a, ScalarField(g), q0, 1.0);
          }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("higher-integrability scan is monotone in the exponent") {
  const Cube q({0.0, 0.0, 0.0}, 0.5, 2);
  const GridSpec g(Cube({0.0, 0.0, 0.0}, 1.5, 2), 65);

  SUBCASE("constant gradients scan flat to one") {
    VectorField f(g);
    for (long i = 0; i < g.node_count(); ++i) {
      f.at(i)[0] = 0.75;
      f.at(i)[1] = -0.5;
    }
    const auto pts = meyers_scan(f, q, {2.0, 2.25, 2.5, 3.0});
    for (const auto& pt : pts) {
      CHECK(pt.ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("ratios never decrease along the exponent grid") {
    const CoefficientField a = smooth_coefficient(g, 0.3);
    const ScalarField u = boundary_driven_solution(a, 1e-10);
    const VectorField gu = reconstruct_gradient(u);
    const auto pts = meyers_scan(gu, q, {2.0, 2.1, 2.25, 2.5, 3.0, 4.0});
    REQUIRE(pts.size() == 6);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      CHECK(pts[i].ratio <= pts[i + 1].ratio + 1e-12);
      CHECK(pts[i].ratio > 0.0);
    }
  }

  SUBCASE("validation") {
    VectorField f(g);
    CHECK(code_of([&] { meyers_scan(f, q, {}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([&] { meyers_scan(f, q, {-1.0}); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([&] {
            meyers_scan(f, Cube({0.0, 0.0, 0.0}, 1.0, 2), {2.0});
          }) == ErrorCode::DomainMargin);
  }
}
