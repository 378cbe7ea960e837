#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace ellab {

/// Axis-parallel open cube Q(x, r) = { y : |x - y|_inf < r } in dimension
/// n in {2, 3}.  `half_side` is r, so the side length is 2r.  Partition
/// operations (subdivision, dyadic children) treat the cube as the minimal
/// half-open box [corner, corner + side) containing it.
struct Cube {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double half_side = 0.0;
  int n = 2;

  Cube() = default;
  Cube(std::array<double, 3> c, double r, int dim);

  double side() const { return 2.0 * half_side; }
  double volume() const;
  double corner_low(int axis) const { return center[axis] - half_side; }
  double corner_high(int axis) const { return center[axis] + half_side; }
};

/// Concentric dilation N*Q: same center, half-side scaled by `factor` > 0.
Cube dilate(const Cube& q, double factor);

/// Partition into `ratio`^n congruent subcubes of side l(Q)/ratio, anchored
/// at the lower corner.  Supported ratios: 27 and 8.
std::vector<Cube> subdivide_ratio(const Cube& q, int ratio);

/// Dyadic children at `depth` generations: 2^(n*depth) subcubes.
std::vector<Cube> dyadic_subcubes(const Cube& q, int depth);

/// The dyadic subcube of `q` at `depth` whose half-open box contains `p`.
/// Index per axis is clamped into [0, 2^depth).
Cube dyadic_cell(const Cube& q, int depth, const std::array<double, 3>& p);

/// Point membership in the open cube with an absolute slack: positive slack
/// enlarges the cube (closed-with-tolerance), negative shrinks it.
bool contains_point(const Cube& q, const std::array<double, 3>& p,
                    double slack);

/// Half-open membership [lo, hi) per axis with a tiny tolerance `tol`
/// guarding against floating-point jitter on shared faces.
bool contains_half_open(const Cube& q, const std::array<double, 3>& p,
                        double tol);

/// Whether `inner` is contained in `outer` up to absolute slack.
bool contains_cube(const Cube& outer, const Cube& inner, double slack);

/// Whether the open cubes intersect.
bool cubes_intersect(const Cube& a, const Cube& b);

double dist_inf(const std::array<double, 3>& a, const std::array<double, 3>& b,
                int n);

std::string cube_to_json(const Cube& q);
Cube cube_from_json(const std::string& text);

}  // namespace ellab
