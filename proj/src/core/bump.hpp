#pragma once

#include <array>
#include <vector>

#include "core/cube.hpp"

namespace ellab {

/// Smooth compactly supported 1D profile p(t) = exp(-1/(1-t^2)) on (-1, 1),
/// zero outside.  All tensor-product bumps and mollifiers are built from it.
double bump_profile(double t);

/// k-th derivative of the profile (k in {0, 1, 2}), closed form.
double bump_profile_derivative(double t, int k);

/// sup_t |p^(k)(t)|, computed once by dense sampling and cached.
double profile_derivative_sup(int k);

/// Integral of the profile over [-1, 1] (composite Simpson, cached).
double profile_integral();

/// C-infinity cutoff: 1 for |t| <= 1, 0 for |t| >= 2, monotone in between.
double cutoff_profile(double t);

/// Tensor bump shape inside a reference cube, in relative units: the center
/// sits at cube_center + offset * half_side and the per-axis support radius
/// is width * half_side.  Requires |offset_a| + width <= 1 so the support
/// stays inside the cube.
struct BumpSpec {
  double width = 1.0;
  std::array<double, 3> offset{0.0, 0.0, 0.0};
};

/// Normalized-family dictionary: every entry, scaled by bump_amplitude, has
/// sup |d^gamma b| <= side(Q)^(-|gamma|) for all |gamma| <= order.
struct BumpDictionary {
  int n = 2;
  int order = 2;
  std::vector<BumpSpec> entries;
};

/// The default dictionary: five widths, five center offsets along axis 0.
/// `doubled` adds the nonzero offsets along axis 1 as well (a strictly
/// larger dictionary used to probe sup stability).
BumpDictionary standard_bump_dictionary(int n, int order, bool doubled);

/// Largest admissible amplitude for the derivative-class constraint; does
/// not depend on the cube size (both sides scale the same way).
double bump_amplitude(const BumpSpec& spec, int n, int order);

/// Evaluates the admissible-scaled bump for cube q at a point.
double bump_value(const BumpSpec& spec, const Cube& q, int order,
                  const std::array<double, 3>& p);

/// Largest |d^gamma b| over a dense sample lattice divided by the class
/// bound side^(-|gamma|); <= 1 (+tiny) certifies class membership.  Exposed
/// for the certificate tests.
double bump_class_ratio(const BumpSpec& spec, const Cube& q, int order,
                        int samples_per_axis);

}  // namespace ellab
