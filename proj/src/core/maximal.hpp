#pragma once

#include <array>
#include <vector>

#include "core/bump.hpp"
#include "core/field.hpp"

namespace ellab {

/// One-dimensional convolution stencil: taps at node offsets lo..hi.
struct Kernel1D {
  int lo = 0;
  int hi = 0;
  std::vector<double> w;

  int taps() const { return hi - lo + 1; }
};

/// Discrete mollifier stencil at scale s on spacing h: profile samples at
/// offsets |i·h| < s, normalized so that the per-axis mass times h is 1
/// (the tensor kernel then has discrete mass exactly 1).  Requires s >= 2h.
Kernel1D mollifier_kernel_1d(double s, double h);

/// Separable convolution with zero padding outside the grid; `scale`
/// multiplies the result once at the end.
ScalarField separable_convolve(const ScalarField& f,
                               const std::array<Kernel1D, 3>& kernels,
                               double scale);

/// Mollification by the mass-one tensor kernel at scale s.
ScalarField mollify(const ScalarField& f, double s);

/// Dyadic radius ladder {s/2 * 2^-k} truncated at 2h (largest first).
std::vector<double> ladder_radii(double s, double h);

/// Hardy-Littlewood maximal function over grid-centered cubes: at node x,
/// the sup over half-sides k*h (k = 1, 2, 4, ..., (m-1)/2) and over all
/// node centers z with x in Q(z, k*h) of the average of |f| over the grid
/// nodes in that cube (restricted to the grid).  For small grids the sums
/// accumulate in flat row-major order so a brute-force oracle reproduces
/// the values bit for bit; large grids use prefix sums.
ScalarField hl_maximal(const ScalarField& f);

/// Smooth local maximal: sup over the dyadic radius ladder of |phi_r * f|.
/// Requires s >= 4h so the ladder is nonempty.
ScalarField smooth_maximal(const ScalarField& f, double s);

/// Grand local maximal: sup over dictionary bumps (class-normalized, not
/// mass-normalized) and the radius ladder of |b_t * f| with
/// b_t(y) = t^-n b(y/t).
ScalarField grand_maximal(const ScalarField& f, double s,
                          const BumpDictionary& dict);

}  // namespace ellab
