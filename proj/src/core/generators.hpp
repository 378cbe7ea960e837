#pragma once

#include <string>

#include "core/field.hpp"

namespace ellab {

/// Seeded coefficient families used by the experiment drivers.
///
///  - constant: one random symmetric matrix with spectrum strictly inside
///    [lambda, Lambda], repeated at every node.
///  - holder: lambda-centered lacunary sum of damped octave oscillations
///    sum_j 2^(-alpha j) cos(2^j w_j . x + phase_j) E_j, eigenvalue-clipped
///    into [lambda, Lambda]; Holder-alpha regular with a seminorm driven by
///    the octave count.
///  - uniform_continuous: a single smooth low-frequency oscillation, so the
///    modulus of continuity decreases cleanly with scale.
///  - checkerboard: piecewise-constant diagonal tiles with values in
///    {lambda, Lambda} exactly; membership is decided by position, so every
///    grid resolution samples the same underlying field.
enum class CoefficientClass { constant, holder, uniform_continuous, checkerboard };

CoefficientClass coefficient_class_from_string(const std::string& s);
std::string to_string(CoefficientClass c);

/// One deterministic experiment instance.  All fields are functions of
/// (seed, class, parameters) evaluated at node positions: regenerating with
/// the same inputs is byte-identical, and refining the grid samples the same
/// underlying functions.
struct GeneratedInstance {
  CoefficientField a;
  VectorField f;         ///< interior load (band-limited)
  ScalarField bc_trace;  ///< Dirichlet datum (smooth, non-polynomial)
  VectorField g;         ///< pairing datum (band-limited)
  int damp_events = 0;   ///< amplitude dampings needed to certify ellipticity
};

GeneratedInstance generate_instance(const GridSpec& grid, CoefficientClass cls,
                                    double lambda, double Lambda, double alpha,
                                    unsigned seed);

/// The coefficient field alone (same drawing order as generate_instance).
CoefficientField generate_coefficient(const GridSpec& grid,
                                      CoefficientClass cls, double lambda,
                                      double Lambda, double alpha,
                                      unsigned seed, int* damp_events = nullptr);

/// Band-limited random vector field: a fixed number of low-frequency plane
/// waves with seeded directions, phases and amplitudes.
VectorField generate_datum(const GridSpec& grid, unsigned seed);

}  // namespace ellab
