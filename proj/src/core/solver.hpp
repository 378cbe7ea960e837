#pragma once

#include <array>

#include "core/field.hpp"

namespace ellab {

/// Dirichlet data for a solve: identically zero, or traces inherited from a
/// scalar field defined on a grid covering the solve domain.
struct BoundaryCondition {
  enum class Kind { Zero, Inherited };
  Kind kind = Kind::Zero;
  ScalarField data;

  static BoundaryCondition zero() { return BoundaryCondition{}; }
  static BoundaryCondition inherited(ScalarField f) {
    BoundaryCondition bc;
    bc.kind = Kind::Inherited;
    bc.data = std::move(f);
    return bc;
  }
};

/// Divergence-form problem -div A grad u = div F on a grid, Dirichlet data
/// on the boundary nodes.  A and F live on the same grid as the unknown.
struct EllipticProblem {
  CoefficientField a;
  VectorField f;
  BoundaryCondition bc;
};

struct SolveReport {
  ScalarField u;
  VectorField grad_u;
  double residual = 0.0;
  int iterations = 0;
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
};

/// Solves the discrete weak form: bilinear (trial, test) entries integrate
/// A(cell centroid) grad phi_j . grad phi_i exactly (tensor Gauss rule);
/// loads use F frozen at cell centroids.  Boundary rows are eliminated.
SolveReport solve_dirichlet(const EllipticProblem& prob, double tol = 1e-10);

/// Nodal gradient reconstruction: average of the element gradients (taken
/// at cell centroids) over the cells adjacent to each node.
VectorField reconstruct_gradient(const ScalarField& u);

/// Load-side pairing sum_cells h^n w(centroid) . grad eta(centroid): exactly
/// the assembled right-hand side action <b(w), eta>.  When `cells_in` is
/// given, only cells whose centroid lies in its half-open box contribute;
/// centroids sit strictly between node-aligned faces, so the cut is an
/// exact cell partition.
double load_pairing(const VectorField& w, const ScalarField& eta,
                    const Cube* cells_in = nullptr);

/// Stiffness-side pairing sum_cells Gauss[(A(centroid) grad u) . grad eta],
/// with `transpose_a` selecting A^T (the projection operator's form).
double energy_pairing(const MatrixField& a, bool transpose_a,
                      const ScalarField& u, const ScalarField& eta);

/// Gauss-quadrature L2 norm of the element gradient field of u.
double gradient_l2_gauss(const ScalarField& u);

/// Projection operator: grad of the zero-boundary solution of
/// div A^T grad t = div g on the grid shared by a and g.  The defect
/// g - A^T grad t then pairs to solver tolerance against every discrete
/// test gradient in the assembly quadrature.
struct ProjectionResult {
  ScalarField t;
  VectorField grad_t;
};
ProjectionResult project_T(const CoefficientField& a, const VectorField& g,
                           double tol = 1e-10,
                           const Cube* load_cells = nullptr);

/// Constant coefficient field on a grid: every node carries the row-major
/// matrix `a_frozen`.  The ellipticity bounds are measured from the matrix
/// itself (probe-direction minimum of the symmetric part, operator norm).
CoefficientField frozen_coefficient(const GridSpec& g,
                                    const std::array<double, 9>& a_frozen);

/// Constant-coefficient local solve: boundary values inherited from u on
/// the cube p3, coefficient frozen to the matrix a_frozen (row-major), zero
/// right-hand side.  Uses the aligned subgrid of u when p3 is exactly
/// resolved; otherwise a fresh grid with `m_fresh` nodes per axis.
ScalarField solve_local_frozen(const Cube& p3, const std::array<double, 9>& a_frozen,
                               const ScalarField& u, double tol = 1e-10,
                               int m_fresh = 0);

}  // namespace ellab
