#pragma once

#include <array>
#include <vector>

#include "core/gridspec.hpp"

namespace ellab {

/// Nodal fields on a GridSpec.  Values are stored per node (axis 0 fastest);
/// vector fields interleave components per node, matrix fields store row-major
/// n x n blocks per node.
struct ScalarField {
  GridSpec spec;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& s)
      : spec(s), v(static_cast<size_t>(s.node_count()), 0.0) {}
};

struct VectorField {
  GridSpec spec;
  std::vector<double> v;

  VectorField() = default;
  explicit VectorField(const GridSpec& s)
      : spec(s), v(static_cast<size_t>(s.node_count() * s.n()), 0.0) {}

  double* at(long node) { return v.data() + node * spec.n(); }
  const double* at(long node) const { return v.data() + node * spec.n(); }
};

struct MatrixField {
  GridSpec spec;
  std::vector<double> v;

  MatrixField() = default;
  explicit MatrixField(const GridSpec& s)
      : spec(s), v(static_cast<size_t>(s.node_count() * s.n() * s.n()), 0.0) {}

  double* at(long node) { return v.data() + node * spec.n() * spec.n(); }
  const double* at(long node) const {
    return v.data() + node * spec.n() * spec.n();
  }
};

/// Coefficient field with certified ellipticity window; construct through
/// ellipticity_check so the certificate is always earned.
struct CoefficientField {
  MatrixField base;
  double lambda = 1.0;
  double Lambda = 1.0;
};

void validate_finite(const std::vector<double>& values, const char* what);

/// Multilinear interpolation at a point (must lie inside the domain within a
/// small tolerance; throws domain-margin otherwise).  `out` receives `comps`
/// values.
void sample_at(const GridSpec& spec, const std::vector<double>& values,
               int comps, const std::array<double, 3>& p, double* out);

ScalarField resample(const ScalarField& f, const GridSpec& target);
VectorField resample(const VectorField& f, const GridSpec& target);
MatrixField resample(const MatrixField& f, const GridSpec& target);

/// Mean over the cube via midpoint (cell-centroid) quadrature: averages the
/// corner-interpolated value over all grid cells whose centroid lies in the
/// half-open box of P.  Throws invalid-argument when no centroid is inside.
double mean_over(const ScalarField& f, const Cube& p);
std::array<double, 3> mean_over(const VectorField& f, const Cube& p);
std::array<double, 9> mean_over(const MatrixField& f, const Cube& p);

/// Root-mean-square of the Euclidean norm over cells with centroid in the
/// region: (avg |f(c)|^q)^(1/q) with centroid-interpolated components.
double power_mean(const ScalarField& f, const Cube& region, double q);
double power_mean(const VectorField& f, const Cube& region, double q);

/// sqrt(avg |F - <F>|^2) over the region (centroid quadrature, one pass).
double oscillation_l2(const VectorField& f, const Cube& region);

/// Prefix-summed cell-centroid table: corner-averaged cell values of a
/// scalar field with inclusion-exclusion box queries.  Boxes select cells by
/// centroid membership in the open box (centroids never sit on grid-aligned
/// box faces, so there are no ties).
struct CellAverages {
  GridSpec spec;
  int n = 2;
  std::array<int, 3> d{1, 1, 1};
  std::array<long, 3> stride{1, 1, 1};
  std::vector<double> sum1;
  std::vector<double> sum2;

  explicit CellAverages(const ScalarField& f);

  /// Sum, sum of squares and count over cells with centroid within radius r
  /// of z (clamped to the grid); false when no cell qualifies.
  bool box_sums(const std::array<double, 3>& z, double r, double* s1,
                double* s2, long* count) const;

  /// Mean and mean-square over the same cell set.
  bool box_stats(const std::array<double, 3>& z, double r, double* mean,
                 double* meansq) const;
};

/// Discrete Holder seminorm sup |f(x)-f(y)| / |x-y|^alpha over node pairs in
/// region R.  Exhaustive when the pair count is small; otherwise all pairs
/// within 8h plus a fixed-seed batch of 1e5 far pairs.  Value differences use
/// abs / Euclidean / Frobenius norms by field kind.
double holder_seminorm(const ScalarField& f, double alpha, const Cube& r);
double holder_seminorm(const VectorField& f, double alpha, const Cube& r);
double holder_seminorm(const MatrixField& f, double alpha, const Cube& r);

/// Unit probe directions used by the quadratic-form lower bound: 64 uniform
/// angles in 2D, a subdivided icosahedron (162 vertices + 20 face centers) in
/// 3D.
const std::vector<std::array<double, 3>>& probe_directions(int n);

/// Validates the ellipticity window of Eq.-style form: probe-direction
/// quadratic form >= lambda and operator norm <= Lambda at every node (1e-12
/// slack).  Throws EllipticityError carrying the worst node and margin.
CoefficientField ellipticity_check(const MatrixField& a, double lambda,
                                   double Lambda);

/// Singular-value window check sigma(A(x)) in [lambda, Lambda], the form used
/// by projection and frozen-coefficient arguments.
bool spectrum_in_range(const MatrixField& a, double lambda, double Lambda,
                       double tol = 1e-12);

/// Largest singular value of a single n x n matrix (closed form at this
/// scale).
double operator_norm(const double* m, int n);
double smallest_singular_value(const double* m, int n);

}  // namespace ellab
