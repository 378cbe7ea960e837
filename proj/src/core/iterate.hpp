#pragma once

#include <array>
#include <vector>

#include "core/cube.hpp"
#include "core/field.hpp"

namespace ellab {

/// Flavor of the frozen-coefficient recursion.
///  - holder: smooth partition-of-unity cutoffs over the 27-per-axis
///    partition of 3Q, local Hardy norms, data on a grid covering 4Q.
///  - lq: sharp cell-level cutoffs over the 8-per-axis partition of Q,
///    plain power means, data on a grid covering 3Q.
enum class SplitVariant { holder, lq };

/// Per-subcube record of the one-step split.  `i_value` is the pairing
/// share computed from the local constant-coefficient solution, `ii_value`
/// the correction share through the projected potential; summed over the
/// partition they recombine to the direct pairing up to solver tolerance.
struct SplitCube {
  Cube p;                          // partition member P
  std::array<double, 9> a_frozen;  // average of the coefficient over 3P
  double defect = 0.0;             // measured size of A - A_P on 3P
  double i_value = 0.0;
  double ii_value = 0.0;
  VectorField defect_grad;         // (A - A_P) grad u on the 3P subgrid
  VectorField t_grad;              // gradient of the projected potential
};

struct PairingSplit {
  SplitVariant variant = SplitVariant::lq;
  double direct = 0.0;   // the pairing evaluated without splitting
  double term_i = 0.0;   // sum of frozen-solution shares
  double term_ii = 0.0;  // sum of correction shares
  std::vector<SplitCube> cubes;

  /// |direct - term_i - term_ii| over the larger of |direct| and the
  /// recombined magnitude; zero when everything vanishes.
  double recombination_error() const;
};

/// One step of the frozen-coefficient split of the pairing of B grad u
/// against g over Q (lq flavor) or over 3Q (holder flavor).  All four
/// fields must share one grid; u must be a discrete solution of the
/// homogeneous divergence-form equation on that grid, since the interior
/// equation is what closes the recombination identity.
///
/// The split is exact at the discrete level, so the cube faces must sit on
/// grid nodes: Q (resp. 3Q) has to be resolved by the grid with a span
/// divisible by 8 (resp. 27) and an even cell count per subcube (grids use
/// odd node counts), every 3P must stay inside the grid domain, and each 3P
/// subgrid needs at least 9 nodes per axis (TooCoarse otherwise, which
/// callers treat as a depth-truncation signal).
PairingSplit pairing_split(const CoefficientField& a, const ScalarField& u,
                           const MatrixField& b, const VectorField& g,
                           const Cube& q, SplitVariant variant,
                           double tol = 1e-10);

/// One level of an iteration trace.  `cube_count` is the nominal family
/// size at this level; `evaluated` how many members were actually computed
/// (deep levels are sampled).  `term_sum` is the level's contribution to
/// the pairing bound, `remainder` the sum of the computed deeper terms.
/// `subcube_side` and `work_cells` record how well the data grid resolves
/// the level (cells of the data grid per tripled-subcube side); `fresh_m`
/// is the per-subcube re-gridding resolution.
struct IterationLevel {
  int k = 0;
  long cube_count = 0;
  long evaluated = 0;
  double term_sum = 0.0;
  double remainder = 0.0;
  double subcube_side = 0.0;
  double work_cells = 0.0;
  int fresh_m = 0;
};

struct IterationTrace {
  SplitVariant variant = SplitVariant::lq;
  int depth = 0;         // number of levels computed (k = 0 .. depth-1)
  double exponent = 0.0; // the q (lq) or p (holder) the terms were built with
  std::vector<IterationLevel> levels;
  double decay_ratio = 0.0;  // max over k of term_{k+1} / term_k
  bool truncated = false;    // a level could not be resolved and was cut
};

/// Runs the recursion to `depth` levels and measures the per-level term
/// sums of the pairing bound.
///
/// Level terms carry the measured defect size of A - A_P on each subcube
/// (a power mean for lq, a sup for holder), so constant coefficients make
/// every level past the first vanish identically.  Level-k families are
/// the 8-per-axis nested refinements of Q0 (lq) or the 27-per-axis
/// partitions of the tripled parents (holder); each subcube re-grids its
/// data onto a fresh m_sub-node grid, and levels whose nominal family is
/// larger than 4096 are estimated from `n_paths` uniformly sampled
/// parent chains drawn with `seed`.
///
/// q_or_p is the integrability exponent: q > 2 for lq (power-mean norms
/// with the conjugate exponent), p in (n/(n+1), 1] for holder (local Hardy
/// norms; the associated smoothness is alpha = n(1/p - 1)).
IterationTrace run_iteration(const CoefficientField& a, const ScalarField& u,
                             const VectorField& g, const Cube& q0, int depth,
                             SplitVariant variant, double q_or_p,
                             int n_paths = 64, unsigned seed = 2026,
                             int m_sub = 25, double tol = 1e-10);

/// The iterated fields along one parent chain: fields[0] is the input
/// datum (with the holder flavor's base cutoff applied), and fields[j] for
/// j >= 1 lives on the fresh grid over 3 * parents[j], where it is the
/// projected gradient of the previous field times the cutoff and the
/// coefficient defect of the previous parent.
struct FrozenOperatorChain {
  std::vector<Cube> parents;        // parents[0] = Q0, then one cube per level
  std::vector<VectorField> fields;  // fields[j] = the level-j operator output
};

/// Builds the operator chain along the parent path selected by `path`:
/// path[j] is the child index inside the level-(j+1) family of the current
/// parent (lexicographic subdivision order).
FrozenOperatorChain operator_chain(const CoefficientField& a,
                                   const VectorField& g, const Cube& q0,
                                   const std::vector<int>& path,
                                   SplitVariant variant, int m_sub = 25,
                                   double tol = 1e-10);

/// Interior regularity quotients of a solved instance around Q0:
/// holder_quotient compares the Holder seminorm of grad u on 2Q0 (scaled
/// by l(Q0)^alpha) against the L2 average of grad u on 4Q0; sup_norm is
/// the node maximum of |grad u| on 2Q0.  `degenerate` flags a zero L2
/// average paired with a nonzero numerator, which no discrete solution
/// can produce.
struct GradientBounds {
  double holder_quotient = 0.0;
  double sup_norm = 0.0;
  double l2_avg = 0.0;
  bool degenerate = false;
};

GradientBounds gradient_bounds_from_duality(const CoefficientField& a,
                                            const ScalarField& u,
                                            const Cube& q0, double alpha);

/// Higher-integrability scan: per exponent q, the ratio of the q-power
/// mean of |grad u| on Q against the quadratic mean on 2Q.  Nondecreasing
/// in q by power-mean monotonicity.
struct MeyersPoint {
  double q = 0.0;
  double ratio = 0.0;
};

std::vector<MeyersPoint> meyers_scan(const VectorField& u_grad, const Cube& q,
                                     const std::vector<double>& q_grid);

}  // namespace ellab
