#pragma once

#include <utility>
#include <vector>

#include "core/field.hpp"
#include "core/whitney.hpp"

namespace ellab {

/// Output of the stopping-time construction on the tripled cube: the two
/// auxiliary maximal functions, the threshold multiplier chosen by
/// log-bisection, the level sets and their Whitney cubes.
struct StoppingResult {
  GridSpec work;             // grid over 3Q carrying the masks
  std::vector<double> s1;    // dyadic maximal of avg_{3P} phi_Q |grad u|^2
  std::vector<double> s2;    // dyadic maximal of the local Hardy norm on 2P
  double t1 = 0.0;           // reference level <|grad u|^2>_{6Q}
  double t2 = 0.0;           // reference level ||g||_{h_r^p(4Q)}
  double c0 = 1.0;
  std::vector<char> e1, e2, united;
  std::vector<Cube> whitney;  // decomposition of E1 union E2 (may be empty)
  bool unresolved = false;    // set nonempty but below grid resolution
  std::vector<std::pair<double, double>> curve;  // (C0, node measure) samples
};

/// Builds the stopping sets E1 = {S1 > C0 t1}, E2 = {S2 > C0 t2} on a work
/// grid over 3Q, with C0 bisected in [1, 2^40] to the smallest multiplier
/// whose union has node measure at most eps * |Q|.  The dyadic tree depth is
/// capped so the doubled subcubes still span at least eight source cells.
/// m3 = 0 derives the work resolution from u_grad's spacing (6k+1 so the
/// inner third is node-aligned).
StoppingResult stopping_cubes(const VectorField& u_grad, const VectorField& g,
                              const Cube& q, const ScalarField& phi_q,
                              double eps, double p, int m3 = 0);

/// eps-sparse family: cubes with per-cube node masks (the chosen sets E_P)
/// over a common reference grid.  Node measure of a cube counts the
/// reference nodes it contains half-open, the discrete analog of volume.
struct SparseFamily {
  GridSpec ref;
  double epsilon = 0.5;
  std::vector<Cube> cubes;
  std::vector<std::vector<char>> chosen;
};

/// Builds the sparse family {Q} + stopping cubes: each child claims its
/// half-open nodes, E_Q keeps the rest of Q.  The stopping threshold uses
/// 0.9 * eps so the discrete counts retain a margin.  depth > 1 recurses
/// into children fully contained in Q, subtracting grandchild claims from
/// the child's set.
SparseFamily build_sparse_family(const VectorField& u_grad,
                                 const VectorField& g, const Cube& q,
                                 const ScalarField& phi_q, double eps,
                                 double p, int depth = 1, int m3 = 0);

/// Verification report for the sparse invariants (node counting).
struct SparseCheck {
  bool valid = false;           // E_P subset P, fractions, overlap <= 1
  bool strict_disjoint = false; // literal mode: the cubes themselves disjoint
  double worst_fraction = 0.0;  // min |E_P| / |P| over the family
  int worst_cube = -1;
  long worst_node = -1;         // node realizing the max chosen-set overlap
  int max_overlap = 0;          // max_x sum_P 1_{E_P}(x)
  int max_cube_overlap = 0;     // max_x sum_P 1_P(x)
  long containment_violations = 0;  // chosen nodes outside their cube
};
SparseCheck verify_sparse(const SparseFamily& s);

/// Right-hand side of the sparse domination bound:
/// sum_P |P| (avg_{6P} |F - <F>_{6P}|^2)^{1/2} ||g||_{h_r^p(4P)}.
double sparse_rhs(const SparseFamily& s, const VectorField& f,
                  const VectorField& g, double p);

/// |integral over 2Q of phi_Q grad u . g| by cell-centroid quadrature on
/// u_grad's grid (phi_Q treated as zero outside its own domain).
double pairing_lhs(const ScalarField& phi_q, const VectorField& u_grad,
                   const VectorField& g, const Cube& q);

/// Tensor-profile pairing bump supported in Q(center, n_scale * l(Q)),
/// sampled on a grid over 2Q; n_scale = 1 fills 2Q exactly.
ScalarField make_pairing_bump(const Cube& q, double n_scale = 1.0,
                              int m_phi = 65);

}  // namespace ellab
