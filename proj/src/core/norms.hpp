#pragma once

#include <string>
#include <vector>

#include "core/field.hpp"

namespace ellab {

/// Local Hardy norm evaluation record.  For kind 'r' the value is an upper
/// bound for the extension infimum (minimum over the candidate families) and
/// `extension_used` names the minimizer.
struct HardyNormResult {
  double value = 0.0;
  char kind = 'z';
  double p = 1.0;
  std::string extension_used;
};

/// Validates p in (n/(n+1), 1] and returns alpha = n(1/p - 1).
double validate_alpha_p(int n, double p);

/// Zero-trace local Hardy norm: the field is cut to Q, zero-extended onto an
/// evaluation grid over 3Q (odd m, about three times the source resolution,
/// clamped to [25, 97]), the smooth maximal function is taken at scale
/// s = half_side(Q), and the nodal p-integral is normalized by s^-n.
HardyNormResult hardy_z_norm(const ScalarField& f, const Cube& q, double p);

/// Restriction-type local Hardy norm: minimum of the same functional over
/// explicit extension candidates ("zero", "reflect" = even reflection across
/// the faces of Q supported in 2Q, "reflect_cutoff" = the reflection tapered
/// by the smooth cutoff).  Upper bound for the true infimum.
HardyNormResult hardy_r_norm(const ScalarField& f, const Cube& q, double p,
                             const std::vector<std::string>& extensions);
HardyNormResult hardy_r_norm(const ScalarField& f, const Cube& q, double p);

/// Vector-valued variants: the maximal function takes the Euclidean norm of
/// the componentwise mollifications.
HardyNormResult hardy_z_norm(const VectorField& f, const Cube& q, double p);
HardyNormResult hardy_r_norm(const VectorField& f, const Cube& q, double p,
                             const std::vector<std::string>& extensions);
HardyNormResult hardy_r_norm(const VectorField& f, const Cube& q, double p);

/// Campanato-type seminorm over node-centered subcubes with dyadic radii
/// r in {h, 2h, 4h, ...}.  kind 'r': sup of r^-alpha L2 oscillation over
/// cubes with r < dist(z, boundary).  kind 'z': the same sup restricted to
/// 4r < dist, plus the boundary-shell sup of r^-alpha L2 magnitude (no
/// centering) over 2r < dist < 4r.
double campanato(const ScalarField& f, const Cube& q, double alpha, char kind);

struct DualityGap {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// Pairing check |avg_Q g f| <= c l(Q)^alpha |g|_{Lambda_b} |f|_{h_a} with
/// a = pairing_kind and b the complementary kind; returns lhs, rhs and their
/// ratio.  A zero rhs with nonzero lhs is flagged by throwing (internal).
DualityGap duality_gap(const ScalarField& g, const ScalarField& f,
                       const Cube& q, double p, char pairing_kind);

}  // namespace ellab
