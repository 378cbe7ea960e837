#pragma once

#include <vector>

#include "core/field.hpp"
#include "core/gridspec.hpp"

namespace ellab {

/// Node-indicator set on a grid (true = inside the open set).
struct NodeMask {
  GridSpec spec;
  std::vector<char> on;

  NodeMask() = default;
  explicit NodeMask(const GridSpec& s)
      : spec(s), on(static_cast<size_t>(s.node_count()), 0) {}
};

/// Exact chessboard (sup-norm) distance from each node to the complement,
/// in length units (grid steps times h).  The complement consists of the
/// off nodes together with the grid boundary ring, since everything beyond
/// the grid belongs to the complement as well.
std::vector<double> chessboard_distance(const NodeMask& mask);

/// Whitney-type decomposition of the open set described by `mask`, living
/// on a grid whose domain R plays the role of the tripled reference cube:
/// shell j collects nodes with complement distance in
/// (2^(-j-1), 2^(-j)] * base_scale and receives dyadic subcubes of R at
/// depth j + 6.  Only maximal candidate cubes are kept.  Cubes are never
/// generated below side 2h.  Throws no-exterior when the mask is entirely
/// on.
std::vector<Cube> whitney_decomposition(const NodeMask& mask,
                                        double base_scale);

/// Invariant measurements for a decomposition, used by the verification
/// tests: every cube's nodes are masked, a moderate dilation meets the
/// complement, bounded overlap of the 8-fold dilations, and the masked
/// interior is covered.
struct WhitneyCheck {
  bool inside = false;
  bool touches_exterior = false;
  bool covers = false;
  bool shells_witnessed = false;
  int max_overlap_8p = 0;
};
WhitneyCheck verify_whitney(const NodeMask& mask, double base_scale,
                            const std::vector<Cube>& family);

/// Smooth partition of unity subordinate to the doubles 2P of a Whitney
/// family: tilde weights are tensor cutoffs equal to 1 on P and supported
/// in 2P; normalized weights divide by the running sum.  Construction
/// validates the Whitney-type side-ratio bound (<= 4) for interacting
/// cubes.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(std::vector<Cube> cubes);

  const std::vector<Cube>& cubes() const { return cubes_; }

  double tilde(int k, const std::array<double, 3>& p) const;
  double sum_tilde(const std::array<double, 3>& p) const;
  /// Normalized weight; zero when the tilde sum vanishes at p.
  double weight(int k, const std::array<double, 3>& p) const;

 private:
  std::vector<Cube> cubes_;
};

}  // namespace ellab
