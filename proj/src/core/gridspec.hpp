#pragma once

#include <array>
#include <optional>

#include "core/cube.hpp"

namespace ellab {

/// Uniform tensor grid on a cube: `m` nodes per axis (odd, >= 3), spacing
/// h = side/(m-1), nodes at corner + i*h.  Node storage is row-major with
/// axis 0 fastest.  Cells are the (m-1)^n boxes between adjacent nodes.
struct GridSpec {
  Cube domain;
  int m = 0;

  GridSpec() = default;
  GridSpec(Cube d, int nodes_per_axis);

  int n() const { return domain.n; }
  double h() const { return domain.side() / (m - 1); }

  long node_count() const;
  long cell_count() const;

  long node_index(const std::array<int, 3>& idx) const;
  std::array<int, 3> node_multi_index(long flat) const;
  std::array<double, 3> node_point(const std::array<int, 3>& idx) const;
  std::array<double, 3> node_point(long flat) const;

  long cell_index(const std::array<int, 3>& idx) const;
  std::array<int, 3> cell_multi_index(long flat) const;
  std::array<double, 3> cell_centroid(const std::array<int, 3>& idx) const;

  bool is_boundary_node(const std::array<int, 3>& idx) const;

  /// Nearest node to a point (indices clamped to the grid).
  std::array<int, 3> nearest_node(const std::array<double, 3>& p) const;
};

/// Whether the grids share the same geometry within relative tolerance.
bool same_grid(const GridSpec& a, const GridSpec& b, double rel_tol = 1e-9);

/// If `sub` is exactly resolved by `parent` (matching spacing, cell-aligned
/// corner, inside the domain), returns the aligned subgrid spec together
/// with the parent node offset of its low corner.
struct AlignedSubgrid {
  GridSpec grid;
  std::array<int, 3> offset;
};
std::optional<AlignedSubgrid> aligned_subgrid(const GridSpec& parent,
                                              const Cube& sub);

}  // namespace ellab
