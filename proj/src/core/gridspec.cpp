#include "core/gridspec.hpp"

#include <cmath>

namespace ellab {

GridSpec::GridSpec(Cube d, int nodes_per_axis) : domain(d), m(nodes_per_axis) {
  require(m >= 3, ErrorCode::TooCoarse, "grid needs at least 3 nodes per axis");
  require(m % 2 == 1, ErrorCode::InvalidArgument,
          "grid node count per axis must be odd");
}

long GridSpec::node_count() const {
  long c = 1;
  for (int i = 0; i < n(); ++i) c *= m;
  return c;
}

long GridSpec::cell_count() const {
  long c = 1;
  for (int i = 0; i < n(); ++i) c *= (m - 1);
  return c;
}

long GridSpec::node_index(const std::array<int, 3>& idx) const {
  long flat = 0;
  for (int i = n() - 1; i >= 0; --i) flat = flat * m + idx[i];
  return flat;
}

std::array<int, 3> GridSpec::node_multi_index(long flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int i = 0; i < n(); ++i) {
    idx[i] = static_cast<int>(flat % m);
    flat /= m;
  }
  return idx;
}

std::array<double, 3> GridSpec::node_point(const std::array<int, 3>& idx) const {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int i = 0; i < n(); ++i) p[i] = domain.corner_low(i) + idx[i] * h();
  return p;
}

std::array<double, 3> GridSpec::node_point(long flat) const {
  return node_point(node_multi_index(flat));
}

long GridSpec::cell_index(const std::array<int, 3>& idx) const {
  long flat = 0;
  for (int i = n() - 1; i >= 0; --i) flat = flat * (m - 1) + idx[i];
  return flat;
}

std::array<int, 3> GridSpec::cell_multi_index(long flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int i = 0; i < n(); ++i) {
    idx[i] = static_cast<int>(flat % (m - 1));
    flat /= (m - 1);
  }
  return idx;
}

std::array<double, 3> GridSpec::cell_centroid(
    const std::array<int, 3>& idx) const {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int i = 0; i < n(); ++i)
    p[i] = domain.corner_low(i) + (idx[i] + 0.5) * h();
  return p;
}

bool GridSpec::is_boundary_node(const std::array<int, 3>& idx) const {
  for (int i = 0; i < n(); ++i)
    if (idx[i] == 0 || idx[i] == m - 1) return true;
  return false;
}

std::array<int, 3> GridSpec::nearest_node(const std::array<double, 3>& p) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int i = 0; i < n(); ++i) {
    long k = std::lround((p[i] - domain.corner_low(i)) / h());
    if (k < 0) k = 0;
    if (k > m - 1) k = m - 1;
    idx[i] = static_cast<int>(k);
  }
  return idx;
}

bool same_grid(const GridSpec& a, const GridSpec& b, double rel_tol) {
  if (a.m != b.m || a.n() != b.n()) return false;
  const double scale = std::max(a.domain.half_side, b.domain.half_side);
  if (std::abs(a.domain.half_side - b.domain.half_side) > rel_tol * scale)
    return false;
  for (int i = 0; i < a.n(); ++i)
    if (std::abs(a.domain.center[i] - b.domain.center[i]) > rel_tol * scale)
      return false;
  return true;
}

std::optional<AlignedSubgrid> aligned_subgrid(const GridSpec& parent,
                                              const Cube& sub) {
  const double h = parent.h();
  const double tol = 1e-9 * h;
  std::array<int, 3> offset{0, 0, 0};
  int span = -1;
  for (int i = 0; i < parent.n(); ++i) {
    const double lo = (sub.corner_low(i) - parent.domain.corner_low(i)) / h;
    const double hi = (sub.corner_high(i) - parent.domain.corner_low(i)) / h;
    const long lo_k = std::lround(lo);
    const long hi_k = std::lround(hi);
    if (std::abs(lo - lo_k) * h > tol || std::abs(hi - hi_k) * h > tol)
      return std::nullopt;
    if (lo_k < 0 || hi_k > parent.m - 1 || hi_k <= lo_k) return std::nullopt;
    const int this_span = static_cast<int>(hi_k - lo_k);
    if (span >= 0 && this_span != span) return std::nullopt;
    span = this_span;
    offset[i] = static_cast<int>(lo_k);
  }
  if (span < 2 || (span + 1) % 2 == 0) return std::nullopt;
  return AlignedSubgrid{GridSpec(sub, span + 1), offset};
}

}  // namespace ellab
