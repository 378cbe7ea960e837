#include "core/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "core/bump.hpp"
#include "core/error.hpp"

namespace ellab {
namespace {

constexpr int kDepthBias = 6;  // shell j maps to dyadic depth j + 6

struct Candidate {
  int depth;
  std::array<int, 3> idx;

  bool operator<(const Candidate& o) const {
    if (depth != o.depth) return depth < o.depth;
    return idx < o.idx;
  }
};

Cube candidate_cube(const GridSpec& spec, const Candidate& c) {
  const double cell = spec.domain.side() / std::ldexp(1.0, c.depth);
  std::array<double, 3> center{0.0, 0.0, 0.0};
  for (int a = 0; a < spec.n(); ++a) {
    center[a] = spec.domain.corner_low(a) + (c.idx[a] + 0.5) * cell;
  }
  if (spec.n() == 2) center[2] = 0.0;
  return Cube(center, cell / 2.0, spec.n());
}

}  // namespace

std::vector<double> chessboard_distance(const NodeMask& mask) {
  const GridSpec& g = mask.spec;
  require(static_cast<long>(mask.on.size()) == g.node_count(),
          ErrorCode::InvalidArgument,
          "chessboard_distance: mask size does not match grid");
  const int n = g.n();
  const long count = g.node_count();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(static_cast<size_t>(count), inf);
  for (long i = 0; i < count; ++i) {
    if (!mask.on[static_cast<size_t>(i)] ||
        g.is_boundary_node(g.node_multi_index(i))) {
      d[static_cast<size_t>(i)] = 0.0;
    }
  }

  // Two-pass chamfer with unit weights over the full Moore neighborhood is
  // exact for the chessboard metric.
  const int zlo = n == 3 ? -1 : 0;
  const int zhi = n == 3 ? 1 : 0;
  auto relax = [&](bool forward) {
    for (long s = 0; s < count; ++s) {
      const long i = forward ? s : count - 1 - s;
      const auto mi = g.node_multi_index(i);
      double best = d[static_cast<size_t>(i)];
      for (int dz = zlo; dz <= zhi; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            const std::array<int, 3> nb{mi[0] + dx, mi[1] + dy, mi[2] + dz};
            if (nb[0] < 0 || nb[0] >= g.m || nb[1] < 0 || nb[1] >= g.m)
              continue;
            if (n == 3 && (nb[2] < 0 || nb[2] >= g.m)) continue;
            const long j = g.node_index(nb);
            const bool visited = forward ? j < i : j > i;
            if (!visited) continue;
            best = std::min(best, d[static_cast<size_t>(j)] + 1.0);
          }
        }
      }
      d[static_cast<size_t>(i)] = best;
    }
  };
  relax(true);
  relax(false);
  for (auto& x : d) x *= g.h();
  return d;
}

std::vector<Cube> whitney_decomposition(const NodeMask& mask,
                                        double base_scale) {
  const GridSpec& g = mask.spec;
  require(std::isfinite(base_scale) && base_scale > 0.0,
          ErrorCode::InvalidArgument,
          "whitney_decomposition: base scale must be positive");
  bool any_off = false;
  for (char c : mask.on) {
    if (!c) {
      any_off = true;
      break;
    }
  }
  require(any_off, ErrorCode::NoExterior,
          "whitney_decomposition: mask covers the whole grid, no exterior");

  const auto dist = chessboard_distance(mask);
  const double big = g.domain.side();
  const int max_depth = static_cast<int>(
      std::floor(std::log2(big / (2.0 * g.h())) + 1e-12));
  require(max_depth >= 0, ErrorCode::TooCoarse,
          "whitney_decomposition: grid cannot resolve any dyadic scale");

  std::set<Candidate> cands;
  for (long i = 0; i < g.node_count(); ++i) {
    const auto mi = g.node_multi_index(i);
    if (!mask.on[static_cast<size_t>(i)] || g.is_boundary_node(mi)) continue;
    const double di = dist[static_cast<size_t>(i)];
    if (di <= 0.0) continue;
    const double t = di / base_scale;
    int j = static_cast<int>(std::floor(-std::log2(t)));
    j = std::max(j, -kDepthBias);
    const int depth = j + kDepthBias;
    // Nodes closer to the complement than the finest representable shell
    // form a skin that no resolvable cube can cover; they are skipped, and
    // the coverage invariant is stated away from that skin.
    if (depth > max_depth) continue;
    const auto p = g.node_point(mi);
    const double cell = big / std::ldexp(1.0, depth);
    Candidate c;
    c.depth = depth;
    c.idx = {0, 0, 0};
    for (int a = 0; a < g.n(); ++a) {
      int k = static_cast<int>(
          std::floor((p[a] - g.domain.corner_low(a)) / cell));
      c.idx[a] = std::clamp(k, 0, (1 << depth) - 1);
    }
    cands.insert(c);
  }
  require(!cands.empty(), ErrorCode::TooCoarse,
          "whitney_decomposition: open set is thinner than the finest "
          "resolvable shell");

  // Keep only maximal candidates: drop any whose strict dyadic ancestor is
  // itself a candidate.
  std::vector<Cube> out;
  for (const auto& c : cands) {
    bool shadowed = false;
    for (int up = 1; up <= c.depth && !shadowed; ++up) {
      Candidate anc;
      anc.depth = c.depth - up;
      anc.idx = {c.idx[0] >> up, c.idx[1] >> up, c.idx[2] >> up};
      shadowed = cands.count(anc) > 0;
    }
    if (!shadowed) out.push_back(candidate_cube(g, c));
  }
  return out;
}

WhitneyCheck verify_whitney(const NodeMask& mask, double base_scale,
                            const std::vector<Cube>& family) {
  const GridSpec& g = mask.spec;
  const auto dist = chessboard_distance(mask);
  const double h = g.h();
  WhitneyCheck check;
  check.inside = true;
  check.touches_exterior = true;
  check.shells_witnessed = true;

  auto nodes_in_box = [&](const Cube& box, auto&& fn) {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};
    for (int a = 0; a < g.n(); ++a) {
      lo[a] = std::max(
          0, static_cast<int>(std::ceil(
                 (box.corner_low(a) - g.domain.corner_low(a)) / h - 1e-9)));
      hi[a] = std::min(
          g.m - 1,
          static_cast<int>(std::floor(
              (box.corner_high(a) - g.domain.corner_low(a)) / h + 1e-9)));
    }
    std::array<int, 3> it = lo;
    if (lo[0] > hi[0] || lo[1] > hi[1] || (g.n() == 3 && lo[2] > hi[2]))
      return;
    while (true) {
      fn(it);
      int a = 0;
      for (; a < g.n(); ++a) {
        if (++it[a] <= hi[a]) break;
        it[a] = lo[a];
      }
      if (a == g.n()) break;
    }
  };

  std::vector<int> overlap(static_cast<size_t>(g.node_count()), 0);
  for (const auto& p : family) {
    // Every node of P must belong to the masked set.
    nodes_in_box(p, [&](const std::array<int, 3>& mi) {
      const long i = g.node_index(mi);
      if (!mask.on[static_cast<size_t>(i)] && !g.is_boundary_node(mi)) {
        check.inside = false;
      }
      if (g.is_boundary_node(mi)) check.inside = false;
    });

    // 64P must contain a complement node (distance zero) or leave the grid.
    const Cube big = dilate(p, 64.0);
    bool touches = !contains_cube(g.domain, big, 1e-9 * g.domain.half_side);
    if (!touches) {
      nodes_in_box(big, [&](const std::array<int, 3>& mi) {
        if (dist[static_cast<size_t>(g.node_index(mi))] == 0.0) touches = true;
      });
    }
    if (!touches) check.touches_exterior = false;

    // Shell witness: some node of P has complement distance inside the
    // shell for P's scale, up to one grid step; and the node nearest the
    // center sits within half a side plus one step of the shell.
    const int depth_guess = static_cast<int>(
        std::lround(std::log2(g.domain.side() / p.side())));
    const int j = depth_guess - kDepthBias;
    const double lo_d = std::ldexp(1.0, -j - 1) * base_scale;
    const double hi_d = std::ldexp(1.0, -j) * base_scale;
    bool witness = false;
    nodes_in_box(p, [&](const std::array<int, 3>& mi) {
      const double d = dist[static_cast<size_t>(g.node_index(mi))];
      if (d >= lo_d - h - 1e-12 && d <= hi_d + h + 1e-12) witness = true;
    });
    const auto cn = g.nearest_node({p.center[0], p.center[1], p.center[2]});
    const double dc = dist[static_cast<size_t>(g.node_index(cn))];
    const double slack = p.half_side + h + 1e-12;
    const bool center_ok = dc >= lo_d - slack && dc <= hi_d + slack;
    if (!witness || !center_ok) check.shells_witnessed = false;

    nodes_in_box(dilate(p, 8.0), [&](const std::array<int, 3>& mi) {
      ++overlap[static_cast<size_t>(g.node_index(mi))];
    });
  }

  check.max_overlap_8p = 0;
  for (int c : overlap) check.max_overlap_8p = std::max(check.max_overlap_8p, c);

  // Coverage holds away from the unresolvable skin: nodes closer to the
  // complement than the finest representable shell cannot own a cube.
  const int max_depth = static_cast<int>(
      std::floor(std::log2(g.domain.side() / (2.0 * h)) + 1e-12));
  const double skin =
      std::ldexp(1.0, -(max_depth - kDepthBias) - 1) * base_scale;
  check.covers = true;
  for (long i = 0; i < g.node_count(); ++i) {
    const auto mi = g.node_multi_index(i);
    if (!mask.on[static_cast<size_t>(i)] || g.is_boundary_node(mi)) continue;
    if (dist[static_cast<size_t>(i)] <= skin * (1.0 + 1e-12)) continue;
    const auto pt = g.node_point(mi);
    bool hit = false;
    for (const auto& p : family) {
      if (contains_point(p, pt, 1e-9 * p.half_side)) {
        hit = true;
        break;
      }
    }
    if (!hit) {
      check.covers = false;
      break;
    }
  }
  return check;
}

PartitionOfUnity::PartitionOfUnity(std::vector<Cube> cubes)
    : cubes_(std::move(cubes)) {
  require(!cubes_.empty(), ErrorCode::InvalidArgument,
          "partition of unity: empty cube family");
  for (size_t i = 0; i < cubes_.size(); ++i) {
    for (size_t j = i + 1; j < cubes_.size(); ++j) {
      if (!cubes_intersect(dilate(cubes_[i], 2.0), dilate(cubes_[j], 2.0)))
        continue;
      const double ratio = cubes_[i].half_side / cubes_[j].half_side;
      require(ratio <= 4.0 + 1e-12 && ratio >= 0.25 - 1e-12,
              ErrorCode::InvalidArgument,
              "partition of unity: interacting cubes violate the side-ratio "
              "bound expected of a Whitney family");
    }
  }
}

double PartitionOfUnity::tilde(int k, const std::array<double, 3>& p) const {
  const Cube& q = cubes_[static_cast<size_t>(k)];
  double value = 1.0;
  for (int a = 0; a < q.n; ++a) {
    value *= cutoff_profile((p[a] - q.center[a]) / q.half_side);
    if (value == 0.0) return 0.0;
  }
  return value;
}

double PartitionOfUnity::sum_tilde(const std::array<double, 3>& p) const {
  double acc = 0.0;
  for (size_t k = 0; k < cubes_.size(); ++k) {
    acc += tilde(static_cast<int>(k), p);
  }
  return acc;
}

double PartitionOfUnity::weight(int k, const std::array<double, 3>& p) const {
  const double t = tilde(k, p);
  if (t == 0.0) return 0.0;
  return t / sum_tilde(p);
}

}  // namespace ellab
