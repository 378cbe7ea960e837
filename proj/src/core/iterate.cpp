#include "core/iterate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "core/bump.hpp"
#include "core/error.hpp"
#include "core/norms.hpp"
#include "core/solver.hpp"
#include "core/whitney.hpp"

namespace ellab {
namespace {

// Copies node values of an exactly resolved subcube out of the parent grid.
std::vector<double> restrict_values(const GridSpec& parent,
                                    const std::vector<double>& v, int comps,
                                    const AlignedSubgrid& sub) {
  std::vector<double> out(static_cast<size_t>(sub.grid.node_count()) * comps);
  for (long i = 0; i < sub.grid.node_count(); ++i) {
    auto idx = sub.grid.node_multi_index(i);
    for (int a = 0; a < parent.n(); ++a) idx[a] += sub.offset[a];
    const long src = parent.node_index(idx);
    for (int c = 0; c < comps; ++c) {
      out[static_cast<size_t>(i) * comps + c] =
          v[static_cast<size_t>(src) * comps + c];
    }
  }
  return out;
}

ScalarField restrict_scalar(const ScalarField& f, const AlignedSubgrid& sub) {
  ScalarField out(sub.grid);
  out.v = restrict_values(f.spec, f.v, 1, sub);
  return out;
}

VectorField restrict_vector(const VectorField& f, const AlignedSubgrid& sub) {
  VectorField out(sub.grid);
  out.v = restrict_values(f.spec, f.v, f.spec.n(), sub);
  return out;
}

MatrixField restrict_matrix(const MatrixField& f, const AlignedSubgrid& sub) {
  MatrixField out(sub.grid);
  out.v = restrict_values(f.spec, f.v, f.spec.n() * f.spec.n(), sub);
  return out;
}

// Node-wise B^T g.
VectorField transpose_apply(const MatrixField& b, const VectorField& g) {
  const int n = b.spec.n();
  VectorField out(b.spec);
  for (long i = 0; i < b.spec.node_count(); ++i) {
    const double* bm = b.at(i);
    const double* gv = g.at(i);
    double* ov = out.at(i);
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int s = 0; s < n; ++s) acc += bm[s * n + r] * gv[s];
      ov[r] = acc;
    }
  }
  return out;
}

// Sup over grid nodes inside the closed cube of the operator norm of
// A(node) - a0.  An empty node sample means the cube outran the grid, which
// callers treat as a depth-truncation signal.
double defect_sup(const MatrixField& a, const std::array<double, 9>& a0,
                  const Cube& region) {
  const int n = a.spec.n();
  double best = 0.0;
  long count = 0;
  double diff[9];
  for (long i = 0; i < a.spec.node_count(); ++i) {
    if (!contains_point(region, a.spec.node_point(i), 1e-12 * region.side())) {
      continue;
    }
    const double* av = a.at(i);
    for (int c = 0; c < n * n; ++c) diff[c] = av[c] - a0[c];
    best = std::max(best, operator_norm(diff, n));
    ++count;
  }
  require(count > 0, ErrorCode::TooCoarse,
          "coefficient defect: no grid node inside the region");
  return best;
}

// Cell-centroid q-power mean of the operator norm of A - a0 over the cube.
double defect_mean(const MatrixField& a, const std::array<double, 9>& a0,
                   const Cube& region, double qexp) {
  const GridSpec& g = a.spec;
  const int n = g.n();
  const int corners = 1 << n;
  double acc = 0.0;
  long count = 0;
  double cm[9];
  double diff[9];
  for (long c = 0; c < g.cell_count(); ++c) {
    const auto cell = g.cell_multi_index(c);
    if (!contains_half_open(region, g.cell_centroid(cell), 0.0)) continue;
    for (int k = 0; k < n * n; ++k) cm[k] = 0.0;
    for (int k = 0; k < corners; ++k) {
      auto idx = cell;
      for (int a2 = 0; a2 < n; ++a2) idx[a2] += (k >> a2) & 1;
      const double* av = a.at(g.node_index(idx));
      for (int k2 = 0; k2 < n * n; ++k2) cm[k2] += av[k2];
    }
    for (int k = 0; k < n * n; ++k) diff[k] = cm[k] / corners - a0[k];
    acc += std::pow(operator_norm(diff, n), qexp);
    ++count;
  }
  require(count > 0, ErrorCode::TooCoarse,
          "coefficient defect: no cell centroid inside the region");
  return std::pow(acc / static_cast<double>(count), 1.0 / qexp);
}

// The peak-one tensor bump supported in the double of q (the same profile
// the pairing experiments use), evaluated analytically.
double base_bump(const Cube& q, const std::array<double, 3>& x) {
  double v = std::pow(bump_profile(0.0), -q.n);
  const double inv = 1.0 / q.side();
  for (int a = 0; a < q.n; ++a) v *= bump_profile((x[a] - q.center[a]) * inv);
  return v;
}

// Unnormalized power norm over a region: |region|^(1/q) times the power
// mean of the field there.
double lq_norm(const VectorField& f, const Cube& region, double q) {
  return std::pow(region.volume(), 1.0 / q) * power_mean(f, region, q);
}

struct ChainStepInput {
  const CoefficientField* a = nullptr;       // coefficient on the data grid
  const VectorField* src = nullptr;          // previous field (or the datum)
  const Cube* src_support = nullptr;         // support cube of src, if any
  const std::array<double, 9>* parent_ap = nullptr;  // defect multiplier
  const Cube* bump_cube = nullptr;           // multiply by the base bump
  const PartitionOfUnity* pou = nullptr;     // smooth cutoff family
  int pou_index = -1;
  bool sharp_mask = false;                   // restrict load cells to child
};

// One recursion step: assemble the cut-off multiplier datum on a fresh
// grid over 3*child and return the gradient of its projected potential.
VectorField chain_step(const ChainStepInput& in, const Cube& child,
                       const std::array<double, 9>& child_ap, int m_sub,
                       double tol) {
  const Cube c3 = dilate(child, 3.0);
  const GridSpec fresh(c3, m_sub);
  const int n = fresh.n();
  const GridSpec& data = in.a->base.spec;
  VectorField load(fresh);
  double base[3];
  double amat[9];
  const double slack =
      1e-12 * (in.src_support != nullptr ? in.src_support->side() : 1.0);
  for (long i = 0; i < fresh.node_count(); ++i) {
    const auto x = fresh.node_point(i);
    if (in.src_support != nullptr &&
        !contains_point(*in.src_support, x, slack)) {
      continue;  // the previous field vanishes outside its support
    }
    double cut = 1.0;
    if (in.bump_cube != nullptr) cut *= base_bump(*in.bump_cube, x);
    if (in.pou != nullptr) cut *= in.pou->weight(in.pou_index, x);
    if (cut == 0.0) continue;
    sample_at(in.src->spec, in.src->v, n, x, base);
    double* lv = load.at(i);
    if (in.parent_ap != nullptr) {
      sample_at(data, in.a->base.v, n * n, x, amat);
      for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int s = 0; s < n; ++s) {
          acc += (amat[s * n + r] - (*in.parent_ap)[s * n + r]) * base[s];
        }
        lv[r] = cut * acc;
      }
    } else {
      for (int r = 0; r < n; ++r) lv[r] = cut * base[r];
    }
  }
  const CoefficientField frozen = frozen_coefficient(fresh, child_ap);
  return project_T(frozen, load, tol, in.sharp_mask ? &child : nullptr).grad_t;
}

double validate_exponent(SplitVariant variant, int n, double q_or_p) {
  if (variant == SplitVariant::lq) {
    require(q_or_p > 2.0, ErrorCode::InvalidArgument,
            "iteration: the sharp-cutoff flavor needs an exponent q > 2");
    return 0.0;
  }
  return validate_alpha_p(n, q_or_p);
}

}  // namespace

double PairingSplit::recombination_error() const {
  const double recombined = term_i + term_ii;
  const double denom = std::max(std::fabs(direct), std::fabs(recombined));
  if (denom == 0.0) return 0.0;
  return std::fabs(direct - recombined) / denom;
}

PairingSplit pairing_split(const CoefficientField& a, const ScalarField& u,
                           const MatrixField& b, const VectorField& g,
                           const Cube& q, SplitVariant variant, double tol) {
  const GridSpec& gs = u.spec;
  require(same_grid(gs, a.base.spec) && same_grid(gs, b.spec) &&
              same_grid(gs, g.spec),
          ErrorCode::InvalidArgument,
          "pairing split: coefficient, solution, multiplier and datum must "
          "share one grid");
  require(q.n == gs.n(), ErrorCode::InvalidArgument,
          "pairing split: cube dimension does not match the grid");
  validate_finite(g.v, "pairing split datum");

  const bool sharp = variant == SplitVariant::lq;
  const int ratio = sharp ? 8 : 27;
  const Cube outer = sharp ? q : dilate(q, 3.0);

  const auto outer_sub = aligned_subgrid(gs, outer);
  require(outer_sub.has_value(), ErrorCode::InvalidArgument,
          "pairing split: the split region must sit on grid nodes");
  const int span = outer_sub->grid.m - 1;
  require(span % ratio == 0, ErrorCode::InvalidArgument,
          "pairing split: the split region must span a multiple of " +
              std::to_string(ratio) + " grid cells");
  require((span / ratio) % 2 == 0, ErrorCode::InvalidArgument,
          "pairing split: the split region must span an even number of cells "
          "per subcube (grids use odd node counts)");
  const int sub_nodes = 3 * (span / ratio) + 1;
  require(sub_nodes >= 9, ErrorCode::TooCoarse,
          "pairing split: tripled subcube grids need at least 9 nodes per "
          "axis");

  const auto parts = subdivide_ratio(outer, ratio);
  for (const Cube& p : parts) {
    require(contains_cube(gs.domain, dilate(p, 3.0),
                          1e-9 * gs.domain.half_side),
            ErrorCode::DomainMargin,
            "pairing split: a tripled subcube leaves the grid domain");
  }

  std::optional<PartitionOfUnity> pou;
  if (!sharp) pou.emplace(parts);

  const VectorField w = transpose_apply(b, g);
  const VectorField grad_u = reconstruct_gradient(u);

  PairingSplit out;
  out.variant = variant;
  out.direct = load_pairing(w, u, &outer);
  out.cubes.reserve(parts.size());

  const int n = gs.n();
  for (size_t k = 0; k < parts.size(); ++k) {
    const Cube& p = parts[k];
    const Cube p3 = dilate(p, 3.0);
    const auto sub = aligned_subgrid(gs, p3);
    require(sub.has_value(), ErrorCode::Internal,
            "pairing split: tripled subcube unexpectedly misaligned");

    SplitCube rec;
    rec.p = p;
    rec.a_frozen = mean_over(a.base, p3);
    rec.defect = defect_sup(a.base, rec.a_frozen, p3);

    VectorField w_sub = restrict_vector(w, *sub);
    if (!sharp) {
      for (long i = 0; i < sub->grid.node_count(); ++i) {
        const double psi =
            pou->weight(static_cast<int>(k), sub->grid.node_point(i));
        for (int r = 0; r < n; ++r) w_sub.at(i)[r] *= psi;
      }
    }

    const Cube* load_region = sharp ? &p : &outer;
    const ScalarField u_p = solve_local_frozen(p3, rec.a_frozen, u, tol);
    rec.i_value = load_pairing(w_sub, u_p, load_region);

    const CoefficientField frozen = frozen_coefficient(sub->grid, rec.a_frozen);
    ProjectionResult proj = project_T(frozen, w_sub, tol, load_region);

    const ScalarField u_sub = restrict_scalar(u, *sub);
    const MatrixField a_sub = restrict_matrix(a.base, *sub);
    MatrixField frozen_minus_a(sub->grid);
    for (long i = 0; i < sub->grid.node_count(); ++i) {
      const double* av = a_sub.at(i);
      double* dv = frozen_minus_a.at(i);
      for (int c = 0; c < n * n; ++c) dv[c] = rec.a_frozen[c] - av[c];
    }
    rec.ii_value = energy_pairing(frozen_minus_a, false, u_sub, proj.t);

    const VectorField gu_sub = restrict_vector(grad_u, *sub);
    rec.defect_grad = VectorField(sub->grid);
    for (long i = 0; i < sub->grid.node_count(); ++i) {
      const double* dv = frozen_minus_a.at(i);
      const double* gv = gu_sub.at(i);
      double* ov = rec.defect_grad.at(i);
      for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        // stored with the sign (A - A_P) grad u, the next level's multiplier
        for (int s = 0; s < n; ++s) acc -= dv[r * n + s] * gv[s];
        ov[r] = acc;
      }
    }
    rec.t_grad = std::move(proj.grad_t);

    out.term_i += rec.i_value;
    out.term_ii += rec.ii_value;
    out.cubes.push_back(std::move(rec));
  }
  return out;
}

IterationTrace run_iteration(const CoefficientField& a, const ScalarField& u,
                             const VectorField& g, const Cube& q0, int depth,
                             SplitVariant variant, double q_or_p, int n_paths,
                             unsigned seed, int m_sub, double tol) {
  const GridSpec& gs = u.spec;
  require(same_grid(gs, a.base.spec) && same_grid(gs, g.spec),
          ErrorCode::InvalidArgument,
          "iteration: coefficient, solution and datum must share one grid");
  require(q0.n == gs.n(), ErrorCode::InvalidArgument,
          "iteration: cube dimension does not match the grid");
  require(depth >= 1, ErrorCode::InvalidArgument,
          "iteration: depth must be at least 1");
  require(m_sub >= 9 && m_sub % 2 == 1 && (m_sub - 1) % 3 == 0,
          ErrorCode::InvalidArgument,
          "iteration: the fresh subgrid needs an odd node count >= 9 with a "
          "span divisible by 3");
  require(n_paths >= 1, ErrorCode::InvalidArgument,
          "iteration: need at least one sample path");
  const int n = gs.n();
  const double alpha = validate_exponent(variant, n, q_or_p);

  const bool sharp = variant == SplitVariant::lq;
  const double enclosing = sharp ? 3.0 : 4.0;
  require(contains_cube(gs.domain, dilate(q0, enclosing),
                        1e-9 * gs.domain.half_side),
          ErrorCode::DomainMargin,
          "iteration: the data grid must cover the enclosing dilate of the "
          "base cube");

  const double qp = sharp ? q_or_p / (q_or_p - 1.0) : 0.0;
  const VectorField grad_u = reconstruct_gradient(u);
  const Cube q3 = dilate(q0, 3.0);

  IterationTrace trace;
  trace.variant = variant;
  trace.exponent = q_or_p;

  // Level 0: the datum itself, cut off by the base bump in the smooth
  // flavor, measured over the tripled base cube.
  {
    IterationLevel lvl;
    lvl.k = 0;
    lvl.cube_count = 1;
    lvl.evaluated = 1;
    lvl.subcube_side = q3.side();
    lvl.work_cells = q3.side() / gs.h();
    lvl.fresh_m = gs.m;
    const double avg2 = power_mean(grad_u, q3, 2.0);
    if (sharp) {
      lvl.term_sum =
          std::pow(q0.volume(), 1.0 / q_or_p) * avg2 * lq_norm(g, q3, qp);
    } else {
      VectorField cutoff(gs);
      for (long i = 0; i < gs.node_count(); ++i) {
        const double psi = base_bump(q0, gs.node_point(i));
        const double* gv = g.at(i);
        double* cv = cutoff.at(i);
        for (int r = 0; r < n; ++r) cv[r] = psi * gv[r];
      }
      lvl.term_sum = avg2 * hardy_z_norm(cutoff, q3, q_or_p).value;
    }
    trace.levels.push_back(lvl);
  }

  // Each level branches by ratio^n cubes per parent, so nominal counts grow
  // as branch^k.  Level 1 and any level still within the full-enumeration
  // budget are computed exactly; deeper levels are estimated from uniformly
  // sampled parent chains started at the last enumerated level.
  const int ratio = sharp ? 8 : 27;
  const long branch = [&] {
    long b = 1;
    for (int i = 0; i < n; ++i) b *= ratio;
    return b;
  }();
  const long max_full = 4096;
  const long max_nominal = 4000000000000000L;  // still exact in a double
  const double level_weight =
      sharp ? 1.0 : std::pow(27.0, -(alpha + static_cast<double>(n)));

  struct FrontierNode {
    Cube p;
    std::array<double, 9> ap{};
    VectorField field;  // the operator output on the fresh grid over 3p
  };

  // Child family of a frontier cube: the sharp flavor refines the cube
  // itself, the smooth flavor refines its triple.
  const auto children_of = [&](const Cube& parent) {
    return sharp ? subdivide_ratio(parent, 8)
                 : subdivide_ratio(dilate(parent, 3.0), 27);
  };

  std::mt19937 rng(seed);
  std::vector<FrontierNode> frontier;  // full enumeration of one level
  int frontier_level = 0;
  bool frontier_full = true;
  long nominal = 1;

  const auto eval_term = [&](const Cube& child,
                             const std::array<double, 9>& child_ap,
                             const VectorField& field) {
    const Cube c3 = dilate(child, 3.0);
    const double avg2 = power_mean(grad_u, c3, 2.0);
    if (sharp) {
      const double def = defect_mean(a.base, child_ap, c3, q_or_p);
      return def * std::pow(child.volume(), 1.0 / q_or_p) * avg2 *
             lq_norm(field, c3, qp);
    }
    const double def = defect_sup(a.base, child_ap, c3);
    return def * avg2 * hardy_z_norm(field, c3, q_or_p).value;
  };

  for (int k = 1; k < depth; ++k) {
    require(nominal <= max_nominal / branch, ErrorCode::InvalidArgument,
            "iteration: depth overflows the nominal cube count");
    nominal *= branch;
    IterationLevel lvl;
    lvl.k = k;
    lvl.cube_count = nominal;
    lvl.fresh_m = m_sub;
    const double weight = std::pow(level_weight, static_cast<double>(k));

    bool resolved = true;
    try {
      if (k == 1 || (frontier_full && nominal <= max_full)) {
        // Exact enumeration of the level.
        std::vector<FrontierNode> next;
        double sum = 0.0;
        const bool root = k == 1;
        const size_t parent_count = root ? 1 : frontier.size();
        for (size_t pi = 0; pi < parent_count; ++pi) {
          const Cube parent = root ? q0 : frontier[pi].p;
          const auto kids = children_of(parent);
          std::optional<PartitionOfUnity> pou;
          if (!sharp) pou.emplace(kids);
          for (size_t ci = 0; ci < kids.size(); ++ci) {
            const Cube& child = kids[ci];
            FrontierNode node;
            node.p = child;
            node.ap = mean_over(a.base, dilate(child, 3.0));
            ChainStepInput in;
            in.a = &a;
            in.sharp_mask = sharp;
            if (!sharp) {
              in.pou = &*pou;
              in.pou_index = static_cast<int>(ci);
            }
            if (root) {
              in.src = &g;
              if (!sharp) in.bump_cube = &q0;
            } else {
              in.src = &frontier[pi].field;
              in.src_support = &frontier[pi].field.spec.domain;
              in.parent_ap = &frontier[pi].ap;
            }
            node.field = chain_step(in, child, node.ap, m_sub, tol);
            sum += eval_term(child, node.ap, node.field);
            lvl.subcube_side = dilate(child, 3.0).side();
            next.push_back(std::move(node));
          }
        }
        lvl.evaluated = static_cast<long>(next.size());
        lvl.term_sum = weight * sum;
        frontier = std::move(next);
        frontier_level = k;
      } else {
        // Uniform parent chains from the last fully enumerated level give
        // an unbiased estimate of the level sum.
        require(!frontier.empty(), ErrorCode::Internal,
                "iteration: sampling requires an enumerated frontier");
        frontier_full = false;
        double mean_x = 0.0;
        double side = 0.0;
        std::uniform_int_distribution<size_t> pick_start(0,
                                                         frontier.size() - 1);
        for (int s = 0; s < n_paths; ++s) {
          FrontierNode cur = frontier[pick_start(rng)];
          for (int lev = frontier_level; lev < k; ++lev) {
            const auto kids = children_of(cur.p);
            std::optional<PartitionOfUnity> pou;
            if (!sharp) pou.emplace(kids);
            std::uniform_int_distribution<size_t> pick_child(0,
                                                             kids.size() - 1);
            const size_t ci = pick_child(rng);
            FrontierNode node;
            node.p = kids[ci];
            node.ap = mean_over(a.base, dilate(node.p, 3.0));
            ChainStepInput in;
            in.a = &a;
            in.sharp_mask = sharp;
            if (!sharp) {
              in.pou = &*pou;
              in.pou_index = static_cast<int>(ci);
            }
            in.src = &cur.field;
            in.src_support = &cur.field.spec.domain;
            in.parent_ap = &cur.ap;
            node.field = chain_step(in, node.p, node.ap, m_sub, tol);
            cur = std::move(node);
          }
          mean_x += eval_term(cur.p, cur.ap, cur.field);
          side = dilate(cur.p, 3.0).side();
        }
        mean_x /= static_cast<double>(n_paths);
        lvl.evaluated = n_paths;
        lvl.subcube_side = side;
        lvl.term_sum = weight * static_cast<double>(nominal) * mean_x;
      }
    } catch (const Error&) {
      resolved = false;
    }
    if (!resolved) {
      trace.truncated = true;
      break;
    }
    lvl.work_cells = lvl.subcube_side / gs.h();
    trace.levels.push_back(lvl);
  }

  trace.depth = static_cast<int>(trace.levels.size());
  double worst = 0.0;
  for (size_t i = 0; i + 1 < trace.levels.size(); ++i) {
    const double cur = trace.levels[i].term_sum;
    const double nxt = trace.levels[i + 1].term_sum;
    if (cur > 0.0) {
      worst = std::max(worst, nxt / cur);
    } else if (nxt > 0.0) {
      worst = std::numeric_limits<double>::infinity();
    }
  }
  trace.decay_ratio = worst;
  for (size_t i = 0; i < trace.levels.size(); ++i) {
    double rem = 0.0;
    for (size_t j = i + 1; j < trace.levels.size(); ++j) {
      rem += trace.levels[j].term_sum;
    }
    trace.levels[i].remainder = rem;
  }
  return trace;
}

FrozenOperatorChain operator_chain(const CoefficientField& a,
                                   const VectorField& g, const Cube& q0,
                                   const std::vector<int>& path,
                                   SplitVariant variant, int m_sub,
                                   double tol) {
  require(same_grid(a.base.spec, g.spec), ErrorCode::InvalidArgument,
          "operator chain: coefficient and datum must share one grid");
  require(m_sub >= 9 && m_sub % 2 == 1, ErrorCode::InvalidArgument,
          "operator chain: the fresh subgrid needs an odd node count >= 9");
  const GridSpec& gs = g.spec;
  const int n = gs.n();
  const bool sharp = variant == SplitVariant::lq;
  const double enclosing = sharp ? 3.0 : 4.0;
  require(contains_cube(gs.domain, dilate(q0, enclosing),
                        1e-9 * gs.domain.half_side),
          ErrorCode::DomainMargin,
          "operator chain: the data grid must cover the enclosing dilate of "
          "the base cube");

  FrozenOperatorChain chain;
  chain.parents.push_back(q0);

  // fields[0]: the datum, with the base bump applied in the smooth flavor.
  VectorField base = g;
  if (!sharp) {
    for (long i = 0; i < gs.node_count(); ++i) {
      const double psi = base_bump(q0, gs.node_point(i));
      for (int r = 0; r < n; ++r) base.at(i)[r] *= psi;
    }
  }
  chain.fields.push_back(std::move(base));

  Cube parent = q0;
  std::array<double, 9> parent_ap{};
  for (size_t j = 0; j < path.size(); ++j) {
    const bool root = j == 0;
    const auto kids = sharp ? subdivide_ratio(parent, 8)
                            : subdivide_ratio(dilate(parent, 3.0), 27);
    require(path[j] >= 0 && path[j] < static_cast<int>(kids.size()),
            ErrorCode::InvalidArgument,
            "operator chain: child index out of range");
    std::optional<PartitionOfUnity> pou;
    if (!sharp) pou.emplace(kids);
    const Cube child = kids[static_cast<size_t>(path[j])];
    const std::array<double, 9> child_ap =
        mean_over(a.base, dilate(child, 3.0));
    ChainStepInput in;
    in.a = &a;
    in.sharp_mask = sharp;
    if (!sharp) {
      in.pou = &*pou;
      in.pou_index = path[j];
    }
    in.src = &chain.fields.back();
    if (!root) {
      in.src_support = &chain.fields.back().spec.domain;
      in.parent_ap = &parent_ap;
    }
    chain.fields.push_back(chain_step(in, child, child_ap, m_sub, tol));
    chain.parents.push_back(child);
    parent = child;
    parent_ap = child_ap;
  }
  return chain;
}

GradientBounds gradient_bounds_from_duality(const CoefficientField& a,
                                            const ScalarField& u,
                                            const Cube& q0, double alpha) {
  require(same_grid(a.base.spec, u.spec), ErrorCode::InvalidArgument,
          "gradient bounds: coefficient and solution must share one grid");
  require(alpha >= 0.0 && alpha < 1.0, ErrorCode::InvalidArgument,
          "gradient bounds: the smoothness exponent must lie in [0, 1)");
  require(contains_cube(u.spec.domain, dilate(q0, 4.0),
                        1e-9 * u.spec.domain.half_side),
          ErrorCode::DomainMargin,
          "gradient bounds: the grid must cover the 4-fold dilate");
  const VectorField gu = reconstruct_gradient(u);
  const Cube q2 = dilate(q0, 2.0);
  const int n = u.spec.n();

  GradientBounds out;
  out.l2_avg = power_mean(gu, dilate(q0, 4.0), 2.0);
  for (long i = 0; i < u.spec.node_count(); ++i) {
    if (!contains_point(q2, u.spec.node_point(i), 1e-12 * q2.side())) continue;
    double norm2 = 0.0;
    const double* gv = gu.at(i);
    for (int r = 0; r < n; ++r) norm2 += gv[r] * gv[r];
    out.sup_norm = std::max(out.sup_norm, std::sqrt(norm2));
  }
  const double numer =
      holder_seminorm(gu, alpha, q2) * std::pow(q0.side(), alpha);
  if (out.l2_avg > 0.0) {
    out.holder_quotient = numer / out.l2_avg;
  } else if (numer > 0.0 || out.sup_norm > 0.0) {
    out.holder_quotient = std::numeric_limits<double>::infinity();
    out.degenerate = true;
  }
  return out;
}

std::vector<MeyersPoint> meyers_scan(const VectorField& u_grad, const Cube& q,
                                     const std::vector<double>& q_grid) {
  require(!q_grid.empty(), ErrorCode::InvalidArgument,
          "higher-integrability scan: empty exponent grid");
  require(contains_cube(u_grad.spec.domain, dilate(q, 2.0),
                        1e-9 * u_grad.spec.domain.half_side),
          ErrorCode::DomainMargin,
          "higher-integrability scan: the grid must cover the double cube");
  const double denom = power_mean(u_grad, dilate(q, 2.0), 2.0);
  std::vector<MeyersPoint> out;
  out.reserve(q_grid.size());
  for (double qv : q_grid) {
    require(qv > 0.0, ErrorCode::InvalidArgument,
            "higher-integrability scan: exponents must be positive");
    MeyersPoint pt;
    pt.q = qv;
    const double numer = power_mean(u_grad, q, qv);
    pt.ratio = denom == 0.0 ? 0.0 : numer / denom;
    out.push_back(pt);
  }
  return out;
}

}  // namespace ellab
