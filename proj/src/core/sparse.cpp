#include "core/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/bump.hpp"
#include "core/norms.hpp"

namespace ellab {

namespace {

/// Multilinear sample with zero continuation outside the field's domain.
double sample_or_zero(const ScalarField& f, const std::array<double, 3>& p) {
  const Cube& d = f.spec.domain;
  for (int a = 0; a < d.n; ++a) {
    if (p[a] < d.corner_low(a) - 1e-12 || p[a] > d.corner_high(a) + 1e-12)
      return 0.0;
  }
  double out = 0.0;
  sample_at(f.spec, f.v, 1, p, &out);
  return out;
}

/// Work resolution over 3Q: either the caller's odd m3 or the next 6k+1
/// at least matching the source spacing, so the inner third is cell-aligned
/// and the half-open node count of Q reproduces |Q| exactly.
int work_resolution(const GridSpec& source, const Cube& q3, int m3) {
  if (m3 != 0) {
    require(m3 % 2 == 1 && m3 >= 19, ErrorCode::InvalidArgument,
            "stopping grid resolution must be odd and at least 19");
    return m3;
  }
  long nodes = std::max<long>(19, lround(q3.side() / source.h()) + 1);
  long k = (nodes + 4) / 6;  // smallest k with 6k + 1 >= nodes
  return static_cast<int>(6 * k + 1);
}

int dyadic_index(double x, double lo, double side, int cells) {
  int j = static_cast<int>(std::floor((x - lo) / side * cells));
  return std::clamp(j, 0, cells - 1);
}

/// Cached per-depth values of the two functionals on every dyadic subcube.
struct DepthTable {
  int cells = 1;
  std::vector<double> v1, v2;
};

/// Flags the half-open nodes of `c`; optionally accumulates into `claimed`.
void mark_half_open(const GridSpec& ref, const Cube& c, std::vector<char>* mask,
                    std::vector<char>* claimed) {
  const double tol = 1e-9 * ref.h();
  const long nn = ref.node_count();
  for (long i = 0; i < nn; ++i) {
    if (contains_half_open(c, ref.node_point(i), tol)) {
      (*mask)[i] = 1;
      if (claimed != nullptr) (*claimed)[i] = 1;
    }
  }
}

struct FamilyBuilder {
  const VectorField& u_grad;
  const VectorField& g;
  double eps = 0.5;
  double p = 1.0;
  int m_phi = 65;
  SparseFamily* fam = nullptr;

  /// Appends `c` with its chosen set (half-open nodes minus grandchild
  /// claims) and flags the cube's nodes in `up_claimed`.  depth_left >= 1
  /// reruns the stopping construction on `c` with its own bump; children
  /// poking outside `c` are ignored so claims stay nested.
  void add_subtree(const Cube& c, int depth_left,
                   std::vector<char>* up_claimed) {
    const GridSpec& ref = fam->ref;
    const long nn = ref.node_count();
    std::vector<char> own(nn, 0);
    mark_half_open(ref, c, &own, up_claimed);
    std::vector<char> child_claimed(nn, 0);
    if (depth_left >= 1 && lround(c.side() / ref.h()) >= 2) {
      ScalarField bump = make_pairing_bump(c, 1.0, m_phi);
      bool resolved = true;
      StoppingResult st;
      try {
        st = stopping_cubes(u_grad, g, c, bump, 0.9 * eps, p, 0);
      } catch (const StoppingError&) {
        resolved = false;  // keep c as a leaf when its budget is infeasible
      }
      if (resolved) {
        for (const Cube& gc : st.whitney) {
          if (!contains_cube(c, gc, 1e-9 * c.side())) continue;
          add_subtree(gc, depth_left - 1, &child_claimed);
        }
      }
    }
    for (long i = 0; i < nn; ++i) {
      if (child_claimed[i]) own[i] = 0;
    }
    fam->cubes.push_back(c);
    fam->chosen.push_back(std::move(own));
  }
};

}  // namespace

StoppingResult stopping_cubes(const VectorField& u_grad, const VectorField& g,
                              const Cube& q, const ScalarField& phi_q,
                              double eps, double p, int m3) {
  const int n = q.n;
  require(n == 2 || n == 3, ErrorCode::InvalidArgument,
          "dimension must be 2 or 3");
  require(eps > 0.0 && eps < 1.0, ErrorCode::InvalidArgument,
          "stopping budget eps must lie in (0, 1)");
  validate_alpha_p(n, p);
  require(u_grad.spec.n() == n && g.spec.n() == n, ErrorCode::InvalidArgument,
          "field dimension mismatch");
  const Cube q6 = dilate(q, 6.0);
  require(contains_cube(u_grad.spec.domain, q6, 1e-9 * q.side()),
          ErrorCode::DomainMargin, "gradient field must cover 6Q");
  require(contains_cube(g.spec.domain, q6, 1e-9 * q.side()),
          ErrorCode::DomainMargin, "datum field must cover 6Q");

  StoppingResult out;
  const Cube q3 = dilate(q, 3.0);
  out.work = GridSpec(q3, work_resolution(u_grad.spec, q3, m3));
  const long nn = out.work.node_count();
  const double hw = out.work.h();

  // Localized energy density phi_Q |grad u|^2 on the work grid.
  ScalarField integ(out.work);
  for (long i = 0; i < nn; ++i) {
    const auto x = out.work.node_point(i);
    double gu[3] = {0.0, 0.0, 0.0};
    sample_at(u_grad.spec, u_grad.v, n, x, gu);
    double norm2 = 0.0;
    for (int a = 0; a < n; ++a) norm2 += gu[a] * gu[a];
    integ.v[i] = sample_or_zero(phi_q, x) * norm2;
  }
  CellAverages cells(integ);

  // Dyadic tree on 3Q; the finest generation spans at least two work cells,
  // keeping the per-cube node blocks well below the eps budget so the level
  // sets can settle between full blocks.
  const int span = out.work.m - 1;
  int dmax = 0;
  while ((span >> (dmax + 1)) >= 2) ++dmax;

  const double side3 = q3.side();
  // The Hardy ladder stops once the doubled subcubes would drop below the
  // datum's own resolution: multilinear data has no finer-scale content, so
  // the local norms plateau there and deeper levels add only cost.
  const double hg = g.spec.h();
  int dmax2 = 0;
  while (dmax2 < dmax && side3 / (1 << (dmax2 + 1)) >= 2.0 * hg) ++dmax2;
  const std::array<double, 3> lo3{q3.corner_low(0), q3.corner_low(1),
                                  n == 3 ? q3.corner_low(2) : 0.0};
  std::vector<DepthTable> tabs(static_cast<size_t>(dmax) + 1);
  for (int d = 0; d <= dmax; ++d) {
    DepthTable& t = tabs[static_cast<size_t>(d)];
    t.cells = 1 << d;
    long total = 1;
    for (int a = 0; a < n; ++a) total *= t.cells;
    t.v1.assign(static_cast<size_t>(total), 0.0);
    t.v2.assign(static_cast<size_t>(total), 0.0);
    const double w = side3 / t.cells;
    for (long j = 0; j < total; ++j) {
      long rem = j;
      std::array<double, 3> c{0.0, 0.0, 0.0};
      for (int a = 0; a < n; ++a) {
        const long ja = rem % t.cells;
        rem /= t.cells;
        c[a] = lo3[a] + (ja + 0.5) * w;
      }
      const Cube sub(c, 0.5 * w, n);
      double s1v = 0.0, s2v = 0.0;
      long cnt = 0;
      cells.box_sums(c, 1.5 * w, &s1v, &s2v, &cnt);
      // The integrand vanishes off 2Q, so clamping to the grid is exact.
      t.v1[static_cast<size_t>(j)] =
          s1v * std::pow(hw, n) / std::pow(3.0 * w, n);
      if (d <= dmax2) {
        t.v2[static_cast<size_t>(j)] =
            hardy_r_norm(g, dilate(sub, 2.0), p).value;
      }
    }
  }

  out.s1.assign(static_cast<size_t>(nn), 0.0);
  out.s2.assign(static_cast<size_t>(nn), 0.0);
  for (long i = 0; i < nn; ++i) {
    const auto x = out.work.node_point(i);
    double b1 = 0.0, b2 = 0.0;
    for (int d = 0; d <= dmax; ++d) {
      const DepthTable& t = tabs[static_cast<size_t>(d)];
      long j = 0;
      for (int a = n - 1; a >= 0; --a) {
        j = j * t.cells + dyadic_index(x[a], lo3[a], side3, t.cells);
      }
      b1 = std::max(b1, t.v1[static_cast<size_t>(j)]);
      if (d <= dmax2) b2 = std::max(b2, t.v2[static_cast<size_t>(j)]);
    }
    out.s1[static_cast<size_t>(i)] = b1;
    out.s2[static_cast<size_t>(i)] = b2;
  }

  // Reference levels: the mean energy over 6Q and the Hardy norm on 4Q.
  ScalarField sq(u_grad.spec);
  const long nu = u_grad.spec.node_count();
  for (long i = 0; i < nu; ++i) {
    const double* gi = u_grad.at(i);
    double a2 = 0.0;
    for (int a = 0; a < n; ++a) a2 += gi[a] * gi[a];
    sq.v[i] = a2;
  }
  out.t1 = mean_over(sq, q6);
  out.t2 = hardy_r_norm(g, dilate(q, 4.0), p).value;

  const double h3n = std::pow(hw, n);
  const long target =
      static_cast<long>(std::floor(eps * q.volume() / h3n + 1e-9));
  auto probe = [&](double c0) {
    long cnt = 0;
    for (long i = 0; i < nn; ++i) {
      const size_t k = static_cast<size_t>(i);
      if (out.s1[k] > c0 * out.t1 || out.s2[k] > c0 * out.t2) ++cnt;
    }
    out.curve.emplace_back(c0, cnt * h3n);
    return cnt <= target;
  };
  if (probe(1.0)) {
    out.c0 = 1.0;
  } else if (!probe(std::ldexp(1.0, 40))) {
    throw StoppingError(
        "stopping sets exceed the eps budget for every C0 up to 2^40",
        out.curve);
  } else {
    double lo_t = 0.0, hi_t = 40.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo_t + hi_t);
      if (probe(std::exp2(mid))) {
        hi_t = mid;
      } else {
        lo_t = mid;
      }
    }
    out.c0 = std::exp2(hi_t);
  }

  out.e1.assign(static_cast<size_t>(nn), 0);
  out.e2.assign(static_cast<size_t>(nn), 0);
  out.united.assign(static_cast<size_t>(nn), 0);
  long on_count = 0;
  for (long i = 0; i < nn; ++i) {
    const size_t k = static_cast<size_t>(i);
    const bool a = out.s1[k] > out.c0 * out.t1;
    const bool b = out.s2[k] > out.c0 * out.t2;
    out.e1[k] = a;
    out.e2[k] = b;
    out.united[k] = a || b;
    if (a || b) ++on_count;
  }

  if (on_count > 0) {
    NodeMask mask(out.work);
    mask.on = out.united;
    try {
      out.whitney = whitney_decomposition(mask, q.side());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooCoarse) throw;
      out.unresolved = true;  // nonempty set below grid resolution
      out.whitney.clear();
    }
  }
  return out;
}

SparseFamily build_sparse_family(const VectorField& u_grad,
                                 const VectorField& g, const Cube& q,
                                 const ScalarField& phi_q, double eps, double p,
                                 int depth, int m3) {
  require(depth >= 1, ErrorCode::InvalidArgument, "family depth must be >= 1");
  require(eps > 0.0 && eps < 1.0, ErrorCode::InvalidArgument,
          "sparseness eps must lie in (0, 1)");
  // The 0.9 factor leaves the discrete counts a margin below eps, so the
  // root keeps at least the 1 - eps fraction after children claim theirs.
  StoppingResult st = stopping_cubes(u_grad, g, q, phi_q, 0.9 * eps, p, m3);

  SparseFamily fam;
  fam.ref = st.work;
  fam.epsilon = eps;
  const long nn = fam.ref.node_count();
  fam.cubes.push_back(q);
  fam.chosen.emplace_back(static_cast<size_t>(nn), 0);

  std::vector<char> claimed(static_cast<size_t>(nn), 0);
  FamilyBuilder fb{u_grad, g, eps, p, phi_q.spec.m, &fam};
  for (const Cube& c : st.whitney) {
    const bool inside = contains_cube(q, c, 1e-9 * q.side());
    fb.add_subtree(c, (depth >= 2 && inside) ? depth - 1 : 0, &claimed);
  }

  const double tol = 1e-9 * fam.ref.h();
  for (long i = 0; i < nn; ++i) {
    fam.chosen[0][static_cast<size_t>(i)] =
        contains_half_open(q, fam.ref.node_point(i), tol) &&
        !claimed[static_cast<size_t>(i)];
  }
  return fam;
}

SparseCheck verify_sparse(const SparseFamily& s) {
  require(!s.cubes.empty(), ErrorCode::InvalidArgument,
          "sparse family has no cubes");
  require(s.cubes.size() == s.chosen.size(), ErrorCode::InvalidArgument,
          "sparse family cubes and chosen masks must align");
  const long nn = s.ref.node_count();
  for (const auto& m : s.chosen) {
    require(static_cast<long>(m.size()) == nn, ErrorCode::InvalidArgument,
            "chosen mask length does not match the reference grid");
  }

  SparseCheck out;
  const double tol = 1e-9 * s.ref.h();
  std::vector<int> overlap(static_cast<size_t>(nn), 0);
  std::vector<int> cube_overlap(static_cast<size_t>(nn), 0);
  out.worst_fraction = 1.0;
  for (size_t k = 0; k < s.cubes.size(); ++k) {
    long denom = 0, num = 0;
    for (long i = 0; i < nn; ++i) {
      const size_t ii = static_cast<size_t>(i);
      const bool in_cube =
          contains_half_open(s.cubes[k], s.ref.node_point(i), tol);
      if (in_cube) {
        ++denom;
        ++cube_overlap[ii];
      }
      if (s.chosen[k][ii]) {
        ++num;
        ++overlap[ii];
        if (!in_cube) ++out.containment_violations;
      }
    }
    // Cubes below grid resolution hold no nodes; their bound is vacuous.
    const double frac =
        denom > 0 ? static_cast<double>(num) / static_cast<double>(denom) : 1.0;
    if (frac < out.worst_fraction) {
      out.worst_fraction = frac;
      out.worst_cube = static_cast<int>(k);
    }
  }
  for (long i = 0; i < nn; ++i) {
    const size_t ii = static_cast<size_t>(i);
    if (overlap[ii] > out.max_overlap) {
      out.max_overlap = overlap[ii];
      out.worst_node = i;
    }
    out.max_cube_overlap = std::max(out.max_cube_overlap, cube_overlap[ii]);
  }
  out.strict_disjoint = out.max_cube_overlap <= 1;
  out.valid = out.containment_violations == 0 && out.max_overlap <= 1 &&
              out.worst_fraction >= s.epsilon - 1e-12;
  return out;
}

double sparse_rhs(const SparseFamily& s, const VectorField& f,
                  const VectorField& g, double p) {
  validate_alpha_p(s.ref.n(), p);
  double total = 0.0;
  for (const Cube& c : s.cubes) {
    const Cube c6 = dilate(c, 6.0);
    const Cube c4 = dilate(c, 4.0);
    require(contains_cube(f.spec.domain, c6, 1e-9 * c.side()),
            ErrorCode::DomainMargin,
            "forcing field must cover 6P for every family cube");
    require(contains_cube(g.spec.domain, c4, 1e-9 * c.side()),
            ErrorCode::DomainMargin,
            "datum field must cover 4P for every family cube");
    total += c.volume() * oscillation_l2(f, c6) * hardy_r_norm(g, c4, p).value;
  }
  return total;
}

double pairing_lhs(const ScalarField& phi_q, const VectorField& u_grad,
                   const VectorField& g, const Cube& q) {
  const int n = q.n;
  require(u_grad.spec.n() == n && g.spec.n() == n, ErrorCode::InvalidArgument,
          "field dimension mismatch");
  const Cube q2 = dilate(q, 2.0);
  require(contains_cube(u_grad.spec.domain, q2, 1e-9 * q.side()),
          ErrorCode::DomainMargin, "gradient field must cover 2Q");
  require(contains_cube(g.spec.domain, q2, 1e-9 * q.side()),
          ErrorCode::DomainMargin, "datum field must cover 2Q");

  const GridSpec& spec = u_grad.spec;
  const double cell = std::pow(spec.h(), n);
  const double tol = 1e-9 * spec.h();
  double total = 0.0;
  const long nc = spec.cell_count();
  for (long ci = 0; ci < nc; ++ci) {
    const auto c = spec.cell_centroid(spec.cell_multi_index(ci));
    if (!contains_half_open(q2, c, tol)) continue;
    const double w = sample_or_zero(phi_q, c);
    if (w == 0.0) continue;
    double gu[3] = {0.0, 0.0, 0.0};
    double gv[3] = {0.0, 0.0, 0.0};
    sample_at(u_grad.spec, u_grad.v, n, c, gu);
    sample_at(g.spec, g.v, n, c, gv);
    double dot = 0.0;
    for (int a = 0; a < n; ++a) dot += gu[a] * gv[a];
    total += cell * w * dot;
  }
  return std::fabs(total);
}

ScalarField make_pairing_bump(const Cube& q, double n_scale, int m_phi) {
  require(n_scale > 0.0 && n_scale <= 1.0, ErrorCode::InvalidArgument,
          "bump scale must lie in (0, 1]");
  require(m_phi >= 9 && m_phi % 2 == 1, ErrorCode::InvalidArgument,
          "bump grid must be odd with at least 9 nodes per axis");
  ScalarField out(GridSpec(dilate(q, 2.0), m_phi));
  const double inv = 1.0 / (n_scale * q.side());
  // Normalize so the profile peaks at one in the cube center.
  const double amp = std::pow(bump_profile(0.0), -q.n);
  const long nn = out.spec.node_count();
  for (long i = 0; i < nn; ++i) {
    const auto x = out.spec.node_point(i);
    double v = amp;
    for (int a = 0; a < q.n; ++a) {
      v *= bump_profile((x[a] - q.center[a]) * inv);
    }
    out.v[static_cast<size_t>(i)] = v;
  }
  return out;
}

}  // namespace ellab
