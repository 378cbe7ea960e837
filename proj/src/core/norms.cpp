#include "core/norms.hpp"

#include <algorithm>
#include <cmath>

#include "core/bump.hpp"
#include "core/error.hpp"
#include "core/maximal.hpp"

namespace ellab {

namespace {

int clamp_odd(int m, int lo, int hi) {
  m = std::clamp(m, lo, hi);
  if (m % 2 == 0) ++m;
  return m;
}

// Evaluation grid over 3Q sized to about three nodes per source cell across
// the cube (never below a minimal resolution); for Q equal to the field's
// domain this is exactly three times the source resolution.
GridSpec hardy_eval_spec(const GridSpec& source, const Cube& q) {
  const int across =
      std::max(4, static_cast<int>(std::lround(q.side() / source.h())));
  const int me = clamp_odd(3 * across + 1, 25, 97);
  return GridSpec(dilate(q, 3.0), me);
}

enum class Extension { Zero, Reflect, ReflectCutoff };

Extension parse_extension(const std::string& label) {
  if (label == "zero") return Extension::Zero;
  if (label == "reflect") return Extension::Reflect;
  if (label == "reflect_cutoff") return Extension::ReflectCutoff;
  fail(ErrorCode::InvalidArgument, "unknown extension label: " + label);
}

// Builds one extension candidate on the evaluation grid, one scalar field
// per component.  "reflect" folds every coordinate once across the nearest
// face of Q (covers 2Q) and is zero beyond 2Q; the cutoff variant multiplies
// the fold by the smooth plateau cutoff, which vanishes outside 2Q on its
// own.
std::vector<ScalarField> build_extension(const GridSpec& source,
                                         const std::vector<double>& values,
                                         int comps, const Cube& q,
                                         const GridSpec& eval, Extension ext) {
  std::vector<ScalarField> e(static_cast<size_t>(comps), ScalarField(eval));
  const int n = q.n;
  const double s = q.half_side;
  const long nodes = eval.node_count();
  std::array<double, 3> sample{0.0, 0.0, 0.0};
  for (long i = 0; i < nodes; ++i) {
    const std::array<double, 3> y = eval.node_point(i);
    double ratio_inf = 0.0;
    for (int a = 0; a < n; ++a)
      ratio_inf = std::max(
          ratio_inf,
          std::fabs(y[static_cast<size_t>(a)] - q.center[static_cast<size_t>(a)]) / s);
    if (ext == Extension::Zero) {
      if (ratio_inf < 1.0 - 1e-12) {
        sample_at(source, values, comps, y, sample.data());
        for (int c = 0; c < comps; ++c)
          e[static_cast<size_t>(c)].v[static_cast<size_t>(i)] =
              sample[static_cast<size_t>(c)];
      }
      continue;
    }
    double cut = 1.0;
    if (ext == Extension::ReflectCutoff) {
      for (int a = 0; a < n; ++a)
        cut *= cutoff_profile(
            (y[static_cast<size_t>(a)] - q.center[static_cast<size_t>(a)]) / s);
    } else if (ratio_inf >= 2.0 - 1e-12) {
      cut = 0.0;
    }
    if (cut <= 0.0) continue;
    std::array<double, 3> folded = y;
    for (int a = 0; a < n; ++a) {
      const double lo = q.center[static_cast<size_t>(a)] - s;
      const double hi = q.center[static_cast<size_t>(a)] + s;
      double t = folded[static_cast<size_t>(a)];
      if (t > hi) t = 2.0 * hi - t;
      if (t < lo) t = 2.0 * lo - t;
      folded[static_cast<size_t>(a)] = std::clamp(t, lo, hi);
    }
    sample_at(source, values, comps, folded, sample.data());
    for (int c = 0; c < comps; ++c)
      e[static_cast<size_t>(c)].v[static_cast<size_t>(i)] =
          cut * sample[static_cast<size_t>(c)];
  }
  return e;
}

// Normalized nodal p-integral of the vector smooth maximal function
// sup over the ladder of the Euclidean norm of the mollified components.
double hardy_functional(const std::vector<ScalarField>& comps, const Cube& q,
                        double p) {
  const GridSpec& eval = comps.front().spec;
  const double h = eval.h();
  const double s = q.half_side;
  require(s >= 4.0 * h * (1.0 - 1e-12), ErrorCode::TooCoarse,
          "hardy evaluation grid too coarse for the maximal scale");
  std::vector<double> big(comps.front().v.size(), 0.0);
  for (double r : ladder_radii(s, h)) {
    std::vector<double> norm2(big.size(), 0.0);
    for (const ScalarField& comp : comps) {
      const ScalarField g = mollify(comp, r);
      for (size_t i = 0; i < norm2.size(); ++i) norm2[i] += g.v[i] * g.v[i];
    }
    for (size_t i = 0; i < big.size(); ++i)
      big[i] = std::max(big[i], std::sqrt(norm2[i]));
  }
  const double hn = std::pow(h, q.n);
  double integral = 0.0;
  for (double v : big) integral += std::pow(v, p) * hn;
  return std::pow(integral / std::pow(s, q.n), 1.0 / p);
}

void hardy_preflight(const GridSpec& source, const Cube& q, double p) {
  validate_alpha_p(q.n, p);
  require(q.n == source.domain.n, ErrorCode::InvalidArgument,
          "cube/field dimension mismatch");
  require(contains_cube(source.domain, q,
                        1e-9 * std::max(q.half_side, source.h())),
          ErrorCode::DomainMargin, "cube not contained in the field's domain");
}

HardyNormResult hardy_r_generic(const GridSpec& source,
                                const std::vector<double>& values, int comps,
                                const Cube& q, double p,
                                const std::vector<std::string>& extensions) {
  hardy_preflight(source, q, p);
  require(!extensions.empty(), ErrorCode::InvalidArgument,
          "empty extension candidate list");
  const GridSpec eval = hardy_eval_spec(source, q);
  HardyNormResult best;
  best.kind = 'r';
  best.p = p;
  bool first = true;
  for (const std::string& label : extensions) {
    const Extension ext = parse_extension(label);
    const double value = hardy_functional(
        build_extension(source, values, comps, q, eval, ext), q, p);
    if (first || value < best.value) {
      best.value = value;
      best.extension_used = label;
      first = false;
    }
  }
  return best;
}

HardyNormResult hardy_z_generic(const GridSpec& source,
                                const std::vector<double>& values, int comps,
                                const Cube& q, double p) {
  hardy_preflight(source, q, p);
  const GridSpec eval = hardy_eval_spec(source, q);
  HardyNormResult r;
  r.value = hardy_functional(
      build_extension(source, values, comps, q, eval, Extension::Zero), q, p);
  r.kind = 'z';
  r.p = p;
  r.extension_used = "zero";
  return r;
}

const std::vector<std::string>& all_extensions() {
  static const std::vector<std::string> kAll{"zero", "reflect",
                                             "reflect_cutoff"};
  return kAll;
}

}  // namespace

double validate_alpha_p(int n, double p) {
  require(n == 2 || n == 3, ErrorCode::InvalidArgument, "dimension must be 2 or 3");
  const double lo = static_cast<double>(n) / (n + 1.0);
  require(std::isfinite(p) && p > lo && p <= 1.0, ErrorCode::InvalidArgument,
          "p must lie in (n/(n+1), 1]");
  return n * (1.0 / p - 1.0);
}

HardyNormResult hardy_z_norm(const ScalarField& f, const Cube& q, double p) {
  return hardy_z_generic(f.spec, f.v, 1, q, p);
}

HardyNormResult hardy_z_norm(const VectorField& f, const Cube& q, double p) {
  return hardy_z_generic(f.spec, f.v, f.spec.n(), q, p);
}

HardyNormResult hardy_r_norm(const ScalarField& f, const Cube& q, double p,
                             const std::vector<std::string>& extensions) {
  return hardy_r_generic(f.spec, f.v, 1, q, p, extensions);
}

HardyNormResult hardy_r_norm(const ScalarField& f, const Cube& q, double p) {
  return hardy_r_generic(f.spec, f.v, 1, q, p, all_extensions());
}

HardyNormResult hardy_r_norm(const VectorField& f, const Cube& q, double p,
                             const std::vector<std::string>& extensions) {
  return hardy_r_generic(f.spec, f.v, f.spec.n(), q, p, extensions);
}

HardyNormResult hardy_r_norm(const VectorField& f, const Cube& q, double p) {
  return hardy_r_generic(f.spec, f.v, f.spec.n(), q, p, all_extensions());
}

double campanato(const ScalarField& f, const Cube& q, double alpha, char kind) {
  require(kind == 'z' || kind == 'r', ErrorCode::InvalidArgument,
          "campanato kind must be 'z' or 'r'");
  require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0,
          ErrorCode::InvalidArgument, "alpha must lie in [0, 1)");
  require(q.n == f.spec.domain.n, ErrorCode::InvalidArgument,
          "cube/field dimension mismatch");
  require(contains_cube(f.spec.domain, q,
                        1e-9 * std::max(q.half_side, f.spec.h())),
          ErrorCode::DomainMargin, "cube not contained in the field's domain");
  const CellAverages table(f);
  const GridSpec& spec = f.spec;
  const int n = q.n;
  const double h = spec.h();
  const double s = q.half_side;
  const double tol = 1e-9 * h;

  double sup_interior = -1.0;  // kind r: r < dist;  kind z: 4r < dist
  double sup_shell = -1.0;     // kind z only: 2r < dist < 4r
  const long nodes = spec.node_count();
  for (long i = 0; i < nodes; ++i) {
    const std::array<double, 3> z = spec.node_point(i);
    double off = 0.0;
    for (int a = 0; a < n; ++a)
      off = std::max(off, std::fabs(z[static_cast<size_t>(a)] -
                                    q.center[static_cast<size_t>(a)]));
    const double dist = s - off;
    if (dist <= tol) continue;  // node not strictly inside Q
    for (double r = h; r < s; r *= 2.0) {
      const bool interior_ok =
          (kind == 'r') ? (r + tol < dist) : (4.0 * r + tol < dist);
      const bool shell_ok =
          kind == 'z' && (2.0 * r + tol < dist) && (dist + tol < 4.0 * r);
      if (!interior_ok && !shell_ok) continue;
      double mean = 0.0, meansq = 0.0;
      if (!table.box_stats(z, r, &mean, &meansq)) continue;
      const double scale = std::pow(r, -alpha);
      if (interior_ok) {
        const double osc2 = std::max(0.0, meansq - mean * mean);
        sup_interior = std::max(sup_interior, scale * std::sqrt(osc2));
      }
      if (shell_ok) {
        sup_shell = std::max(sup_shell, scale * std::sqrt(std::max(0.0, meansq)));
      }
    }
  }
  if (kind == 'r') {
    require(sup_interior >= 0.0, ErrorCode::TooCoarse,
            "no admissible subcube for the seminorm at this resolution");
    return sup_interior;
  }
  require(sup_interior >= 0.0 && sup_shell >= 0.0, ErrorCode::TooCoarse,
          "no admissible subcube for one of the seminorm terms");
  return sup_interior + sup_shell;
}

DualityGap duality_gap(const ScalarField& g, const ScalarField& f,
                       const Cube& q, double p, char pairing_kind) {
  require(pairing_kind == 'z' || pairing_kind == 'r', ErrorCode::InvalidArgument,
          "pairing kind must be 'z' or 'r'");
  require(same_grid(g.spec, f.spec), ErrorCode::InvalidArgument,
          "pairing requires both fields on the same grid");
  const double alpha = validate_alpha_p(q.n, p);

  ScalarField prod(f.spec);
  for (size_t i = 0; i < prod.v.size(); ++i) prod.v[i] = g.v[i] * f.v[i];
  DualityGap out;
  out.lhs = std::fabs(mean_over(prod, q));

  const char campanato_kind = (pairing_kind == 'z') ? 'r' : 'z';
  const double lam = campanato(g, q, alpha, campanato_kind);
  const double hardy = (pairing_kind == 'z')
                           ? hardy_z_norm(f, q, p).value
                           : hardy_r_norm(f, q, p).value;
  out.rhs = std::pow(q.side(), alpha) * lam * hardy;
  if (out.rhs == 0.0) {
    require(out.lhs <= 1e-14, ErrorCode::Internal,
            "duality violation: zero right-hand side with nonzero pairing");
    out.ratio = 0.0;
  } else {
    out.ratio = out.lhs / out.rhs;
  }
  return out;
}

}  // namespace ellab
