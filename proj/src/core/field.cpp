#include "core/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "core/error.hpp"

namespace ellab {
namespace {

constexpr double kMembershipRel = 1e-9;

// Collects flat node indices whose point lies in the closed cube R (tiny
// relative slack so on-boundary nodes are kept).
std::vector<long> nodes_in_region(const GridSpec& spec, const Cube& r) {
  const double slack = kMembershipRel * std::max(r.half_side, spec.h());
  std::vector<long> out;
  for (long i = 0; i < spec.node_count(); ++i) {
    if (contains_point(r, spec.node_point(i), slack)) out.push_back(i);
  }
  return out;
}

// Collects flat cell indices whose centroid lies in the half-open box of R.
std::vector<long> cells_in_region(const GridSpec& spec, const Cube& r) {
  const double tol = kMembershipRel * spec.h();
  std::vector<long> out;
  for (long c = 0; c < spec.cell_count(); ++c) {
    if (contains_half_open(r, spec.cell_centroid(spec.cell_multi_index(c)),
                           tol)) {
      out.push_back(c);
    }
  }
  return out;
}

// Average of the 2^n corner values of a cell, per component.
void cell_centroid_value(const GridSpec& spec, const std::vector<double>& v,
                         int comps, const std::array<int, 3>& cell,
                         double* out) {
  const int n = spec.n();
  const int corners = 1 << n;
  for (int c = 0; c < comps; ++c) out[c] = 0.0;
  for (int k = 0; k < corners; ++k) {
    std::array<int, 3> idx = cell;
    for (int a = 0; a < n; ++a) idx[a] += (k >> a) & 1;
    const long node = spec.node_index(idx);
    for (int c = 0; c < comps; ++c) out[c] += v[node * comps + c];
  }
  const double inv = 1.0 / corners;
  for (int c = 0; c < comps; ++c) out[c] *= inv;
}

template <int kComps>
std::array<double, kComps> mean_over_impl(const GridSpec& spec,
                                          const std::vector<double>& v,
                                          const Cube& p) {
  const auto cells = cells_in_region(spec, p);
  require(!cells.empty(), ErrorCode::InvalidArgument,
          "mean_over: region contains no cell centroid");
  std::array<double, kComps> acc{};
  double val[kComps];
  for (long c : cells) {
    cell_centroid_value(spec, v, kComps, spec.cell_multi_index(c), val);
    for (int j = 0; j < kComps; ++j) acc[j] += val[j];
  }
  for (int j = 0; j < kComps; ++j) acc[j] /= static_cast<double>(cells.size());
  return acc;
}

double power_mean_impl(const GridSpec& spec, const std::vector<double>& v,
                       int comps, const Cube& region, double q) {
  require(std::isfinite(q) && q > 0.0, ErrorCode::InvalidArgument,
          "power_mean: exponent must be positive");
  const auto cells = cells_in_region(spec, region);
  require(!cells.empty(), ErrorCode::InvalidArgument,
          "power_mean: region contains no cell centroid");
  double acc = 0.0;
  std::vector<double> val(comps);
  for (long c : cells) {
    cell_centroid_value(spec, v, comps, spec.cell_multi_index(c), val.data());
    double norm2 = 0.0;
    for (int j = 0; j < comps; ++j) norm2 += val[j] * val[j];
    acc += std::pow(std::sqrt(norm2), q);
  }
  return std::pow(acc / static_cast<double>(cells.size()), 1.0 / q);
}

double value_diff_norm(const std::vector<double>& v, int comps, long a,
                       long b) {
  double acc = 0.0;
  for (int c = 0; c < comps; ++c) {
    const double d = v[a * comps + c] - v[b * comps + c];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double holder_impl(const GridSpec& spec, const std::vector<double>& v,
                   int comps, double alpha, const Cube& r) {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0,
          ErrorCode::InvalidArgument,
          "holder_seminorm: alpha must lie in (0, 1]");
  const auto nodes = nodes_in_region(spec, r);
  require(nodes.size() >= 2, ErrorCode::InvalidArgument,
          "holder_seminorm: region contains fewer than two nodes");
  const int n = spec.n();

  auto quotient = [&](long a, long b) {
    const auto pa = spec.node_point(a);
    const auto pb = spec.node_point(b);
    double d2 = 0.0;
    for (int ax = 0; ax < n; ++ax) {
      const double d = pa[ax] - pb[ax];
      d2 += d * d;
    }
    return value_diff_norm(v, comps, a, b) / std::pow(std::sqrt(d2), alpha);
  };

  double best = 0.0;
  const long count = static_cast<long>(nodes.size());
  if (count * count <= 2'000'000L) {
    for (long i = 0; i < count; ++i) {
      for (long j = i + 1; j < count; ++j) {
        best = std::max(best, quotient(nodes[i], nodes[j]));
      }
    }
    return best;
  }

  // Large regions: exact over short pairs (the Holder quotient is usually
  // maximized at small separation), plus a fixed-seed batch of far pairs.
  std::vector<char> member(static_cast<size_t>(spec.node_count()), 0);
  for (long id : nodes) member[static_cast<size_t>(id)] = 1;
  const int window = 8;
  for (long id : nodes) {
    const auto mi = spec.node_multi_index(id);
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};
    for (int ax = 0; ax < n; ++ax) {
      lo[ax] = std::max(0, mi[ax] - window);
      hi[ax] = std::min(spec.m - 1, mi[ax] + window);
    }
    std::array<int, 3> it = lo;
    while (true) {
      const long other = spec.node_index(it);
      if (other > id && member[static_cast<size_t>(other)]) {
        best = std::max(best, quotient(id, other));
      }
      int ax = 0;
      for (; ax < n; ++ax) {
        if (++it[ax] <= hi[ax]) break;
        it[ax] = lo[ax];
      }
      if (ax == n) break;
    }
  }
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<long> pick(0, count - 1);
  for (int k = 0; k < 100'000; ++k) {
    const long a = nodes[pick(rng)];
    const long b = nodes[pick(rng)];
    if (a != b) best = std::max(best, quotient(a, b));
  }
  return best;
}

// Largest eigenvalue of the symmetric matrix B (2x2 closed form, 3x3 via the
// trigonometric method), used on B = A^T A for singular values.
double sym_eig_extreme(const double* b, int n, bool largest) {
  if (n == 2) {
    const double tr = b[0] + b[3];
    const double det = b[0] * b[3] - b[1] * b[2];
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return largest ? tr / 2.0 + disc : tr / 2.0 - disc;
  }
  const double q = (b[0] + b[4] + b[8]) / 3.0;
  double p2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double e = b[i * 3 + j] - (i == j ? q : 0.0);
      p2 += e * e;
    }
  }
  const double p = std::sqrt(std::max(0.0, p2 / 6.0));
  if (p < 1e-300) return q;
  // r = det((B - q I) / p) / 2, clamped into [-1, 1].
  double c[9];
  for (int i = 0; i < 9; ++i) c[i] = (b[i] - (i % 4 == 0 ? q : 0.0)) / p;
  const double detc = c[0] * (c[4] * c[8] - c[5] * c[7]) -
                      c[1] * (c[3] * c[8] - c[5] * c[6]) +
                      c[2] * (c[3] * c[7] - c[4] * c[6]);
  const double r = std::clamp(detc / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double eig1 = q + 2.0 * p * std::cos(phi);
  const double eig3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  return largest ? eig1 : eig3;
}

void gram(const double* m, int n, double* out) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += m[k * n + i] * m[k * n + j];
      out[i * n + j] = acc;
    }
  }
}

}  // namespace

void validate_finite(const std::vector<double>& values, const char* what) {
  for (double x : values) {
    if (!std::isfinite(x)) {
      std::ostringstream msg;
      msg << what << ": non-finite value " << x;
      fail(ErrorCode::InvalidArgument, msg.str());
    }
  }
}

void sample_at(const GridSpec& spec, const std::vector<double>& values,
               int comps, const std::array<double, 3>& p, double* out) {
  const int n = spec.n();
  const double h = spec.h();
  const double margin = kMembershipRel * std::max(spec.domain.half_side, h);
  std::array<int, 3> cell{0, 0, 0};
  std::array<double, 3> t{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    const double lo = spec.domain.corner_low(a);
    const double hi = spec.domain.corner_high(a);
    require(p[a] >= lo - margin && p[a] <= hi + margin,
            ErrorCode::DomainMargin, "sample_at: point outside field domain");
    const double x = std::clamp(p[a], lo, hi);
    int k = static_cast<int>(std::floor((x - lo) / h));
    k = std::clamp(k, 0, spec.m - 2);
    double w = (x - (lo + k * h)) / h;
    if (w < 1e-9) w = 0.0;
    if (w > 1.0 - 1e-9) w = 1.0;
    cell[a] = k;
    t[a] = w;
  }
  for (int c = 0; c < comps; ++c) out[c] = 0.0;
  const int corners = 1 << n;
  for (int k = 0; k < corners; ++k) {
    double weight = 1.0;
    std::array<int, 3> idx = cell;
    for (int a = 0; a < n; ++a) {
      const int bit = (k >> a) & 1;
      weight *= bit ? t[a] : 1.0 - t[a];
      idx[a] += bit;
    }
    if (weight == 0.0) continue;
    const long node = spec.node_index(idx);
    for (int c = 0; c < comps; ++c) out[c] += weight * values[node * comps + c];
  }
}

namespace {

template <typename FieldT>
FieldT resample_impl(const FieldT& f, const GridSpec& target, int comps) {
  require(f.spec.n() == target.n(), ErrorCode::InvalidArgument,
          "resample: dimension mismatch");
  FieldT out(target);
  for (long i = 0; i < target.node_count(); ++i) {
    sample_at(f.spec, f.v, comps, target.node_point(i),
              out.v.data() + i * comps);
  }
  return out;
}

}  // namespace

ScalarField resample(const ScalarField& f, const GridSpec& target) {
  return resample_impl(f, target, 1);
}
VectorField resample(const VectorField& f, const GridSpec& target) {
  return resample_impl(f, target, f.spec.n());
}
MatrixField resample(const MatrixField& f, const GridSpec& target) {
  return resample_impl(f, target, f.spec.n() * f.spec.n());
}

double mean_over(const ScalarField& f, const Cube& p) {
  return mean_over_impl<1>(f.spec, f.v, p)[0];
}
std::array<double, 3> mean_over(const VectorField& f, const Cube& p) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  if (f.spec.n() == 2) {
    const auto r = mean_over_impl<2>(f.spec, f.v, p);
    out[0] = r[0];
    out[1] = r[1];
  } else {
    out = mean_over_impl<3>(f.spec, f.v, p);
  }
  return out;
}
std::array<double, 9> mean_over(const MatrixField& f, const Cube& p) {
  std::array<double, 9> out{};
  if (f.spec.n() == 2) {
    const auto r = mean_over_impl<4>(f.spec, f.v, p);
    std::copy(r.begin(), r.end(), out.begin());
  } else {
    out = mean_over_impl<9>(f.spec, f.v, p);
  }
  return out;
}

double power_mean(const ScalarField& f, const Cube& region, double q) {
  return power_mean_impl(f.spec, f.v, 1, region, q);
}
double power_mean(const VectorField& f, const Cube& region, double q) {
  return power_mean_impl(f.spec, f.v, f.spec.n(), region, q);
}

double oscillation_l2(const VectorField& f, const Cube& region) {
  const auto mean = mean_over(f, region);
  const double ms = power_mean(f, region, 2.0);
  double m2 = 0.0;
  for (int c = 0; c < f.spec.n(); ++c) m2 += mean[c] * mean[c];
  return std::sqrt(std::max(0.0, ms * ms - m2));
}

CellAverages::CellAverages(const ScalarField& f) : spec(f.spec) {
  n = spec.domain.n;
  const int mc = spec.m - 1;
  for (int a = 0; a < n; ++a) d[static_cast<size_t>(a)] = mc;
  stride[0] = 1;
  stride[1] = d[0];
  stride[2] = static_cast<long>(d[0]) * d[1];
  const long cells = stride[2] * d[2];
  sum1.assign(static_cast<size_t>(cells), 0.0);
  sum2.assign(static_cast<size_t>(cells), 0.0);
  const int m = spec.m;
  const int corners = 1 << n;
  for (long c = 0; c < cells; ++c) {
    const int c0 = static_cast<int>(c % d[0]);
    const int c1 = static_cast<int>((c / d[0]) % d[1]);
    const int c2 = static_cast<int>(c / (static_cast<long>(d[0]) * d[1]));
    double acc = 0.0;
    for (int k = 0; k < corners; ++k) {
      const int x0 = c0 + (k & 1);
      const int x1 = c1 + ((k >> 1) & 1);
      const int x2 = (n == 3) ? c2 + ((k >> 2) & 1) : 0;
      acc += f.v[static_cast<size_t>(x0) +
                 static_cast<size_t>(m) *
                     (static_cast<size_t>(x1) +
                      static_cast<size_t>(m) * static_cast<size_t>(x2))];
    }
    const double w = acc / static_cast<double>(corners);
    sum1[static_cast<size_t>(c)] = w;
    sum2[static_cast<size_t>(c)] = w * w;
  }
  for (auto* tab : {&sum1, &sum2})
    for (int axis = 0; axis < n; ++axis) {
      const long st = stride[static_cast<size_t>(axis)];
      const int len = d[static_cast<size_t>(axis)];
      const int o1 = (axis == 0) ? 1 : 0;
      const int o2 = (axis == 2) ? 1 : 2;
      for (int i2 = 0; i2 < d[static_cast<size_t>(o2)]; ++i2)
        for (int i1 = 0; i1 < d[static_cast<size_t>(o1)]; ++i1) {
          const long base = i1 * stride[static_cast<size_t>(o1)] +
                            i2 * stride[static_cast<size_t>(o2)];
          for (int i = 1; i < len; ++i)
            (*tab)[static_cast<size_t>(base + i * st)] +=
                (*tab)[static_cast<size_t>(base + (i - 1) * st)];
        }
    }
}

bool CellAverages::box_sums(const std::array<double, 3>& z, double r,
                            double* s1, double* s2, long* count) const {
  const double h = spec.h();
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  long cnt = 1;
  for (int a = 0; a < n; ++a) {
    const double low = spec.domain.corner_low(a);
    const double za = z[static_cast<size_t>(a)];
    int jlo = static_cast<int>(std::ceil((za - r - low) / h - 0.5 - 1e-9));
    int jhi = static_cast<int>(std::floor((za + r - low) / h - 0.5 + 1e-9));
    jlo = std::max(jlo, 0);
    jhi = std::min(jhi, d[static_cast<size_t>(a)] - 1);
    if (jlo > jhi) return false;
    lo[static_cast<size_t>(a)] = jlo;
    hi[static_cast<size_t>(a)] = jhi;
    cnt *= (jhi - jlo + 1);
  }
  double acc1 = 0.0, acc2 = 0.0;
  const int cs = 1 << n;
  for (int c = 0; c < cs; ++c) {
    long idx = 0;
    int sign = 1;
    bool skip = false;
    for (int a = 0; a < n; ++a) {
      if (c & (1 << a)) {
        if (lo[static_cast<size_t>(a)] == 0) {
          skip = true;
          break;
        }
        idx += (lo[static_cast<size_t>(a)] - 1) * stride[static_cast<size_t>(a)];
        sign = -sign;
      } else {
        idx += hi[static_cast<size_t>(a)] * stride[static_cast<size_t>(a)];
      }
    }
    if (skip) continue;
    acc1 += sign * sum1[static_cast<size_t>(idx)];
    acc2 += sign * sum2[static_cast<size_t>(idx)];
  }
  *s1 = acc1;
  *s2 = acc2;
  *count = cnt;
  return true;
}

bool CellAverages::box_stats(const std::array<double, 3>& z, double r,
                             double* mean, double* meansq) const {
  double s1 = 0.0, s2 = 0.0;
  long count = 0;
  if (!box_sums(z, r, &s1, &s2, &count)) return false;
  *mean = s1 / static_cast<double>(count);
  *meansq = s2 / static_cast<double>(count);
  return true;
}

double holder_seminorm(const ScalarField& f, double alpha, const Cube& r) {
  return holder_impl(f.spec, f.v, 1, alpha, r);
}
double holder_seminorm(const VectorField& f, double alpha, const Cube& r) {
  return holder_impl(f.spec, f.v, f.spec.n(), alpha, r);
}
double holder_seminorm(const MatrixField& f, double alpha, const Cube& r) {
  return holder_impl(f.spec, f.v, f.spec.n() * f.spec.n(), alpha, r);
}

const std::vector<std::array<double, 3>>& probe_directions(int n) {
  static const std::vector<std::array<double, 3>> plane = [] {
    std::vector<std::array<double, 3>> dirs;
    for (int k = 0; k < 64; ++k) {
      const double a = M_PI * k / 64.0;
      dirs.push_back({std::cos(a), std::sin(a), 0.0});
    }
    return dirs;
  }();
  static const std::vector<std::array<double, 3>> sphere = [] {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<std::array<double, 3>> verts;
    for (double s1 : {-1.0, 1.0}) {
      for (double s2 : {-1.0, 1.0}) {
        verts.push_back({0.0, s1, s2 * phi});
        verts.push_back({s1, s2 * phi, 0.0});
        verts.push_back({s2 * phi, 0.0, s1});
      }
    }
    auto norm = [](std::array<double, 3> v) {
      const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      return std::array<double, 3>{v[0] / len, v[1] / len, v[2] / len};
    };
    // Faces: vertex triples at mutual edge distance 2 (coords above).
    std::vector<std::array<int, 3>> faces;
    auto d2 = [&](int a, int b) {
      double acc = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double d = verts[a][c] - verts[b][c];
        acc += d * d;
      }
      return acc;
    };
    for (int a = 0; a < 12; ++a) {
      for (int b = a + 1; b < 12; ++b) {
        if (std::abs(d2(a, b) - 4.0) > 1e-9) continue;
        for (int c = b + 1; c < 12; ++c) {
          if (std::abs(d2(a, c) - 4.0) < 1e-9 &&
              std::abs(d2(b, c) - 4.0) < 1e-9) {
            faces.push_back({a, b, c});
          }
        }
      }
    }
    std::map<std::array<long, 3>, std::array<double, 3>> dedup;
    auto add = [&](std::array<double, 3> p) {
      p = norm(p);
      std::array<long, 3> key;
      for (int c = 0; c < 3; ++c) key[c] = std::lround(p[c] * 1e7);
      dedup.emplace(key, p);
    };
    const int freq = 4;
    for (const auto& f : faces) {
      for (int i = 0; i <= freq; ++i) {
        for (int j = 0; j <= freq - i; ++j) {
          const int k = freq - i - j;
          std::array<double, 3> p{};
          for (int c = 0; c < 3; ++c) {
            p[c] = (i * verts[f[0]][c] + j * verts[f[1]][c] +
                    k * verts[f[2]][c]) /
                   freq;
          }
          add(p);
        }
      }
      std::array<double, 3> centroid{};
      for (int c = 0; c < 3; ++c) {
        centroid[c] =
            (verts[f[0]][c] + verts[f[1]][c] + verts[f[2]][c]) / 3.0;
      }
      add(centroid);
    }
    std::vector<std::array<double, 3>> dirs;
    for (const auto& kv : dedup) dirs.push_back(kv.second);
    return dirs;
  }();
  require(n == 2 || n == 3, ErrorCode::InvalidArgument,
          "probe_directions: dimension must be 2 or 3");
  return n == 2 ? plane : sphere;
}

double operator_norm(const double* m, int n) {
  double b[9];
  gram(m, n, b);
  return std::sqrt(std::max(0.0, sym_eig_extreme(b, n, true)));
}

double smallest_singular_value(const double* m, int n) {
  double b[9];
  gram(m, n, b);
  return std::sqrt(std::max(0.0, sym_eig_extreme(b, n, false)));
}

CoefficientField ellipticity_check(const MatrixField& a, double lambda,
                                   double Lambda) {
  require(std::isfinite(lambda) && std::isfinite(Lambda) && lambda > 0.0 &&
              Lambda >= lambda,
          ErrorCode::InvalidArgument,
          "ellipticity_check: need 0 < lambda <= Lambda");
  validate_finite(a.v, "ellipticity_check");
  const int n = a.spec.n();
  const auto& dirs = probe_directions(n);
  const double tol = 1e-12 * std::max(1.0, Lambda);
  double worst_margin = std::numeric_limits<double>::infinity();
  long worst_node = -1;
  for (long node = 0; node < a.spec.node_count(); ++node) {
    const double* mat = a.at(node);
    double qmin = std::numeric_limits<double>::infinity();
    for (const auto& xi : dirs) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += mat[i * n + j] * xi[j];
        q += xi[i] * row;
      }
      qmin = std::min(qmin, q);
    }
    const double margin =
        std::min(qmin - lambda, Lambda - operator_norm(mat, n));
    if (margin < worst_margin) {
      worst_margin = margin;
      worst_node = node;
    }
  }
  if (worst_margin < -tol) {
    std::ostringstream msg;
    msg << "coefficient field leaves the ellipticity window [" << lambda
        << ", " << Lambda << "] at node " << worst_node << " (margin "
        << worst_margin << ")";
    throw EllipticityError(msg.str(), worst_node, worst_margin);
  }
  return CoefficientField{a, lambda, Lambda};
}

bool spectrum_in_range(const MatrixField& a, double lambda, double Lambda,
                       double tol) {
  const int n = a.spec.n();
  for (long node = 0; node < a.spec.node_count(); ++node) {
    const double* mat = a.at(node);
    if (smallest_singular_value(mat, n) < lambda - tol) return false;
    if (operator_norm(mat, n) > Lambda + tol) return false;
  }
  return true;
}

}  // namespace ellab
