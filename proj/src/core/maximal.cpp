#include "core/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "core/error.hpp"

namespace ellab {

namespace {

Kernel1D identity_kernel() {
  Kernel1D k;
  k.lo = 0;
  k.hi = 0;
  k.w = {1.0};
  return k;
}

struct Dims {
  int n = 2;
  int m = 0;
  std::array<int, 3> d{1, 1, 1};
  std::array<int, 3> stride{1, 1, 1};
};

Dims dims_of(const GridSpec& spec) {
  Dims dd;
  dd.n = spec.domain.n;
  dd.m = spec.m;
  for (int a = 0; a < dd.n; ++a) dd.d[a] = spec.m;
  dd.stride[0] = 1;
  dd.stride[1] = dd.d[0];
  dd.stride[2] = dd.d[0] * dd.d[1];
  return dd;
}

// One zero-padded convolution pass along `axis`.
void convolve_axis(std::vector<double>& v, const Dims& dd, int axis,
                   const Kernel1D& k) {
  if (k.lo == 0 && k.hi == 0 && k.w.size() == 1 && k.w[0] == 1.0) return;
  std::vector<double> line(static_cast<size_t>(dd.d[axis]));
  const int st = dd.stride[axis];
  const int len = dd.d[axis];
  const int o1 = (axis == 0) ? 1 : 0;
  const int o2 = (axis == 2) ? 1 : 2;
  for (int i2 = 0; i2 < dd.d[o2]; ++i2) {
    for (int i1 = 0; i1 < dd.d[o1]; ++i1) {
      const int base = i1 * dd.stride[o1] + i2 * dd.stride[o2];
      for (int i = 0; i < len; ++i) {
        double acc = 0.0;
        for (int o = k.lo; o <= k.hi; ++o) {
          const int j = i - o;
          if (j < 0 || j >= len) continue;
          acc += k.w[static_cast<size_t>(o - k.lo)] *
                 v[static_cast<size_t>(base + j * st)];
        }
        line[static_cast<size_t>(i)] = acc;
      }
      for (int i = 0; i < len; ++i)
        v[static_cast<size_t>(base + i * st)] = line[static_cast<size_t>(i)];
    }
  }
}

// Inclusive prefix sums along every active axis (in place).
void prefix_sums(std::vector<double>& v, const Dims& dd) {
  for (int axis = 0; axis < dd.n; ++axis) {
    const int st = dd.stride[axis];
    const int len = dd.d[axis];
    const int o1 = (axis == 0) ? 1 : 0;
    const int o2 = (axis == 2) ? 1 : 2;
    for (int i2 = 0; i2 < dd.d[o2]; ++i2)
      for (int i1 = 0; i1 < dd.d[o1]; ++i1) {
        const int base = i1 * dd.stride[o1] + i2 * dd.stride[o2];
        for (int i = 1; i < len; ++i)
          v[static_cast<size_t>(base + i * st)] +=
              v[static_cast<size_t>(base + (i - 1) * st)];
      }
  }
}

double boxed_prefix(const std::vector<double>& p, const Dims& dd,
                    const std::array<int, 3>& lo, const std::array<int, 3>& hi) {
  // Sum over the clamped index box via inclusion-exclusion on the prefix
  // table; lo/hi are inclusive and already clamped to the grid.
  double total = 0.0;
  const int corners = 1 << dd.n;
  for (int c = 0; c < corners; ++c) {
    int idx = 0;
    int sign = 1;
    bool skip = false;
    for (int a = 0; a < dd.n; ++a) {
      if (c & (1 << a)) {
        if (lo[a] == 0) {
          skip = true;
          break;
        }
        idx += (lo[a] - 1) * dd.stride[a];
        sign = -sign;
      } else {
        idx += hi[a] * dd.stride[a];
      }
    }
    if (skip) continue;
    total += sign * p[static_cast<size_t>(idx)];
  }
  return total;
}

// Per-axis sliding window maximum (brute force window scan).
void window_max_axis(std::vector<double>& v, const Dims& dd, int axis, int r) {
  if (r <= 0) return;
  std::vector<double> line(static_cast<size_t>(dd.d[axis]));
  const int st = dd.stride[axis];
  const int len = dd.d[axis];
  const int o1 = (axis == 0) ? 1 : 0;
  const int o2 = (axis == 2) ? 1 : 2;
  for (int i2 = 0; i2 < dd.d[o2]; ++i2) {
    for (int i1 = 0; i1 < dd.d[o1]; ++i1) {
      const int base = i1 * dd.stride[o1] + i2 * dd.stride[o2];
      for (int i = 0; i < len; ++i) {
        const int a = std::max(0, i - r);
        const int b = std::min(len - 1, i + r);
        double best = v[static_cast<size_t>(base + a * st)];
        for (int j = a + 1; j <= b; ++j)
          best = std::max(best, v[static_cast<size_t>(base + j * st)]);
        line[static_cast<size_t>(i)] = best;
      }
      for (int i = 0; i < len; ++i)
        v[static_cast<size_t>(base + i * st)] = line[static_cast<size_t>(i)];
    }
  }
}

std::vector<int> hl_radii_steps(int m) {
  const int kmax = (m - 1) / 2;
  std::vector<int> steps;
  int k = 1;
  while (k <= kmax) {
    steps.push_back(k);
    k *= 2;
  }
  if (steps.empty() || steps.back() != kmax) steps.push_back(kmax);
  return steps;
}

}  // namespace

Kernel1D mollifier_kernel_1d(double s, double h) {
  require(std::isfinite(s) && std::isfinite(h) && h > 0.0,
          ErrorCode::InvalidArgument, "mollifier scale/spacing must be finite");
  require(s >= 2.0 * h * (1.0 - 1e-12), ErrorCode::TooCoarse,
          "mollifier scale below two grid spacings is under-resolved");
  int radius = static_cast<int>(std::ceil(s / h)) - 1;
  while (radius >= 1 && static_cast<double>(radius) * h >= s) --radius;
  Kernel1D k;
  k.lo = -radius;
  k.hi = radius;
  k.w.resize(static_cast<size_t>(2 * radius + 1));
  double mass = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = bump_profile(static_cast<double>(i) * h / s);
    k.w[static_cast<size_t>(i + radius)] = w;
    mass += w;
  }
  require(mass > 0.0, ErrorCode::Internal, "mollifier stencil has zero mass");
  const double inv = 1.0 / (mass * h);
  for (double& w : k.w) w *= inv;
  return k;
}

ScalarField separable_convolve(const ScalarField& f,
                               const std::array<Kernel1D, 3>& kernels,
                               double scale) {
  ScalarField out = f;
  const Dims dd = dims_of(f.spec);
  for (int axis = 0; axis < dd.n; ++axis)
    convolve_axis(out.v, dd, axis, kernels[static_cast<size_t>(axis)]);
  if (scale != 1.0)
    for (double& x : out.v) x *= scale;
  return out;
}

ScalarField mollify(const ScalarField& f, double s) {
  const double h = f.spec.h();
  const Kernel1D k = mollifier_kernel_1d(s, h);
  std::array<Kernel1D, 3> ks{k, k, k};
  if (f.spec.domain.n == 2) ks[2] = identity_kernel();
  const double hn = std::pow(h, f.spec.domain.n);
  return separable_convolve(f, ks, hn);
}

std::vector<double> ladder_radii(double s, double h) {
  require(std::isfinite(s) && s > 0.0 && h > 0.0, ErrorCode::InvalidArgument,
          "ladder needs positive scale and spacing");
  std::vector<double> radii;
  double r = 0.5 * s;
  while (r >= 2.0 * h * (1.0 - 1e-12)) {
    radii.push_back(r);
    r *= 0.5;
  }
  return radii;
}

ScalarField hl_maximal(const ScalarField& f) {
  const Dims dd = dims_of(f.spec);
  const int m = dd.m;
  require(m >= 3, ErrorCode::TooCoarse, "maximal function needs m >= 3");
  std::vector<double> absf(f.v.size());
  for (size_t i = 0; i < f.v.size(); ++i) absf[i] = std::fabs(f.v[i]);
  validate_finite(absf, "hl_maximal input");

  ScalarField out(f.spec);
  std::fill(out.v.begin(), out.v.end(), 0.0);
  const std::vector<int> steps = hl_radii_steps(m);

  if (m <= 21) {
    // Direct path: every cube average accumulates in flat row-major order
    // (innermost axis fastest), which a brute-force re-summation reproduces
    // exactly.
    std::vector<double> avg(absf.size());
    for (int k : steps) {
      const int r = k - 1;
      for (int z2 = 0; z2 < dd.d[2]; ++z2)
        for (int z1 = 0; z1 < dd.d[1]; ++z1)
          for (int z0 = 0; z0 < dd.d[0]; ++z0) {
            const int a0 = std::max(0, z0 - r), b0 = std::min(m - 1, z0 + r);
            const int a1 = std::max(0, z1 - r), b1 = std::min(dd.d[1] - 1, z1 + r);
            const int a2 = std::max(0, z2 - r), b2 = std::min(dd.d[2] - 1, z2 + r);
            double acc = 0.0;
            long count = 0;
            for (int y2 = a2; y2 <= b2; ++y2)
              for (int y1 = a1; y1 <= b1; ++y1)
                for (int y0 = a0; y0 <= b0; ++y0) {
                  acc += absf[static_cast<size_t>(y0 + dd.stride[1] * y1 +
                                                  dd.stride[2] * y2)];
                  ++count;
                }
            avg[static_cast<size_t>(z0 + dd.stride[1] * z1 +
                                    dd.stride[2] * z2)] = acc /
                                                          static_cast<double>(count);
          }
      std::vector<double> filt = avg;
      for (int axis = 0; axis < dd.n; ++axis) window_max_axis(filt, dd, axis, r);
      for (size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = std::max(out.v[i], filt[i]);
    }
    return out;
  }

  std::vector<double> prefix = absf;
  prefix_sums(prefix, dd);
  std::vector<double> avg(absf.size());
  for (int k : steps) {
    const int r = k - 1;
    for (int z2 = 0; z2 < dd.d[2]; ++z2)
      for (int z1 = 0; z1 < dd.d[1]; ++z1)
        for (int z0 = 0; z0 < dd.d[0]; ++z0) {
          std::array<int, 3> lo{std::max(0, z0 - r), std::max(0, z1 - r),
                                std::max(0, z2 - r)};
          std::array<int, 3> hi{std::min(m - 1, z0 + r),
                                std::min(dd.d[1] - 1, z1 + r),
                                std::min(dd.d[2] - 1, z2 + r)};
          long count = 1;
          for (int a = 0; a < dd.n; ++a) count *= (hi[a] - lo[a] + 1);
          const double sum = boxed_prefix(prefix, dd, lo, hi);
          avg[static_cast<size_t>(z0 + dd.stride[1] * z1 + dd.stride[2] * z2)] =
              sum / static_cast<double>(count);
        }
    std::vector<double> filt = avg;
    for (int axis = 0; axis < dd.n; ++axis) window_max_axis(filt, dd, axis, r);
    for (size_t i = 0; i < out.v.size(); ++i)
      out.v[i] = std::max(out.v[i], filt[i]);
  }
  return out;
}

ScalarField smooth_maximal(const ScalarField& f, double s) {
  const double h = f.spec.h();
  require(s >= 4.0 * h * (1.0 - 1e-12), ErrorCode::TooCoarse,
          "smooth maximal scale below four grid spacings");
  const std::vector<double> radii = ladder_radii(s, h);
  require(!radii.empty(), ErrorCode::TooCoarse, "empty mollifier ladder");
  ScalarField out(f.spec);
  std::fill(out.v.begin(), out.v.end(), 0.0);
  for (double r : radii) {
    const ScalarField g = mollify(f, r);
    for (size_t i = 0; i < out.v.size(); ++i)
      out.v[i] = std::max(out.v[i], std::fabs(g.v[i]));
  }
  return out;
}

ScalarField grand_maximal(const ScalarField& f, double s,
                          const BumpDictionary& dict) {
  const int n = f.spec.domain.n;
  require(dict.n == n, ErrorCode::InvalidArgument,
          "dictionary dimension mismatch");
  require(!dict.entries.empty(), ErrorCode::InvalidArgument,
          "empty bump dictionary");
  const double h = f.spec.h();
  require(s >= 4.0 * h * (1.0 - 1e-12), ErrorCode::TooCoarse,
          "grand maximal scale below four grid spacings");
  const std::vector<double> radii = ladder_radii(s, h);
  ScalarField out(f.spec);
  std::fill(out.v.begin(), out.v.end(), 0.0);
  const double hn = std::pow(h, n);
  for (const BumpSpec& spec : dict.entries) {
    const double amp = bump_amplitude(spec, n, dict.order);
    for (double t : radii) {
      // Kernel b_t(y) = t^-n * b(y / t) with b the class bump on Q(0, 1):
      // per axis the taps are p((i h - o_a t) / (w t)) on |i h - o_a t| < w t.
      std::array<Kernel1D, 3> ks{identity_kernel(), identity_kernel(),
                                 identity_kernel()};
      bool empty = false;
      for (int a = 0; a < n; ++a) {
        const double c = spec.offset[static_cast<size_t>(a)] * t;
        const double rad = spec.width * t;
        int lo = static_cast<int>(std::floor((c - rad) / h)) + 1;
        int hi = static_cast<int>(std::ceil((c + rad) / h)) - 1;
        if (lo > hi) {
          empty = true;
          break;
        }
        Kernel1D k;
        k.lo = lo;
        k.hi = hi;
        k.w.resize(static_cast<size_t>(hi - lo + 1));
        for (int i = lo; i <= hi; ++i)
          k.w[static_cast<size_t>(i - lo)] =
              bump_profile((static_cast<double>(i) * h - c) / rad);
        ks[static_cast<size_t>(a)] = k;
      }
      if (empty) continue;
      const double scale = amp * std::pow(t, -n) * hn;
      const ScalarField g = separable_convolve(f, ks, scale);
      for (size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = std::max(out.v[i], std::fabs(g.v[i]));
    }
  }
  return out;
}

}  // namespace ellab
