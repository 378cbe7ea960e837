#include "core/bump.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace ellab {
namespace {

double profile_sup_impl(int k) {
  double best = 0.0;
  const int steps = 400'000;
  for (int i = 0; i <= steps; ++i) {
    const double t = -1.0 + 2.0 * i / steps;
    best = std::max(best, std::abs(bump_profile_derivative(t, k)));
  }
  return best;
}

// Enumerates per-axis derivative orders (gamma_1..gamma_n) with total <=
// order and returns the binding amplitude bound min (w/2)^|gamma| / prod
// S_{gamma_a}.
double amplitude_bound(double width, int n, int order) {
  double bound = std::numeric_limits<double>::infinity();
  std::array<int, 3> gamma{0, 0, 0};
  while (true) {
    int total = 0;
    for (int a = 0; a < n; ++a) total += gamma[a];
    if (total <= order) {
      double denom = 1.0;
      for (int a = 0; a < n; ++a) {
        denom *= profile_derivative_sup(gamma[a]) * (1.0 + 1e-8);
      }
      bound = std::min(bound, std::pow(width / 2.0, total) / denom);
    }
    int a = 0;
    for (; a < n; ++a) {
      if (++gamma[a] <= order) break;
      gamma[a] = 0;
    }
    if (a == n) break;
  }
  return bound;
}

}  // namespace

double bump_profile(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

double bump_profile_derivative(double t, int k) {
  require(k >= 0 && k <= 2, ErrorCode::InvalidArgument,
          "bump_profile_derivative: order must be 0, 1, or 2");
  if (std::abs(t) >= 1.0 - 1e-12) return 0.0;
  const double s = 1.0 - t * t;
  const double p = std::exp(-1.0 / s);
  if (k == 0) return p;
  const double u1 = -2.0 * t / (s * s);
  if (k == 1) return u1 * p;
  const double u2 = -2.0 * (1.0 + 3.0 * t * t) / (s * s * s);
  return (u2 + u1 * u1) * p;
}

double profile_derivative_sup(int k) {
  static const double sups[3] = {profile_sup_impl(0), profile_sup_impl(1),
                                 profile_sup_impl(2)};
  require(k >= 0 && k <= 2, ErrorCode::InvalidArgument,
          "profile_derivative_sup: order must be 0, 1, or 2");
  return sups[k];
}

double profile_integral() {
  static const double value = [] {
    const int steps = 200'000;  // even, composite Simpson
    const double h = 2.0 / steps;
    double acc = bump_profile(-1.0) + bump_profile(1.0);
    for (int i = 1; i < steps; ++i) {
      acc += bump_profile(-1.0 + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
  }();
  return value;
}

double cutoff_profile(double t) {
  const double u = 2.0 - std::abs(t);
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

BumpDictionary standard_bump_dictionary(int n, int order, bool doubled) {
  require(n == 2 || n == 3, ErrorCode::InvalidArgument,
          "standard_bump_dictionary: dimension must be 2 or 3");
  require(order >= 0 && order <= 2, ErrorCode::InvalidArgument,
          "standard_bump_dictionary: order must be 0, 1, or 2");
  BumpDictionary dict;
  dict.n = n;
  dict.order = order;
  const double widths[5] = {1.0, 0.75, 0.5, 0.35, 0.25};
  auto add_axis_offsets = [&](int axis, bool skip_center) {
    for (double w : widths) {
      const double room = 1.0 - w;
      const double offs[5] = {0.0, 0.5 * room, -0.5 * room, 0.99 * room,
                              -0.99 * room};
      for (int k = skip_center ? 1 : 0; k < 5; ++k) {
        if (k > 0 && room == 0.0) continue;  // duplicate of the centered bump
        BumpSpec s;
        s.width = w;
        s.offset[axis] = offs[k];
        dict.entries.push_back(s);
      }
    }
  };
  add_axis_offsets(0, false);
  if (doubled) add_axis_offsets(1, true);
  return dict;
}

double bump_amplitude(const BumpSpec& spec, int n, int order) {
  require(spec.width > 0.0 && spec.width <= 1.0, ErrorCode::InvalidArgument,
          "bump_amplitude: width must lie in (0, 1]");
  for (int a = 0; a < n; ++a) {
    require(std::abs(spec.offset[a]) + spec.width <= 1.0 + 1e-12,
            ErrorCode::InvalidArgument,
            "bump_amplitude: support leaves the reference cube");
  }
  return amplitude_bound(spec.width, n, order);
}

double bump_value(const BumpSpec& spec, const Cube& q, int order,
                  const std::array<double, 3>& p) {
  const double amp = bump_amplitude(spec, q.n, order);
  const double rad = spec.width * q.half_side;
  double value = amp;
  for (int a = 0; a < q.n; ++a) {
    const double z = q.center[a] + spec.offset[a] * q.half_side;
    value *= bump_profile((p[a] - z) / rad);
    if (value == 0.0) return 0.0;
  }
  return value;
}

double bump_class_ratio(const BumpSpec& spec, const Cube& q, int order,
                        int samples_per_axis) {
  const int n = q.n;
  const double amp = bump_amplitude(spec, n, order);
  const double rad = spec.width * q.half_side;
  std::array<double, 3> z{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) z[a] = q.center[a] + spec.offset[a] * q.half_side;

  double worst = 0.0;
  std::array<int, 3> gamma{0, 0, 0};
  while (true) {
    int total = 0;
    for (int a = 0; a < n; ++a) total += gamma[a];
    if (total <= order) {
      const double bound = std::pow(q.side(), -total);
      // Separable derivative: per-axis sup of |p^(gamma_a)| over the sample
      // lattice, multiplied together, times amp / rad^|gamma|.
      double prod = amp;
      for (int a = 0; a < n; ++a) {
        double axis_sup = 0.0;
        for (int i = 0; i <= samples_per_axis; ++i) {
          const double t = -1.0 + 2.0 * i / samples_per_axis;
          axis_sup =
              std::max(axis_sup, std::abs(bump_profile_derivative(t, gamma[a])));
        }
        prod *= axis_sup / std::pow(rad, gamma[a]);
      }
      worst = std::max(worst, prod / bound);
    }
    int a = 0;
    for (; a < n; ++a) {
      if (++gamma[a] <= order) break;
      gamma[a] = 0;
    }
    if (a == n) break;
  }
  return worst;
}

}  // namespace ellab
