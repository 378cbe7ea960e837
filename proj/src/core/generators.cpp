#include "core/generators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

#include "core/error.hpp"

namespace ellab {
namespace {

constexpr int kOctaves = 6;     // fixed, so refinement sees the same field
constexpr int kDatumModes = 5;  // band limit of the random data fields

// Independent deterministic sub-streams of one seed.
unsigned mix_seed(unsigned seed, unsigned salt) {
  uint64_t z = (static_cast<uint64_t>(seed) << 16) + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return static_cast<unsigned>(z ^ (z >> 31));
}

// Position hash for piecewise-constant tiles.
uint64_t tile_hash(unsigned seed, long ix, long iy, long iz) {
  uint64_t z = static_cast<uint64_t>(seed);
  for (long v : {ix + 1, iy + 1, iz + 1}) {
    z += 0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(v + 0x100);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  }
  return z ^ (z >> 31);
}

std::array<double, 3> unit_direction(std::mt19937& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::array<double, 3> u{0.0, 0.0, 0.0};
  double norm = 0.0;
  while (norm < 1e-12) {
    norm = 0.0;
    for (int a = 0; a < n; ++a) {
      u[a] = gauss(rng);
      norm += u[a] * u[a];
    }
    norm = std::sqrt(norm);
  }
  for (int a = 0; a < n; ++a) u[a] /= norm;
  return u;
}

// Random symmetric matrix with unit operator norm.
Eigen::MatrixXd unit_symmetric(std::mt19937& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd e(n, n);
  double norm = 0.0;
  while (norm < 1e-12) {
    for (int r = 0; r < n; ++r) {
      for (int c = r; c < n; ++c) {
        e(r, c) = gauss(rng);
        e(c, r) = e(r, c);
      }
    }
    norm = e.operatorNorm();
  }
  return e / norm;
}

// Clamp the spectrum of a symmetric matrix into [lo, hi].
void eigen_clip(Eigen::MatrixXd& m, double lo, double hi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues();
  bool touched = false;
  for (int i = 0; i < ev.size(); ++i) {
    const double c = std::min(hi, std::max(lo, ev[i]));
    if (c != ev[i]) touched = true;
    ev[i] = c;
  }
  if (touched) {
    m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  }
}

struct OctaveParams {
  std::array<double, 3> dir;
  double phase;
  Eigen::MatrixXd profile;
};

CoefficientField build_constant(const GridSpec& g, double lambda,
                                double Lambda, unsigned seed) {
  const int n = g.n();
  std::mt19937 rng(seed);
  const double margin = 0.1 * (Lambda - lambda);
  std::uniform_real_distribution<double> in_window(lambda + margin,
                                                   Lambda - margin);
  Eigen::VectorXd ev(n);
  for (int i = 0; i < n; ++i) ev[i] = in_window(rng);
  // Random rotation from the QR factor of a Gaussian matrix.
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd raw(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) raw(r, c) = gauss(rng);
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ();
  const Eigen::MatrixXd am = q * ev.asDiagonal() * q.transpose();

  MatrixField a(g);
  for (long i = 0; i < g.node_count(); ++i) {
    double* m = a.at(i);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m[r * n + c] = am(r, c);
  }
  return ellipticity_check(a, lambda, Lambda);
}

CoefficientField build_oscillatory(const GridSpec& g, CoefficientClass cls,
                                   double lambda, double Lambda, double alpha,
                                   unsigned seed, int* damp_events) {
  const int n = g.n();
  const double center = 0.5 * (lambda + Lambda);
  const double window = 0.5 * (Lambda - lambda);
  const bool lacunary = cls == CoefficientClass::holder;
  const int octaves = lacunary ? kOctaves : 1;

  // All randomness is drawn up front so a damped retry reuses the same
  // waves with a smaller amplitude (the determinism contract).
  std::mt19937 rng(seed);
  std::vector<OctaveParams> waves;
  waves.reserve(octaves);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> stretch(0.8, 1.2);
  const double base_freq =
      (lacunary ? M_PI : 0.8 * M_PI) * stretch(rng) / g.domain.side();
  for (int j = 0; j < octaves; ++j) {
    OctaveParams w;
    w.dir = unit_direction(rng, n);
    w.phase = phase(rng);
    w.profile = unit_symmetric(rng, n);
    waves.push_back(std::move(w));
  }

  double amp = (lacunary ? 0.35 : 0.4) * (Lambda - lambda);
  int attempts = 0;
  for (;;) {
    MatrixField a(g);
    Eigen::MatrixXd node(n, n);
    for (long i = 0; i < g.node_count(); ++i) {
      const auto x = g.node_point(i);
      node.setZero();
      for (int r = 0; r < n; ++r) node(r, r) = center;
      for (int j = 0; j < octaves; ++j) {
        const OctaveParams& w = waves[static_cast<size_t>(j)];
        double arg = w.phase;
        const double freq = base_freq * std::pow(2.0, j);
        for (int axis = 0; axis < n; ++axis) {
          arg += freq * w.dir[axis] * x[axis];
        }
        const double scale =
            amp * (lacunary ? std::pow(2.0, -alpha * j) : 1.0) * std::cos(arg);
        node += scale * w.profile;
      }
      eigen_clip(node, lambda, Lambda);
      double* m = a.at(i);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m[r * n + c] = node(r, c);
    }
    try {
      return ellipticity_check(a, lambda, Lambda);
    } catch (const Error&) {
      ++attempts;
      if (damp_events != nullptr) *damp_events = attempts;
      require(attempts < 8, ErrorCode::Internal,
              "coefficient generator: damped regeneration failed to certify "
              "ellipticity");
      amp *= 0.7;
    }
  }
}

CoefficientField build_checkerboard(const GridSpec& g, double lambda,
                                    double Lambda, unsigned seed) {
  const int n = g.n();
  const double tile = g.domain.side() / 8.0;
  MatrixField a(g);
  for (long i = 0; i < g.node_count(); ++i) {
    const auto x = g.node_point(i);
    long idx[3] = {0, 0, 0};
    for (int axis = 0; axis < n; ++axis) {
      // The nudge keeps tile membership stable under grid refinement: a
      // node on a tile face lands in the upper tile at every resolution.
      idx[axis] = static_cast<long>(std::floor(
          (x[axis] - g.domain.corner_low(axis)) / tile + 1e-9));
      idx[axis] = std::max(0L, std::min(idx[axis], 7L));
    }
    const bool high = (tile_hash(seed, idx[0], idx[1], idx[2]) & 1) != 0;
    const double value = high ? Lambda : lambda;
    double* m = a.at(i);
    for (int r = 0; r < n; ++r) m[r * n + r] = value;
  }
  return ellipticity_check(a, lambda, Lambda);
}

ScalarField build_trace(const GridSpec& g, unsigned seed) {
  const int n = g.n();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> ampd(0.3, 1.0);
  std::uniform_real_distribution<double> freqd(0.5 * M_PI, 2.0 * M_PI);
  struct Mode {
    std::array<double, 3> dir;
    double freq, phase, amp;
  };
  std::vector<Mode> modes(kDatumModes);
  for (Mode& mo : modes) {
    mo.dir = unit_direction(rng, n);
    mo.freq = freqd(rng) / g.domain.side();
    mo.phase = phase(rng);
    mo.amp = ampd(rng);
  }
  const auto tilt = unit_direction(rng, n);
  ScalarField out(g);
  for (long i = 0; i < g.node_count(); ++i) {
    const auto x = g.node_point(i);
    double v = 0.0;
    for (const Mode& mo : modes) {
      double arg = mo.phase;
      for (int axis = 0; axis < n; ++axis) arg += mo.freq * mo.dir[axis] * x[axis];
      v += mo.amp * std::cos(arg);
    }
    for (int axis = 0; axis < n; ++axis) v += 0.3 * tilt[axis] * x[axis];
    out.v[i] = v;
  }
  return out;
}

}  // namespace

CoefficientClass coefficient_class_from_string(const std::string& s) {
  if (s == "constant") return CoefficientClass::constant;
  if (s == "holder") return CoefficientClass::holder;
  if (s == "uniform-continuous") return CoefficientClass::uniform_continuous;
  if (s == "checkerboard") return CoefficientClass::checkerboard;
  throw Error(ErrorCode::InvalidArgument,
              "unknown coefficient class '" + s +
                  "' (expected constant | holder | uniform-continuous | "
                  "checkerboard)");
}

std::string to_string(CoefficientClass c) {
  switch (c) {
    case CoefficientClass::constant:
      return "constant";
    case CoefficientClass::holder:
      return "holder";
    case CoefficientClass::uniform_continuous:
      return "uniform-continuous";
    case CoefficientClass::checkerboard:
      return "checkerboard";
  }
  throw Error(ErrorCode::Internal, "unhandled coefficient class");
}

CoefficientField generate_coefficient(const GridSpec& grid,
                                      CoefficientClass cls, double lambda,
                                      double Lambda, double alpha,
                                      unsigned seed, int* damp_events) {
  require(lambda > 0.0 && Lambda >= lambda, ErrorCode::InvalidArgument,
          "coefficient generator: need 0 < lambda <= Lambda");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument,
          "coefficient generator: the smoothness exponent must lie in (0,1)");
  if (damp_events != nullptr) *damp_events = 0;
  switch (cls) {
    case CoefficientClass::constant:
      return build_constant(grid, lambda, Lambda, seed);
    case CoefficientClass::holder:
    case CoefficientClass::uniform_continuous:
      return build_oscillatory(grid, cls, lambda, Lambda, alpha, seed,
                               damp_events);
    case CoefficientClass::checkerboard:
      return build_checkerboard(grid, lambda, Lambda, seed);
  }
  throw Error(ErrorCode::Internal, "unhandled coefficient class");
}

VectorField generate_datum(const GridSpec& grid, unsigned seed) {
  const int n = grid.n();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> ampd(0.3, 1.0);
  std::uniform_real_distribution<double> freqd(0.5 * M_PI, 2.5 * M_PI);
  struct Mode {
    std::array<double, 3> dir, pol;
    double freq, phase, amp;
  };
  std::vector<Mode> modes(kDatumModes);
  for (Mode& mo : modes) {
    mo.dir = unit_direction(rng, n);
    mo.pol = unit_direction(rng, n);
    mo.freq = freqd(rng) / grid.domain.side();
    mo.phase = phase(rng);
    mo.amp = ampd(rng);
  }
  VectorField out(grid);
  for (long i = 0; i < grid.node_count(); ++i) {
    const auto x = grid.node_point(i);
    double* v = out.at(i);
    for (const Mode& mo : modes) {
      double arg = mo.phase;
      for (int axis = 0; axis < n; ++axis) arg += mo.freq * mo.dir[axis] * x[axis];
      const double osc = mo.amp * std::cos(arg);
      for (int axis = 0; axis < n; ++axis) v[axis] += osc * mo.pol[axis];
    }
  }
  return out;
}

GeneratedInstance generate_instance(const GridSpec& grid, CoefficientClass cls,
                                    double lambda, double Lambda, double alpha,
                                    unsigned seed) {
  GeneratedInstance inst;
  inst.a = generate_coefficient(grid, cls, lambda, Lambda, alpha,
                                mix_seed(seed, 1), &inst.damp_events);
  inst.f = generate_datum(grid, mix_seed(seed, 2));
  inst.bc_trace = build_trace(grid, mix_seed(seed, 3));
  inst.g = generate_datum(grid, mix_seed(seed, 4));
  return inst;
}

}  // namespace ellab
