#include "core/cube.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace ellab {

Cube::Cube(std::array<double, 3> c, double r, int dim)
    : center(c), half_side(r), n(dim) {
  require(dim == 2 || dim == 3, ErrorCode::InvalidArgument,
          "cube dimension must be 2 or 3");
  require(std::isfinite(r) && r > 0.0, ErrorCode::InvalidArgument,
          "cube half-side must be positive and finite");
  for (int i = 0; i < dim; ++i)
    require(std::isfinite(c[i]), ErrorCode::InvalidArgument,
            "cube center must be finite");
}

double Cube::volume() const {
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= side();
  return v;
}

Cube dilate(const Cube& q, double factor) {
  require(std::isfinite(factor) && factor > 0.0, ErrorCode::InvalidArgument,
          "dilation factor must be positive");
  return Cube(q.center, q.half_side * factor, q.n);
}

std::vector<Cube> subdivide_ratio(const Cube& q, int ratio) {
  require(ratio == 27 || ratio == 8, ErrorCode::InvalidArgument,
          "subdivision ratio must be 27 or 8");
  const double child_side = q.side() / ratio;
  const double child_half = 0.5 * child_side;
  std::vector<Cube> out;
  long count = 1;
  for (int i = 0; i < q.n; ++i) count *= ratio;
  out.reserve(static_cast<size_t>(count));
  std::array<int, 3> k{0, 0, 0};
  for (long flat = 0; flat < count; ++flat) {
    long rem = flat;
    for (int i = 0; i < q.n; ++i) {
      k[i] = static_cast<int>(rem % ratio);
      rem /= ratio;
    }
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int i = 0; i < q.n; ++i)
      c[i] = q.corner_low(i) + (k[i] + 0.5) * child_side;
    out.emplace_back(c, child_half, q.n);
  }
  return out;
}

std::vector<Cube> dyadic_subcubes(const Cube& q, int depth) {
  require(depth >= 0 && depth <= 30, ErrorCode::InvalidArgument,
          "dyadic depth must lie in [0, 30]");
  const long per_axis = 1L << depth;
  const double child_side = q.side() / static_cast<double>(per_axis);
  const double child_half = 0.5 * child_side;
  long count = 1;
  for (int i = 0; i < q.n; ++i) count *= per_axis;
  std::vector<Cube> out;
  out.reserve(static_cast<size_t>(count));
  std::array<long, 3> k{0, 0, 0};
  for (long flat = 0; flat < count; ++flat) {
    long rem = flat;
    for (int i = 0; i < q.n; ++i) {
      k[i] = rem % per_axis;
      rem /= per_axis;
    }
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (int i = 0; i < q.n; ++i)
      c[i] = q.corner_low(i) + (k[i] + 0.5) * child_side;
    out.emplace_back(c, child_half, q.n);
  }
  return out;
}

Cube dyadic_cell(const Cube& q, int depth, const std::array<double, 3>& p) {
  require(depth >= 0 && depth <= 30, ErrorCode::InvalidArgument,
          "dyadic depth must lie in [0, 30]");
  const long per_axis = 1L << depth;
  const double child_side = q.side() / static_cast<double>(per_axis);
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (int i = 0; i < q.n; ++i) {
    double t = (p[i] - q.corner_low(i)) / child_side;
    long k = static_cast<long>(std::floor(t));
    if (k < 0) k = 0;
    if (k >= per_axis) k = per_axis - 1;
    c[i] = q.corner_low(i) + (k + 0.5) * child_side;
  }
  return Cube(c, 0.5 * child_side, q.n);
}

bool contains_point(const Cube& q, const std::array<double, 3>& p,
                    double slack) {
  for (int i = 0; i < q.n; ++i)
    if (std::abs(p[i] - q.center[i]) >= q.half_side + slack) return false;
  return true;
}

bool contains_half_open(const Cube& q, const std::array<double, 3>& p,
                        double tol) {
  for (int i = 0; i < q.n; ++i) {
    if (p[i] < q.corner_low(i) - tol) return false;
    if (p[i] >= q.corner_high(i) - tol) return false;
  }
  return true;
}

bool contains_cube(const Cube& outer, const Cube& inner, double slack) {
  for (int i = 0; i < outer.n; ++i) {
    if (inner.corner_low(i) < outer.corner_low(i) - slack) return false;
    if (inner.corner_high(i) > outer.corner_high(i) + slack) return false;
  }
  return true;
}

bool cubes_intersect(const Cube& a, const Cube& b) {
  for (int i = 0; i < a.n; ++i)
    if (std::abs(a.center[i] - b.center[i]) >= a.half_side + b.half_side)
      return false;
  return true;
}

double dist_inf(const std::array<double, 3>& a, const std::array<double, 3>& b,
                int n) {
  double d = 0.0;
  for (int i = 0; i < n; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::string cube_to_json(const Cube& q) {
  nlohmann::json j;
  std::vector<double> c(q.center.begin(), q.center.begin() + q.n);
  j["center"] = c;
  j["half_side"] = q.half_side;
  j["n"] = q.n;
  return j.dump();
}

Cube cube_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string("cube json parse: ") + e.what());
  }
  require(j.contains("center") && j.contains("half_side") && j.contains("n"),
          ErrorCode::IoError, "cube json missing center/half_side/n");
  const int n = j["n"].get<int>();
  require(n == 2 || n == 3, ErrorCode::InvalidArgument,
          "cube dimension must be 2 or 3");
  auto c = j["center"].get<std::vector<double>>();
  require(static_cast<int>(c.size()) == n, ErrorCode::IoError,
          "cube json center length mismatch");
  std::array<double, 3> center{0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i) center[i] = c[static_cast<size_t>(i)];
  return Cube(center, j["half_side"].get<double>(), n);
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::EllipticityViolation: return "ellipticity-violation";
    case ErrorCode::ConvergenceFailure: return "convergence-failure";
    case ErrorCode::TooCoarse: return "too-coarse";
    case ErrorCode::DomainMargin: return "domain-margin";
    case ErrorCode::NoExterior: return "no-exterior";
    case ErrorCode::StoppingFailure: return "stopping-failure";
    case ErrorCode::IoError: return "io-error";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace ellab
