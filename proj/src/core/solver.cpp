#include "core/solver.hpp"

#include <Eigen/Sparse>
#include <chrono>
#include <cmath>
#include <vector>

#include "core/error.hpp"

namespace ellab {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Local Q1 basis: corner k has per-axis bits; value factors are (1-xi) or
// xi.  Gradient of basis k at reference point xi, scaled by 1/h.
void basis_gradient(int n, double h, int corner,
                    const std::array<double, 3>& xi, double* out) {
  for (int a = 0; a < n; ++a) {
    double g = 1.0;
    for (int b = 0; b < n; ++b) {
      const int bit = (corner >> b) & 1;
      if (b == a) {
        g *= bit ? 1.0 : -1.0;
      } else {
        g *= bit ? xi[b] : 1.0 - xi[b];
      }
    }
    out[a] = g / h;
  }
}

struct CellQuadrature {
  int n;
  int corners;
  int points;
  std::vector<std::array<double, 3>> xi;       // reference Gauss points
  std::vector<std::vector<double>> grads;      // [point][corner*n + a], 1/h applied
  double weight;                               // per-point physical weight
};

CellQuadrature make_quadrature(int n, double h) {
  CellQuadrature q;
  q.n = n;
  q.corners = 1 << n;
  q.points = 1 << n;
  const double off = 0.5 / std::sqrt(3.0);
  for (int p = 0; p < q.points; ++p) {
    std::array<double, 3> xi{0.5, 0.5, 0.5};
    for (int a = 0; a < n; ++a) xi[a] = 0.5 + (((p >> a) & 1) ? off : -off);
    q.xi.push_back(xi);
  }
  q.grads.resize(q.points);
  for (int p = 0; p < q.points; ++p) {
    q.grads[p].resize(static_cast<size_t>(q.corners) * n);
    for (int k = 0; k < q.corners; ++k) {
      basis_gradient(n, h, k, q.xi[p], q.grads[p].data() + k * n);
    }
  }
  q.weight = std::pow(h, n) / q.points;
  return q;
}

// Corner-average (= centroid value of the multilinear interpolant) of a
// node-indexed array with `comps` components per node.
void centroid_value(const GridSpec& g, const std::vector<double>& v, int comps,
                    const std::array<int, 3>& cell, double* out) {
  const int corners = 1 << g.n();
  for (int c = 0; c < comps; ++c) out[c] = 0.0;
  for (int k = 0; k < corners; ++k) {
    std::array<int, 3> idx = cell;
    for (int a = 0; a < g.n(); ++a) idx[a] += (k >> a) & 1;
    const long node = g.node_index(idx);
    for (int c = 0; c < comps; ++c) out[c] += v[node * comps + c];
  }
  for (int c = 0; c < comps; ++c) out[c] /= corners;
}

void centroid_gradient(const GridSpec& g, const std::vector<double>& u,
                       const std::array<int, 3>& cell, double* out) {
  const int n = g.n();
  const double h = g.h();
  const int corners = 1 << n;
  for (int a = 0; a < n; ++a) out[a] = 0.0;
  for (int k = 0; k < corners; ++k) {
    std::array<int, 3> idx = cell;
    for (int a = 0; a < n; ++a) idx[a] += (k >> a) & 1;
    const double value = u[static_cast<size_t>(g.node_index(idx))];
    for (int a = 0; a < n; ++a) {
      out[a] += (((k >> a) & 1) ? 1.0 : -1.0) * value;
    }
  }
  const double scale = h * (corners / 2);
  for (int a = 0; a < n; ++a) out[a] /= scale;
}

double boundary_value(const BoundaryCondition& bc, const GridSpec& g,
                      const std::array<int, 3>& idx) {
  if (bc.kind == BoundaryCondition::Kind::Zero) return 0.0;
  double out = 0.0;
  sample_at(bc.data.spec, bc.data.v, 1, g.node_point(idx), &out);
  return out;
}

SolveReport solve_impl(const CoefficientField& coef, const VectorField& load,
                       const BoundaryCondition& bc, bool transpose_a,
                       double tol, const Cube* load_cells = nullptr) {
  const GridSpec& g = coef.base.spec;
  require(same_grid(g, load.spec), ErrorCode::InvalidArgument,
          "solve: coefficient and load grids differ");
  require(tol > 0.0 && tol <= 1e-4, ErrorCode::InvalidArgument,
          "solve: tolerance must lie in (0, 1e-4]");
  require(g.m >= 5, ErrorCode::TooCoarse,
          "solve: grid has fewer than 5 nodes per axis");
  validate_finite(load.v, "solve load");
  if (bc.kind == BoundaryCondition::Kind::Inherited) {
    require(contains_cube(bc.data.spec.domain, g.domain,
                          1e-9 * bc.data.spec.domain.half_side),
            ErrorCode::DomainMargin,
            "solve: boundary data does not cover the solve domain");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const int n = g.n();
  const long nodes = g.node_count();

  std::vector<long> eq(static_cast<size_t>(nodes), -1);
  long unknowns = 0;
  for (long i = 0; i < nodes; ++i) {
    if (!g.is_boundary_node(g.node_multi_index(i))) {
      eq[static_cast<size_t>(i)] = unknowns++;
    }
  }

  SolveReport report;
  report.u = ScalarField(g);
  for (long i = 0; i < nodes; ++i) {
    const auto mi = g.node_multi_index(i);
    if (g.is_boundary_node(mi)) {
      report.u.v[static_cast<size_t>(i)] = boundary_value(bc, g, mi);
    }
  }

  const auto quad = make_quadrature(n, g.h());
  const int corners = quad.corners;
  std::vector<Trip> trips;
  trips.reserve(static_cast<size_t>(g.cell_count()) * corners * corners);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);

  std::vector<long> cell_nodes(static_cast<size_t>(corners));
  double a_c[9];
  double f_c[3];
  double klocal[64];
  for (long c = 0; c < g.cell_count(); ++c) {
    const auto cell = g.cell_multi_index(c);
    centroid_value(g, coef.base.v, n * n, cell, a_c);
    if (transpose_a) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) std::swap(a_c[i * n + j], a_c[j * n + i]);
      }
    }
    // Restricting the load to a cell region keeps the bilinear form intact:
    // the region boundary always passes between centroids, so membership is
    // unambiguous for aligned cubes.
    const bool in_load_region =
        load_cells == nullptr ||
        contains_half_open(*load_cells, g.cell_centroid(cell), 0.0);
    centroid_value(g, load.v, n, cell, f_c);
    if (!in_load_region) {
      for (int r = 0; r < n; ++r) f_c[r] = 0.0;
    }
    for (int k = 0; k < corners; ++k) {
      std::array<int, 3> idx = cell;
      for (int a = 0; a < n; ++a) idx[a] += (k >> a) & 1;
      cell_nodes[static_cast<size_t>(k)] = g.node_index(idx);
    }
    for (int i = 0; i < corners * corners; ++i) klocal[i] = 0.0;
    for (int p = 0; p < quad.points; ++p) {
      const double* gr = quad.grads[p].data();
      for (int j = 0; j < corners; ++j) {
        double agj[3];
        for (int r = 0; r < n; ++r) {
          double acc = 0.0;
          for (int s = 0; s < n; ++s) acc += a_c[r * n + s] * gr[j * n + s];
          agj[r] = acc;
        }
        for (int i = 0; i < corners; ++i) {
          double dot = 0.0;
          for (int r = 0; r < n; ++r) dot += agj[r] * gr[i * n + r];
          klocal[i * corners + j] += quad.weight * dot;
        }
      }
    }
    // Load: F frozen at the centroid against the exact integral of the
    // basis gradient, which equals its centroid value times the volume.
    double grc[8 * 3];
    basis_gradient(n, g.h(), 0, {0.5, 0.5, 0.5}, grc);  // reused below per k
    for (int i = 0; i < corners; ++i) {
      const long row = eq[static_cast<size_t>(cell_nodes[static_cast<size_t>(i)])];
      if (row < 0) continue;
      basis_gradient(n, g.h(), i, {0.5, 0.5, 0.5}, grc);
      double li = 0.0;
      for (int r = 0; r < n; ++r) li += f_c[r] * grc[r];
      rhs[row] += li * std::pow(g.h(), n);
      for (int j = 0; j < corners; ++j) {
        const long node_j = cell_nodes[static_cast<size_t>(j)];
        const long col = eq[static_cast<size_t>(node_j)];
        const double kij = klocal[i * corners + j];
        if (kij == 0.0) continue;
        if (col >= 0) {
          trips.emplace_back(static_cast<int>(row), static_cast<int>(col), kij);
        } else {
          rhs[row] -= kij * report.u.v[static_cast<size_t>(node_j)];
        }
      }
    }
  }

  SpMat mat(unknowns, unknowns);
  mat.setFromTriplets(trips.begin(), trips.end());
  report.assembly_seconds = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  if (rhs.norm() == 0.0) {
    report.residual = 0.0;
    report.iterations = 0;
  } else {
    Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> krylov;
    krylov.compute(mat);
    std::vector<double> history;
    Eigen::VectorXd x;
    bool first = true;
    for (int attempt = 0; attempt < 3; ++attempt) {
      krylov.setTolerance(tol * 0.1);
      krylov.setMaxIterations((50L << attempt) * g.m);
      x = first ? krylov.solve(rhs).eval()
                : krylov.solveWithGuess(rhs, x).eval();
      first = false;
      report.iterations += static_cast<int>(krylov.iterations());
      // Trust the explicitly recomputed residual, not the solver estimate.
      report.residual = (mat * x - rhs).norm() / rhs.norm();
      history.push_back(report.residual);
      if (report.residual <= tol) break;
    }
    if (report.residual > tol) {
      throw ConvergenceError(
          "solve: Krylov iteration failed to reach tolerance", history);
    }
    for (long i = 0; i < nodes; ++i) {
      const long row = eq[static_cast<size_t>(i)];
      if (row >= 0) report.u.v[static_cast<size_t>(i)] = x[row];
    }
  }
  report.solve_seconds = seconds_since(t1);
  report.grad_u = reconstruct_gradient(report.u);
  return report;
}

}  // namespace

CoefficientField frozen_coefficient(const GridSpec& g,
                                    const std::array<double, 9>& a_frozen) {
  const int n = g.n();
  // Quadratic-form lower bound of the constant matrix = smallest eigenvalue
  // of its symmetric part.
  double sym[9];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sym[i * n + j] = 0.5 * (a_frozen[i * n + j] + a_frozen[j * n + i]);
    }
  }
  double lam = std::numeric_limits<double>::infinity();
  for (const auto& xi : probe_directions(n)) {
    double q = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) q += xi[i] * sym[i * n + j] * xi[j];
    }
    lam = std::min(lam, q);
  }
  require(lam > 0.0, ErrorCode::EllipticityViolation,
          "frozen coefficient matrix is not elliptic");
  CoefficientField coef;
  coef.base = MatrixField(g);
  for (long i = 0; i < g.node_count(); ++i) {
    for (int c = 0; c < n * n; ++c) coef.base.at(i)[c] = a_frozen[c];
  }
  coef.lambda = lam;
  coef.Lambda = operator_norm(a_frozen.data(), n);
  return coef;
}

SolveReport solve_dirichlet(const EllipticProblem& prob, double tol) {
  return solve_impl(prob.a, prob.f, prob.bc, false, tol);
}

VectorField reconstruct_gradient(const ScalarField& u) {
  const GridSpec& g = u.spec;
  const int n = g.n();
  VectorField out(g);
  std::vector<int> counts(static_cast<size_t>(g.node_count()), 0);
  double grad[3];
  for (long c = 0; c < g.cell_count(); ++c) {
    const auto cell = g.cell_multi_index(c);
    centroid_gradient(g, u.v, cell, grad);
    const int corners = 1 << n;
    for (int k = 0; k < corners; ++k) {
      std::array<int, 3> idx = cell;
      for (int a = 0; a < n; ++a) idx[a] += (k >> a) & 1;
      const long node = g.node_index(idx);
      for (int a = 0; a < n; ++a) out.at(node)[a] += grad[a];
      ++counts[static_cast<size_t>(node)];
    }
  }
  for (long i = 0; i < g.node_count(); ++i) {
    for (int a = 0; a < n; ++a) out.at(i)[a] /= counts[static_cast<size_t>(i)];
  }
  return out;
}

double load_pairing(const VectorField& w, const ScalarField& eta,
                    const Cube* cells_in) {
  const GridSpec& g = eta.spec;
  require(same_grid(g, w.spec), ErrorCode::InvalidArgument,
          "load_pairing: grids differ");
  const int n = g.n();
  const double voln = std::pow(g.h(), n);
  double acc = 0.0;
  double wc[3];
  double gc[3];
  for (long c = 0; c < g.cell_count(); ++c) {
    const auto cell = g.cell_multi_index(c);
    if (cells_in != nullptr &&
        !contains_half_open(*cells_in, g.cell_centroid(cell), 0.0)) {
      continue;
    }
    centroid_value(g, w.v, n, cell, wc);
    centroid_gradient(g, eta.v, cell, gc);
    double dot = 0.0;
    for (int a = 0; a < n; ++a) dot += wc[a] * gc[a];
    acc += voln * dot;
  }
  return acc;
}

double energy_pairing(const MatrixField& a, bool transpose_a,
                      const ScalarField& u, const ScalarField& eta) {
  const GridSpec& g = u.spec;
  require(same_grid(g, a.spec) && same_grid(g, eta.spec),
          ErrorCode::InvalidArgument, "energy_pairing: grids differ");
  const int n = g.n();
  const auto quad = make_quadrature(n, g.h());
  const int corners = quad.corners;
  double a_c[9];
  double acc = 0.0;
  for (long c = 0; c < g.cell_count(); ++c) {
    const auto cell = g.cell_multi_index(c);
    centroid_value(g, a.v, n * n, cell, a_c);
    if (transpose_a) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) std::swap(a_c[i * n + j], a_c[j * n + i]);
      }
    }
    double uv[8];
    double ev[8];
    for (int k = 0; k < corners; ++k) {
      std::array<int, 3> idx = cell;
      for (int a2 = 0; a2 < n; ++a2) idx[a2] += (k >> a2) & 1;
      const long node = g.node_index(idx);
      uv[k] = u.v[static_cast<size_t>(node)];
      ev[k] = eta.v[static_cast<size_t>(node)];
    }
    for (int p = 0; p < quad.points; ++p) {
      const double* gr = quad.grads[p].data();
      double gu[3] = {0.0, 0.0, 0.0};
      double ge[3] = {0.0, 0.0, 0.0};
      for (int k = 0; k < corners; ++k) {
        for (int r = 0; r < n; ++r) {
          gu[r] += uv[k] * gr[k * n + r];
          ge[r] += ev[k] * gr[k * n + r];
        }
      }
      double dot = 0.0;
      for (int r = 0; r < n; ++r) {
        double row = 0.0;
        for (int s = 0; s < n; ++s) row += a_c[r * n + s] * gu[s];
        dot += row * ge[r];
      }
      acc += quad.weight * dot;
    }
  }
  return acc;
}

double gradient_l2_gauss(const ScalarField& u) {
  const GridSpec& g = u.spec;
  const int n = g.n();
  const auto quad = make_quadrature(n, g.h());
  const int corners = quad.corners;
  double acc = 0.0;
  for (long c = 0; c < g.cell_count(); ++c) {
    const auto cell = g.cell_multi_index(c);
    double uv[8];
    for (int k = 0; k < corners; ++k) {
      std::array<int, 3> idx = cell;
      for (int a = 0; a < n; ++a) idx[a] += (k >> a) & 1;
      uv[k] = u.v[static_cast<size_t>(g.node_index(idx))];
    }
    for (int p = 0; p < quad.points; ++p) {
      const double* gr = quad.grads[p].data();
      double gu[3] = {0.0, 0.0, 0.0};
      for (int k = 0; k < corners; ++k) {
        for (int r = 0; r < n; ++r) gu[r] += uv[k] * gr[k * n + r];
      }
      double norm2 = 0.0;
      for (int r = 0; r < n; ++r) norm2 += gu[r] * gu[r];
      acc += quad.weight * norm2;
    }
  }
  return std::sqrt(acc);
}

ProjectionResult project_T(const CoefficientField& a, const VectorField& g,
                           double tol, const Cube* load_cells) {
  SolveReport report =
      solve_impl(a, g, BoundaryCondition::zero(), true, tol, load_cells);
  ProjectionResult out;
  out.t = std::move(report.u);
  out.grad_t = std::move(report.grad_u);
  return out;
}

ScalarField solve_local_frozen(const Cube& p3,
                               const std::array<double, 9>& a_frozen,
                               const ScalarField& u, double tol, int m_fresh) {
  require(contains_cube(u.spec.domain, p3, 1e-9 * u.spec.domain.half_side),
          ErrorCode::DomainMargin,
          "solve_local_frozen: cube leaves the data grid");
  GridSpec local;
  if (const auto aligned = aligned_subgrid(u.spec, p3);
      aligned.has_value() && aligned->grid.m >= 5) {
    local = aligned->grid;
  } else {
    int m = m_fresh > 0 ? m_fresh : 33;
    if (m % 2 == 0) ++m;
    require(m >= 5, ErrorCode::TooCoarse,
            "solve_local_frozen: requested grid is too coarse");
    local = GridSpec(p3, m);
  }
  const CoefficientField coef = frozen_coefficient(local, a_frozen);
  SolveReport report = solve_impl(coef, VectorField(local),
                                  BoundaryCondition::inherited(u), false, tol);
  return std::move(report.u);
}

}  // namespace ellab
