#include "frost/fem.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace frost {

namespace {

// Geometry factors of one triangle: b_i = y_{i+1} - y_{i+2},
// c_i = x_{i+2} - x_{i+1} (indices cyclic), area = (b x c)/2. The P1
// gradient of shape function i is (b_i, c_i) / (2 area).
struct TriGeom {
  double b[3];
  double c[3];
  double area;
};

TriGeom tri_geometry(const Mesh& mesh, int cell) {
  const auto& t = mesh.cells[cell];
  const Vec2 p0 = mesh.nodes[t[0]];
  const Vec2 p1 = mesh.nodes[t[1]];
  const Vec2 p2 = mesh.nodes[t[2]];
  TriGeom g;
  g.b[0] = p1.y - p2.y;
  g.b[1] = p2.y - p0.y;
  g.b[2] = p0.y - p1.y;
  g.c[0] = p2.x - p1.x;
  g.c[1] = p0.x - p2.x;
  g.c[2] = p1.x - p0.x;
  g.area = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
  if (!(g.area > 0.0))
    throw std::runtime_error("fem: degenerate or inverted triangle " +
                             std::to_string(cell));
  return g;
}

void check_cell_field(const Mesh& mesh, const Eigen::VectorXd& coeff,
                      const char* what) {
  if (coeff.size() != mesh.n_cells())
    throw std::invalid_argument(std::string("fem: ") + what +
                                " field size does not match cell count");
}

}  // namespace

SparseMat assemble_stiffness(const Mesh& mesh, const Eigen::VectorXd& cell_coeff) {
  check_cell_field(mesh, cell_coeff, "stiffness");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(9) * mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const TriGeom g = tri_geometry(mesh, c);
    const auto& t = mesh.cells[c];
    const double f = cell_coeff[c] / (4.0 * g.area);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        trip.emplace_back(t[r], t[s], f * (g.b[r] * g.b[s] + g.c[r] * g.c[s]));
  }
  SparseMat A(mesh.n_nodes(), mesh.n_nodes());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

SparseMat assemble_weighted_mass(const Mesh& mesh, const Eigen::VectorXd& cell_coeff) {
  check_cell_field(mesh, cell_coeff, "mass");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(9) * mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const TriGeom g = tri_geometry(mesh, c);
    const auto& t = mesh.cells[c];
    const double f = cell_coeff[c] * g.area / 12.0;
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        trip.emplace_back(t[r], t[s], f * (r == s ? 2.0 : 1.0));
  }
  SparseMat M(mesh.n_nodes(), mesh.n_nodes());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const Eigen::VectorXd& cell_values) {
  check_cell_field(mesh, cell_values, "load");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_nodes());
  const double third = mesh.cell_area() / 3.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.cells[c];
    const double v = cell_values[c] * third;
    out[t[0]] += v;
    out[t[1]] += v;
    out[t[2]] += v;
  }
  return out;
}

Eigen::VectorXd assemble_convection_rhs(const Mesh& mesh,
                                        const Eigen::VectorXd& cell_capacity,
                                        const CellVectors& velocity,
                                        const Eigen::VectorXd& T_old) {
  check_cell_field(mesh, cell_capacity, "convection capacity");
  if (velocity.rows() != mesh.n_cells())
    throw std::invalid_argument("fem: velocity field size does not match cells");
  if (T_old.size() != mesh.n_nodes())
    throw std::invalid_argument("fem: temperature vector size mismatch");

  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const TriGeom g = tri_geometry(mesh, c);
    const auto& t = mesh.cells[c];
    const double inv2a = 1.0 / (2.0 * g.area);
    const double tx = (T_old[t[0]] * g.b[0] + T_old[t[1]] * g.b[1] + T_old[t[2]] * g.b[2]) * inv2a;
    const double ty = (T_old[t[0]] * g.c[0] + T_old[t[1]] * g.c[1] + T_old[t[2]] * g.c[2]) * inv2a;
    const double v =
        cell_capacity[c] * (velocity(c, 0) * tx + velocity(c, 1) * ty) * g.area / 3.0;
    out[t[0]] += v;
    out[t[1]] += v;
    out[t[2]] += v;
  }
  return out;
}

Eigen::VectorXd apply_weighted_mass(const Mesh& mesh,
                                    const Eigen::VectorXd& cell_coeff,
                                    const Eigen::VectorXd& x) {
  check_cell_field(mesh, cell_coeff, "mass");
  if (x.size() != mesh.n_nodes())
    throw std::invalid_argument("fem: vector size mismatch in mass action");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_nodes());
  const double a12 = mesh.cell_area() / 12.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.cells[c];
    const double f = cell_coeff[c] * a12;
    const double s = x[t[0]] + x[t[1]] + x[t[2]];
    out[t[0]] += f * (s + x[t[0]]);
    out[t[1]] += f * (s + x[t[1]]);
    out[t[2]] += f * (s + x[t[2]]);
  }
  return out;
}

LocalMatrices cell_matrices(const Mesh& mesh, int cell) {
  const TriGeom g = tri_geometry(mesh, cell);
  LocalMatrices lm;
  const double fs = 1.0 / (4.0 * g.area);
  const double fm = g.area / 12.0;
  for (int r = 0; r < 3; ++r) {
    for (int s = 0; s < 3; ++s) {
      lm.stiffness(r, s) = fs * (g.b[r] * g.b[s] + g.c[r] * g.c[s]);
      lm.mass(r, s) = fm * (r == s ? 2.0 : 1.0);
    }
  }
  return lm;
}

CellVectors cell_gradients(const Mesh& mesh, const Eigen::VectorXd& nodal) {
  if (nodal.size() != mesh.n_nodes())
    throw std::invalid_argument("fem: vector size mismatch in gradient");
  CellVectors out(mesh.n_cells(), 2);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const TriGeom g = tri_geometry(mesh, c);
    const auto& t = mesh.cells[c];
    const double inv2a = 1.0 / (2.0 * g.area);
    out(c, 0) = (nodal[t[0]] * g.b[0] + nodal[t[1]] * g.b[1] + nodal[t[2]] * g.b[2]) * inv2a;
    out(c, 1) = (nodal[t[0]] * g.c[0] + nodal[t[1]] * g.c[1] + nodal[t[2]] * g.c[2]) * inv2a;
  }
  return out;
}

LinearSystem apply_dirichlet(LinearSystem system) {
  const int n = static_cast<int>(system.matrix.rows());
  if (system.rhs.size() != n)
    throw std::invalid_argument("fem: rhs size does not match matrix");
  if (system.constraints.empty()) return system;

  std::vector<char> fixed(n, 0);
  std::vector<double> value(n, 0.0);
  for (const auto& [node, val] : system.constraints) {
    if (node < 0 || node >= n)
      throw std::invalid_argument("fem: constraint on node " +
                                  std::to_string(node) + " outside system");
    if (fixed[node] && value[node] != val)
      throw std::invalid_argument("fem: conflicting constraints on node " +
                                  std::to_string(node));
    fixed[node] = 1;
    value[node] = val;
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(system.matrix.nonZeros());
  for (int col = 0; col < system.matrix.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(system.matrix, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (fixed[r]) continue;
      if (fixed[col]) {
        system.rhs[r] -= it.value() * value[col];
        continue;
      }
      trip.emplace_back(r, col, it.value());
    }
  }
  for (int k = 0; k < n; ++k) {
    if (fixed[k]) {
      trip.emplace_back(k, k, 1.0);
      system.rhs[k] = value[k];
    }
  }
  SparseMat constrained(n, n);
  constrained.setFromTriplets(trip.begin(), trip.end());
  system.matrix = std::move(constrained);
  return system;
}

Eigen::VectorXd solve_spd(const SparseMat& matrix, const Eigen::VectorXd& rhs) {
  SpdSolver solver;
  solver.factorize(matrix);
  return solver.solve(rhs);
}

void SpdSolver::factorize(const SparseMat& matrix) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("solver: matrix must be square");
  ldlt_.compute(matrix);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("solver: LDLT factorization failed (matrix not SPD?)");
  ready_ = true;
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs) const {
  if (!ready_) throw std::logic_error("solver: solve before factorize");
  Eigen::VectorXd x = ldlt_.solve(rhs);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("solver: LDLT solve failed");
  return x;
}

EigenPairs solve_dense_generalized_eig(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& S, int m) {
  if (A.rows() != A.cols() || S.rows() != S.cols() || A.rows() != S.rows())
    throw std::invalid_argument("eig: operands must be square and same size");
  if (m < 1 || m > A.rows())
    throw std::invalid_argument("eig: requested count outside 1..n");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.compute(A, S, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  EigenPairs out;
  if (es.info() != Eigen::Success) {
    // S came out numerically indefinite; nudge the diagonal once.
    const double shift = 1e-12 * S.trace() / static_cast<double>(S.rows());
    Eigen::MatrixXd S2 = S;
    S2.diagonal().array() += shift;
    es.compute(A, S2, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eig: generalized decomposition failed");
    out.regularized = true;
  }
  out.values = es.eigenvalues().head(m);
  out.vectors = es.eigenvectors().leftCols(m);
  return out;
}

}  // namespace frost
