#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <utility>
#include <vector>

#include "frost/mesh.hpp"

namespace frost {

using SparseMat = Eigen::SparseMatrix<double>;
// One 2-vector per cell, e.g. Darcy velocities or P1 gradients.
using CellVectors = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Weighted P1 operators. Coefficients are one scalar per cell (already
// evaluated at the centroid); the local matrices are exact for constant
// coefficient per cell.
SparseMat assemble_stiffness(const Mesh& mesh, const Eigen::VectorXd& cell_coeff);
SparseMat assemble_weighted_mass(const Mesh& mesh, const Eigen::VectorXd& cell_coeff);

// Right-hand sides by one-point quadrature: load_i = sum_c f_c |c|/3 over
// cells touching node i.
Eigen::VectorXd assemble_load(const Mesh& mesh, const Eigen::VectorXd& cell_values);

// Explicit convection contribution: sum_c capacity_c (u_c . grad T_old) |c|/3
// scattered to the cell's nodes. The caller subtracts it from the rhs.
Eigen::VectorXd assemble_convection_rhs(const Mesh& mesh,
                                        const Eigen::VectorXd& cell_capacity,
                                        const CellVectors& velocity,
                                        const Eigen::VectorXd& T_old);

// Weighted mass-matrix action without assembling the matrix.
Eigen::VectorXd apply_weighted_mass(const Mesh& mesh,
                                    const Eigen::VectorXd& cell_coeff,
                                    const Eigen::VectorXd& x);

// Constant P1 gradient of a nodal field on every cell.
CellVectors cell_gradients(const Mesh& mesh, const Eigen::VectorXd& nodal);

// Unit-coefficient local matrices of one triangle, for callers assembling
// on node subsets.
struct LocalMatrices {
  Eigen::Matrix3d stiffness;
  Eigen::Matrix3d mass;
};
LocalMatrices cell_matrices(const Mesh& mesh, int cell);

struct LinearSystem {
  SparseMat matrix;
  Eigen::VectorXd rhs;
  std::vector<std::pair<int, double>> constraints;
};

// Symmetric Dirichlet elimination: constrained rows and columns are zeroed,
// the diagonal set to one, the rhs adjusted so unconstrained equations see
// the prescribed values. Keeps the matrix symmetric and positive definite.
LinearSystem apply_dirichlet(LinearSystem system);

// Direct SPD solve. Throws on factorization failure.
Eigen::VectorXd solve_spd(const SparseMat& matrix, const Eigen::VectorXd& rhs);

// Reusable factorization for repeated solves against the same matrix.
class SpdSolver {
 public:
  void factorize(const SparseMat& matrix);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::SimplicialLDLT<SparseMat> ldlt_;
  bool ready_ = false;
};

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, S-orthonormal
  bool regularized = false;
};

// Lowest m eigenpairs of A x = lambda S x for symmetric A and SPD S.
// If the S factorization fails, retries once with a tiny diagonal shift
// (1e-12 trace(S)/n) and flags the result.
EigenPairs solve_dense_generalized_eig(const Eigen::MatrixXd& A,
                                       const Eigen::MatrixXd& S, int m);

}  // namespace frost
