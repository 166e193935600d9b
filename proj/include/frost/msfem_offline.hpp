#pragma once

#include <vector>

#include "frost/fem.hpp"
#include "frost/materials.hpp"
#include "frost/mesh.hpp"

namespace frost {

// Bilinear coarse hat functions sampled at fine nodes, stored per
// neighborhood in local node order. Hats are evaluated in integer index
// space so the four tents covering any node sum to one at roundoff level.
struct PartitionOfUnity {
  std::vector<Eigen::VectorXd> chi;  // one vector per coarse vertex, size n_local
};

PartitionOfUnity build_pou(const Mesh& mesh, const CoarseGrid& coarse,
                           const NeighborhoodMap& map);

// Harmonic extensions of unit boundary values: column j solves the
// coefficient Laplacian on omega with a discrete delta at the j-th
// boundary node of the rim.
struct SnapshotSpace {
  int omega = -1;
  Eigen::MatrixXd vectors;  // n_local x n_boundary, local node order
};

SnapshotSpace compute_snapshots(const Mesh& mesh, const Neighborhood& nh,
                                const Eigen::VectorXd& cell_coeff);

// Dense local P1 operators on a neighborhood, local node order.
Eigen::MatrixXd local_stiffness(const Mesh& mesh, const Neighborhood& nh,
                                const Eigen::VectorXd& cell_coeff);
Eigen::MatrixXd local_mass(const Mesh& mesh, const Neighborhood& nh,
                           const Eigen::VectorXd& cell_coeff);

struct SpectralBasis {
  Eigen::VectorXd eigenvalues;  // ascending, length M
  Eigen::MatrixXd vectors;      // n_local x M, lifted from the snapshot space
  bool regularized = false;
};

// Projects the local stiffness and weighted mass onto the snapshot space,
// solves the generalized eigenproblem and lifts the M lowest modes back to
// fine nodal vectors. Column signs follow the first-nonzero-positive rule.
SpectralBasis solve_spectral(const Mesh& mesh, const Neighborhood& nh,
                             const SnapshotSpace& snapshots,
                             const Eigen::VectorXd& cell_coeff, int m);

// Pointwise product of each lifted eigenvector with the local hat.
Eigen::MatrixXd build_offline_basis(const Eigen::MatrixXd& lifted,
                                    const Eigen::VectorXd& chi);

// Extra temperature basis for pipe-carrying neighborhoods: harmonic in the
// unfrozen conductivity, T_p on the pipe nodes, zero on the rim. Returned
// before the hat product; pipe constraints win where a pipe touches the rim.
Eigen::VectorXd solve_pipe_profile(const Mesh& mesh, const Neighborhood& nh,
                                   const Eigen::VectorXd& cell_coeff, double t_pipe);

// Online enrichment block: one basis vector per listed neighborhood,
// stored on the neighborhood's local nodes.
struct OnlineBlock {
  std::vector<int> omegas;
  std::vector<Eigen::VectorXd> vectors;

  int n_rows() const { return static_cast<int>(omegas.size()); }
};

// The reduced space: per-neighborhood offline blocks for both fields plus
// pipe profiles, kept local so projection matrices for any basis count
// m <= m_offline can be stacked on demand.
struct MultiscaleSpace {
  int n_nodes = 0;
  int m_offline = 0;
  std::vector<std::vector<int>> omega_nodes;  // global ids, local order
  std::vector<Eigen::MatrixXd> t_offline;     // n_local x m_offline each
  std::vector<Eigen::MatrixXd> p_offline;
  std::vector<int> pipe_omegas;           // ascending
  std::vector<Eigen::VectorXd> t_pipe;    // hat-multiplied pipe bases
  bool spectral_regularized = false;

  int n_omega() const { return static_cast<int>(omega_nodes.size()); }
  // pressure blocks are kept but empty when no layer conducts
  bool has_pressure() const {
    return !p_offline.empty() && p_offline.front().size() > 0;
  }
  void validate() const;
};

MultiscaleSpace build_offline_space(const Mesh& mesh, const CoarseGrid& coarse,
                                    const NeighborhoodMap& map,
                                    const PartitionOfUnity& pou,
                                    const MaterialField& materials,
                                    double t_pipe, int m);

// Stacks basis rows into a sparse projection operator. Row order: offline
// blocks by neighborhood, then pipe rows, then online blocks in the order
// given. m_use limits the offline columns taken per neighborhood.
SparseMat assemble_projection_T(const MultiscaleSpace& space, int m_use,
                                const std::vector<OnlineBlock>& online);
SparseMat assemble_projection_p(const MultiscaleSpace& space, int m_use,
                                const std::vector<OnlineBlock>& online);

}  // namespace frost
