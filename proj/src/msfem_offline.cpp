#include "frost/msfem_offline.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace frost {

namespace {

// Local indices of the rim and the strict interior of a neighborhood.
struct LocalSplit {
  std::vector<int> interior;
  std::vector<int> boundary;
};

LocalSplit split_local(const Mesh& mesh, const Neighborhood& nh) {
  LocalSplit s;
  const int row = mesh.nx + 1;
  s.interior.reserve(nh.interior.size());
  s.boundary.reserve(nh.boundary.size());
  for (int g : nh.interior) s.interior.push_back(nh.local_node(g, row));
  for (int g : nh.boundary) s.boundary.push_back(nh.local_node(g, row));
  return s;
}

void fix_column_signs(Eigen::MatrixXd& vectors) {
  for (int j = 0; j < vectors.cols(); ++j) {
    const double scale = vectors.col(j).cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    for (int i = 0; i < vectors.rows(); ++i) {
      const double v = vectors(i, j);
      if (std::abs(v) > 1e-12 * scale) {
        if (v < 0.0) vectors.col(j) = -vectors.col(j);
        break;
      }
    }
  }
}

}  // namespace

PartitionOfUnity build_pou(const Mesh&, const CoarseGrid& coarse,
                           const NeighborhoodMap& map) {
  PartitionOfUnity pou;
  pou.chi.resize(map.items.size());
  const long mxmy = static_cast<long>(coarse.mx) * coarse.my;

  for (size_t v = 0; v < map.items.size(); ++v) {
    const Neighborhood& nh = map.items[v];
    const int bi = (static_cast<int>(v) % (coarse.nx + 1)) * coarse.mx;
    const int bj = (static_cast<int>(v) / (coarse.nx + 1)) * coarse.my;
    Eigen::VectorXd& chi = pou.chi[v];
    chi.resize(nh.n_local());
    int k = 0;
    for (int j = nh.j_lo; j <= nh.j_hi; ++j) {
      for (int i = nh.i_lo; i <= nh.i_hi; ++i, ++k) {
        const int dx = std::abs(i - bi);
        const int dy = std::abs(j - bj);
        // integer numerator over integer denominator: one rounding per value
        chi[k] = (dx < coarse.mx && dy < coarse.my)
                     ? static_cast<double>(static_cast<long>(coarse.mx - dx) *
                                           (coarse.my - dy)) /
                           static_cast<double>(mxmy)
                     : 0.0;
      }
    }
  }
  return pou;
}

Eigen::MatrixXd local_stiffness(const Mesh& mesh, const Neighborhood& nh,
                                const Eigen::VectorXd& cell_coeff) {
  if (cell_coeff.size() != mesh.n_cells())
    throw std::invalid_argument("local assembly: coefficient field size mismatch");
  const int n = nh.n_local();
  const int row = mesh.nx + 1;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int c : nh.cells) {
    const LocalMatrices lm = cell_matrices(mesh, c);
    const auto& t = mesh.cells[c];
    int loc[3];
    for (int r = 0; r < 3; ++r) loc[r] = nh.local_node(t[r], row);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        K(loc[r], loc[s]) += cell_coeff[c] * lm.stiffness(r, s);
  }
  return K;
}

Eigen::MatrixXd local_mass(const Mesh& mesh, const Neighborhood& nh,
                           const Eigen::VectorXd& cell_coeff) {
  if (cell_coeff.size() != mesh.n_cells())
    throw std::invalid_argument("local assembly: coefficient field size mismatch");
  const int n = nh.n_local();
  const int row = mesh.nx + 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int c : nh.cells) {
    const LocalMatrices lm = cell_matrices(mesh, c);
    const auto& t = mesh.cells[c];
    int loc[3];
    for (int r = 0; r < 3; ++r) loc[r] = nh.local_node(t[r], row);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        M(loc[r], loc[s]) += cell_coeff[c] * lm.mass(r, s);
  }
  return M;
}

SnapshotSpace compute_snapshots(const Mesh& mesh, const Neighborhood& nh,
                                const Eigen::VectorXd& cell_coeff) {
  if (nh.interior.empty())
    throw std::invalid_argument("snapshots: neighborhood of vertex " +
                                std::to_string(nh.vertex) + " has no interior");

  const Eigen::MatrixXd K = local_stiffness(mesh, nh, cell_coeff);
  const LocalSplit split = split_local(mesh, nh);
  const int nb = static_cast<int>(split.boundary.size());

  Eigen::MatrixXd K_ii = K(split.interior, split.interior);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(K_ii);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("snapshots: singular interior block on vertex " +
                             std::to_string(nh.vertex));

  SnapshotSpace snap;
  snap.omega = nh.vertex;
  snap.vectors = Eigen::MatrixXd::Zero(nh.n_local(), nb);
  // harmonic extension of each boundary delta
  const Eigen::MatrixXd K_ib = K(split.interior, split.boundary);
  const Eigen::MatrixXd lift = ldlt.solve(-K_ib);
  for (int j = 0; j < nb; ++j) {
    snap.vectors(split.boundary[j], j) = 1.0;
    for (size_t r = 0; r < split.interior.size(); ++r)
      snap.vectors(split.interior[r], j) = lift(r, j);
  }
  return snap;
}

SpectralBasis solve_spectral(const Mesh& mesh, const Neighborhood& nh,
                             const SnapshotSpace& snapshots,
                             const Eigen::VectorXd& cell_coeff, int m) {
  const Eigen::MatrixXd& V = snapshots.vectors;
  if (m < 1 || m > V.cols())
    throw std::invalid_argument("spectral: basis count must lie in 1.." +
                                std::to_string(V.cols()));

  const Eigen::MatrixXd K = local_stiffness(mesh, nh, cell_coeff);
  const Eigen::MatrixXd M = local_mass(mesh, nh, cell_coeff);
  const Eigen::MatrixXd A_tilde = V.transpose() * K * V;
  const Eigen::MatrixXd S_tilde = V.transpose() * M * V;

  const EigenPairs pairs = solve_dense_generalized_eig(A_tilde, S_tilde, m);

  SpectralBasis basis;
  basis.eigenvalues = pairs.values;
  basis.vectors = V * pairs.vectors;
  basis.regularized = pairs.regularized;
  fix_column_signs(basis.vectors);
  return basis;
}

Eigen::MatrixXd build_offline_basis(const Eigen::MatrixXd& lifted,
                                    const Eigen::VectorXd& chi) {
  if (lifted.rows() != chi.size())
    throw std::invalid_argument("basis: hat and eigenvector sizes differ");
  return lifted.array().colwise() * chi.array();
}

Eigen::VectorXd solve_pipe_profile(const Mesh& mesh, const Neighborhood& nh,
                                   const Eigen::VectorXd& cell_coeff, double t_pipe) {
  if (nh.pipe_nodes.empty())
    throw std::invalid_argument("pipe basis: neighborhood of vertex " +
                                std::to_string(nh.vertex) + " has no pipe nodes");

  const int n = nh.n_local();
  const int row = mesh.nx + 1;
  const Eigen::MatrixXd K = local_stiffness(mesh, nh, cell_coeff);

  // rim fixed at zero; pipe nodes fixed at t_pipe, winning on overlap
  std::vector<char> fixed(n, 0);
  Eigen::VectorXd value = Eigen::VectorXd::Zero(n);
  for (int g : nh.boundary) fixed[nh.local_node(g, row)] = 1;
  for (int g : nh.pipe_nodes) {
    const int l = nh.local_node(g, row);
    fixed[l] = 1;
    value[l] = t_pipe;
  }

  std::vector<int> free_idx, fixed_idx;
  for (int l = 0; l < n; ++l) (fixed[l] ? fixed_idx : free_idx).push_back(l);
  if (free_idx.empty()) return value;

  Eigen::MatrixXd K_ff = K(free_idx, free_idx);
  Eigen::VectorXd rhs = -K(free_idx, fixed_idx) * value(fixed_idx);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(K_ff);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("pipe basis: singular local system on vertex " +
                             std::to_string(nh.vertex));
  const Eigen::VectorXd x = ldlt.solve(rhs);

  Eigen::VectorXd profile = value;
  for (size_t r = 0; r < free_idx.size(); ++r) profile[free_idx[r]] = x[r];
  return profile;
}

void MultiscaleSpace::validate() const {
  const size_t n = omega_nodes.size();
  if (t_offline.size() != n || p_offline.size() != n)
    throw std::logic_error("space: per-neighborhood block count mismatch");
  if (pipe_omegas.size() != t_pipe.size())
    throw std::logic_error("space: pipe block count mismatch");
  for (size_t i = 0; i < n; ++i) {
    const int nl = static_cast<int>(omega_nodes[i].size());
    if (t_offline[i].rows() != nl)
      throw std::logic_error("space: temperature block size mismatch");
    if (p_offline[i].size() > 0 && p_offline[i].rows() != nl)
      throw std::logic_error("space: pressure block size mismatch");
  }
}

MultiscaleSpace build_offline_space(const Mesh& mesh, const CoarseGrid& coarse,
                                    const NeighborhoodMap& map,
                                    const PartitionOfUnity& pou,
                                    const MaterialField& materials,
                                    double t_pipe, int m) {
  (void)coarse;
  MultiscaleSpace space;
  space.n_nodes = mesh.n_nodes();
  space.m_offline = m;

  // phase change is deliberately absent here: spaces are built once from
  // the unfrozen coefficients and reused for the whole transient run
  const Eigen::VectorXd k_field = materials.cell_conductivity_liquid(mesh);
  Eigen::VectorXd lam_field = materials.cell_mobility_liquid(mesh);
  const double lam_scale = materials.max_mobility();
  const bool flow = lam_scale > 0.0;
  if (flow) lam_field /= lam_scale;

  const int n_omega = static_cast<int>(map.items.size());
  space.omega_nodes.resize(n_omega);
  space.t_offline.resize(n_omega);
  space.p_offline.resize(n_omega);

  for (int i = 0; i < n_omega; ++i) {
    const Neighborhood& nh = map.items[i];
    space.omega_nodes[i] = nh.nodes;
    const Eigen::VectorXd& chi = pou.chi[i];

    const SnapshotSpace snap_T = compute_snapshots(mesh, nh, k_field);
    const SpectralBasis eig_T = solve_spectral(mesh, nh, snap_T, k_field, m);
    space.t_offline[i] = build_offline_basis(eig_T.vectors, chi);
    space.spectral_regularized |= eig_T.regularized;

    if (flow) {
      const SnapshotSpace snap_p = compute_snapshots(mesh, nh, lam_field);
      const SpectralBasis eig_p = solve_spectral(mesh, nh, snap_p, lam_field, m);
      space.p_offline[i] = build_offline_basis(eig_p.vectors, chi);
      space.spectral_regularized |= eig_p.regularized;
    } else {
      space.p_offline[i].resize(0, 0);
    }

    if (nh.has_pipe) {
      Eigen::VectorXd profile = solve_pipe_profile(mesh, nh, k_field, t_pipe);
      Eigen::VectorXd basis = profile.cwiseProduct(chi);
      // a zero profile (t_pipe = 0) would only add a null row to R
      if (basis.norm() > 0.0) {
        space.pipe_omegas.push_back(i);
        space.t_pipe.push_back(std::move(basis));
      }
    }
  }
  space.validate();
  return space;
}

namespace {

SparseMat stack_rows(const MultiscaleSpace& space,
                     const std::vector<Eigen::MatrixXd>& blocks, int m_use,
                     const std::vector<int>& extra_omegas,
                     const std::vector<Eigen::VectorXd>& extra_vectors,
                     const std::vector<OnlineBlock>& online) {
  int rows = 0;
  std::vector<Eigen::Triplet<double>> trip;
  auto append_vector = [&](int omega, const auto& values) {
    const auto& nodes = space.omega_nodes[omega];
    for (size_t k = 0; k < nodes.size(); ++k) {
      const double v = values[static_cast<int>(k)];
      if (v != 0.0) trip.emplace_back(rows, nodes[k], v);
    }
    ++rows;
  };

  for (size_t i = 0; i < blocks.size(); ++i) {
    const Eigen::MatrixXd& b = blocks[i];
    if (m_use > b.cols())
      throw std::invalid_argument("projection: basis count exceeds stored columns");
    for (int j = 0; j < m_use; ++j) append_vector(static_cast<int>(i), b.col(j));
  }
  for (size_t k = 0; k < extra_omegas.size(); ++k)
    append_vector(extra_omegas[k], extra_vectors[k]);
  for (const OnlineBlock& gen : online) {
    if (gen.omegas.size() != gen.vectors.size())
      throw std::invalid_argument("projection: malformed online block");
    for (size_t k = 0; k < gen.omegas.size(); ++k)
      append_vector(gen.omegas[k], gen.vectors[k]);
  }

  SparseMat R(rows, space.n_nodes);
  R.setFromTriplets(trip.begin(), trip.end());
  return R;
}

}  // namespace

SparseMat assemble_projection_T(const MultiscaleSpace& space, int m_use,
                                const std::vector<OnlineBlock>& online) {
  if (m_use < 1 || m_use > space.m_offline)
    throw std::invalid_argument("projection: m_use outside 1..m_offline");
  return stack_rows(space, space.t_offline, m_use, space.pipe_omegas,
                    space.t_pipe, online);
}

SparseMat assemble_projection_p(const MultiscaleSpace& space, int m_use,
                                const std::vector<OnlineBlock>& online) {
  if (m_use < 1 || m_use > space.m_offline)
    throw std::invalid_argument("projection: m_use outside 1..m_offline");
  for (const auto& b : space.p_offline)
    if (b.size() == 0)
      throw std::logic_error("projection: space was built without pressure bases");
  return stack_rows(space, space.p_offline, m_use, {}, {}, online);
}

}  // namespace frost
