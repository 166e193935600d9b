#include "frost/msfem_online.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <string>

namespace frost {

void EnrichmentSchedule::validate() const {
  if (period < 1) throw std::invalid_argument("schedule: period must be >= 1");
  if (iterations < 0) throw std::invalid_argument("schedule: iterations must be >= 0");
}

CoarseSolution project_and_solve(const SparseMat& R, const LinearSystem& sys) {
  if (R.cols() != sys.matrix.rows())
    throw std::invalid_argument("projection: operator width does not match system");
  const SparseMat Rt = R.transpose();
  const SparseMat coarse_matrix = R * sys.matrix * Rt;
  const Eigen::VectorXd coarse_rhs = R * sys.rhs;

  Eigen::SimplicialLDLT<SparseMat> ldlt(coarse_matrix);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error(
        "projection: coarse matrix factorization failed; reduced space is "
        "rank deficient (" +
        std::to_string(R.rows()) + " rows)");

  CoarseSolution sol;
  sol.coarse = ldlt.solve(coarse_rhs);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("projection: coarse solve failed");
  sol.fine = Rt * sol.coarse;
  return sol;
}

Eigen::VectorXd fine_residual(const LinearSystem& sys, const Eigen::VectorXd& u) {
  return sys.rhs - sys.matrix * u;
}

OnlineBlock build_online_generation(const Mesh& mesh, const NeighborhoodMap& map,
                                    const PartitionOfUnity& pou,
                                    const LinearSystem& sys,
                                    const Eigen::VectorXd& u_ms) {
  const Eigen::VectorXd r = fine_residual(sys, u_ms);
  const double skip_scale = 1e-12 * (1.0 + r.norm());
  const int row = mesh.nx + 1;

  OnlineBlock gen;
  std::vector<int> local_of_global(mesh.n_nodes(), -1);

  for (size_t i = 0; i < map.items.size(); ++i) {
    const Neighborhood& nh = map.items[i];
    const int ni = static_cast<int>(nh.interior.size());
    if (ni == 0) continue;

    for (int k = 0; k < ni; ++k) local_of_global[nh.interior[k]] = k;

    // dense interior block of the constrained fine operator
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(ni, ni);
    Eigen::VectorXd rhs(ni);
    for (int k = 0; k < ni; ++k) {
      const int g = nh.interior[k];
      rhs[k] = r[g];
      for (SparseMat::InnerIterator it(sys.matrix, g); it; ++it) {
        const int lr = local_of_global[it.row()];
        if (lr >= 0) B(lr, k) = it.value();
      }
    }
    for (int k = 0; k < ni; ++k) local_of_global[nh.interior[k]] = -1;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(B);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("online: local solve failed on vertex " +
                               std::to_string(nh.vertex));
    const Eigen::VectorXd phi = ldlt.solve(rhs);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(nh.n_local());
    for (int k = 0; k < ni; ++k) {
      const int l = nh.local_node(nh.interior[k], row);
      theta[l] = phi[k] * pou.chi[i][l];
    }
    const double norm = theta.norm();
    if (norm <= skip_scale) continue;  // correction at noise level
    theta /= norm;

    gen.omegas.push_back(static_cast<int>(i));
    gen.vectors.push_back(std::move(theta));
  }
  return gen;
}

namespace {

struct FieldSpace {
  SparseMat offline;                 // projection without online rows
  std::vector<OnlineBlock> online;   // carried generations
  SparseMat current;                 // offline + online rows

  void rebuild(const MultiscaleSpace& space, int m_use, bool temperature) {
    current = temperature ? assemble_projection_T(space, m_use, online)
                          : assemble_projection_p(space, m_use, online);
  }
};

}  // namespace

MultiscaleResult run_multiscale(const StepContext& ctx, const TimeConfig& time,
                                const NeighborhoodMap& map,
                                const PartitionOfUnity& pou,
                                const MultiscaleSpace& space, int m_use,
                                const EnrichmentSchedule& schedule,
                                const Eigen::VectorXd& T_initial) {
  time.validate();
  schedule.validate();
  space.validate();
  const Mesh& mesh = *ctx.mesh;
  if (T_initial.size() != mesh.n_nodes())
    throw std::invalid_argument("run: initial temperature size mismatch");

  const bool flow = ctx.pressure_enabled();
  const double tau = time.tau();

  FieldSpace sp_T, sp_p;
  sp_T.offline = assemble_projection_T(space, m_use, {});
  sp_T.current = sp_T.offline;
  if (flow) {
    sp_p.offline = assemble_projection_p(space, m_use, {});
    sp_p.current = sp_p.offline;
  }

  MultiscaleResult result;
  result.traj.nx = mesh.nx;
  result.traj.ny = mesh.ny;
  result.traj.lx = mesh.lx;
  result.traj.ly = mesh.ly;

  Eigen::VectorXd T_ms = T_initial;
  Eigen::VectorXd p_ms = Eigen::VectorXd::Zero(mesh.n_nodes());
  if (flow) {
    const LinearSystem sys_p0 = assemble_pressure_system(ctx, T_ms);
    p_ms = project_and_solve(sp_p.current, sys_p0).fine;
  }
  result.traj.T.push_back(T_ms);
  result.traj.p.push_back(p_ms);

  for (int n = 1; n <= time.n_steps; ++n) {
    try {
      const Eigen::VectorXd T_prev = T_ms;
      const Eigen::VectorXd p_prev = p_ms;
      const bool event = schedule.iterations > 0 && (n % schedule.period == 0);

      if (event && !schedule.accumulate) {
        // replace mode: enrichment layers solve in the offline space
        // first, then append fresh online generations
        sp_T.online.clear();
        sp_T.current = sp_T.offline;
        if (flow) {
          sp_p.online.clear();
          sp_p.current = sp_p.offline;
        }
      }

      LinearSystem sys_p;
      if (flow) {
        sys_p = assemble_pressure_system(ctx, T_prev);
        p_ms = project_and_solve(sp_p.current, sys_p).fine;
      }
      CellVectors u(0, 2);
      if (flow)
        u = darcy_velocity(ctx, T_prev, ctx.use_lagged_pressure ? p_prev : p_ms);
      LinearSystem sys_T = assemble_temperature_system(ctx, T_prev, u, tau);
      T_ms = project_and_solve(sp_T.current, sys_T).fine;

      if (event) {
        EnrichmentEvent ev;
        ev.layer = n;
        ev.T_pre = T_ms;
        ev.p_pre = p_ms;
        ev.residual_T.push_back(fine_residual(sys_T, T_ms).norm());
        if (flow) ev.residual_p.push_back(fine_residual(sys_p, p_ms).norm());

        for (int l = 1; l <= schedule.iterations; ++l) {
          if (flow) {
            sp_p.online.push_back(
                build_online_generation(mesh, map, pou, sys_p, p_ms));
            sp_p.rebuild(space, m_use, false);
            p_ms = project_and_solve(sp_p.current, sys_p).fine;
            if (!ctx.use_lagged_pressure) {
              u = darcy_velocity(ctx, T_prev, p_ms);
              sys_T = assemble_temperature_system(ctx, T_prev, u, tau);
            }
          }
          sp_T.online.push_back(
              build_online_generation(mesh, map, pou, sys_T, T_ms));
          sp_T.rebuild(space, m_use, true);
          T_ms = project_and_solve(sp_T.current, sys_T).fine;

          ev.residual_T.push_back(fine_residual(sys_T, T_ms).norm());
          if (flow) ev.residual_p.push_back(fine_residual(sys_p, p_ms).norm());
        }
        result.events.push_back(std::move(ev));
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("layer " + std::to_string(n) + ": " + e.what());
    }
    result.traj.T.push_back(T_ms);
    result.traj.p.push_back(p_ms);
  }

  result.dof_T = static_cast<int>(sp_T.current.rows());
  result.dof_p = flow ? static_cast<int>(sp_p.current.rows()) : 0;
  return result;
}

}  // namespace frost
