#pragma once

#include <vector>

#include "frost/fine_solver.hpp"
#include "frost/msfem_offline.hpp"

namespace frost {

struct EnrichmentSchedule {
  int period = 5;      // enrich on every period-th time layer
  int iterations = 1;  // online solves per enrichment event
  bool accumulate = false;  // keep online blocks from earlier events

  void validate() const;
};

struct CoarseSolution {
  Eigen::VectorXd coarse;
  Eigen::VectorXd fine;  // reconstruction R^T coarse
};

// Galerkin solve of a constrained fine system in the row space of R.
CoarseSolution project_and_solve(const SparseMat& R, const LinearSystem& sys);

// Algebraic residual of a fine-grid candidate solution.
Eigen::VectorXd fine_residual(const LinearSystem& sys, const Eigen::VectorXd& u);

// One online generation: per neighborhood, solve the local correction
// problem on the interior nodes with the full current-layer operator,
// multiply by the hat, normalize. Neighborhoods whose correction is at
// noise level contribute no row.
OnlineBlock build_online_generation(const Mesh& mesh, const NeighborhoodMap& map,
                                    const PartitionOfUnity& pou,
                                    const LinearSystem& sys,
                                    const Eigen::VectorXd& u_ms);

struct EnrichmentEvent {
  int layer = 0;
  // residual norms: entry 0 after the offline-space solve, entry l after
  // the l-th online re-solve
  std::vector<double> residual_T;
  std::vector<double> residual_p;
  // pre-enrichment reconstructions at this layer, for error-series analysis
  Eigen::VectorXd T_pre;
  Eigen::VectorXd p_pre;
};

struct MultiscaleResult {
  Trajectory traj;
  std::vector<EnrichmentEvent> events;
  int dof_T = 0;  // projection row count at the end of the run
  int dof_p = 0;
};

// Online generalized multiscale run. Every layer projects the same
// constrained systems the fine solver uses onto the current reduced space.
// On enrichment layers the solve is repeated: first in the offline space
// (or the accumulated space when schedule.accumulate is set), then
// schedule.iterations times in the space enriched with fresh residual
// corrections, which are carried until the next event.
MultiscaleResult run_multiscale(const StepContext& ctx, const TimeConfig& time,
                                const NeighborhoodMap& map,
                                const PartitionOfUnity& pou,
                                const MultiscaleSpace& space, int m_use,
                                const EnrichmentSchedule& schedule,
                                const Eigen::VectorXd& T_initial);

}  // namespace frost
