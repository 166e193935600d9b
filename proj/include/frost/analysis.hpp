#pragma once

#include <vector>

#include "frost/fine_solver.hpp"
#include "frost/materials.hpp"

namespace frost {

// Relative errors in percent: L2 weighted by the consistent mass matrix,
// H1 the unit-coefficient gradient seminorm.
double relative_l2(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_ms,
                   const Mesh& mesh);
double relative_h1(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_ms,
                   const Mesh& mesh);

// Total area of cells whose centroid temperature is at or below t_star.
double frozen_area(const Mesh& mesh, const Eigen::VectorXd& T, double t_star);

// Final-layer summary of one reduced run against the fine reference.
struct ErrorRow {
  int m_offline = 0;
  int n_online = 0;
  int dof_T = 0;
  int dof_p = 0;
  double t_l2 = 0.0;
  double t_h1 = 0.0;
  double p_l2 = 0.0;
  double p_h1 = 0.0;
};

// Per-layer error history of one run (entry 0 is the initial layer).
struct ErrorSeries {
  std::vector<double> t_l2, t_h1, p_l2, p_h1;
};

// Both throw if the trajectories disagree on mesh or layer count.
ErrorSeries build_error_series(const Trajectory& fine, const Trajectory& ms,
                               const Mesh& mesh);
ErrorRow summarize_errors(const Trajectory& fine, const Trajectory& ms,
                          const Mesh& mesh);

}  // namespace frost
