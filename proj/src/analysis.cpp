#include "frost/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "frost/fem.hpp"

namespace frost {

namespace {

void check_pair(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                const Mesh& mesh) {
  if (a.size() != mesh.n_nodes() || b.size() != mesh.n_nodes())
    throw std::invalid_argument("error norm: vector size does not match mesh");
}

double gradient_energy(const Mesh& mesh, const Eigen::VectorXd& u) {
  const CellVectors g = cell_gradients(mesh, u);
  return g.array().square().rowwise().sum().sum() * mesh.cell_area();
}

void check_compatible(const Trajectory& fine, const Trajectory& ms) {
  if (fine.nx != ms.nx || fine.ny != ms.ny || fine.lx != ms.lx || fine.ly != ms.ly)
    throw std::invalid_argument("compare: trajectories use different meshes");
  if (fine.n_layers() != ms.n_layers())
    throw std::invalid_argument("compare: trajectories have different layer counts");
}

}  // namespace

double relative_l2(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_ms,
                   const Mesh& mesh) {
  check_pair(u_fine, u_ms, mesh);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_cells());
  const Eigen::VectorXd diff = u_fine - u_ms;
  const double num = diff.dot(apply_weighted_mass(mesh, ones, diff));
  const double den = u_fine.dot(apply_weighted_mass(mesh, ones, u_fine));
  if (den <= 0.0) {
    // identical fields agree perfectly even when the reference is trivial,
    // which covers the shared initial layer of two trajectories
    if (num == 0.0) return 0.0;
    throw std::invalid_argument("error norm: reference field has zero L2 norm");
  }
  return 100.0 * std::sqrt(num / den);
}

double relative_h1(const Eigen::VectorXd& u_fine, const Eigen::VectorXd& u_ms,
                   const Mesh& mesh) {
  check_pair(u_fine, u_ms, mesh);
  const double num = gradient_energy(mesh, u_fine - u_ms);
  const double den = gradient_energy(mesh, u_fine);
  if (den <= 0.0) {
    if (num == 0.0) return 0.0;
    throw std::invalid_argument("error norm: reference field has zero H1 seminorm");
  }
  return 100.0 * std::sqrt(num / den);
}

double frozen_area(const Mesh& mesh, const Eigen::VectorXd& T, double t_star) {
  if (T.size() != mesh.n_nodes())
    throw std::invalid_argument("frozen area: vector size does not match mesh");
  double area = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.cells[c];
    if ((T[t[0]] + T[t[1]] + T[t[2]]) / 3.0 <= t_star) area += mesh.cell_area();
  }
  return area;
}

ErrorSeries build_error_series(const Trajectory& fine, const Trajectory& ms,
                               const Mesh& mesh) {
  check_compatible(fine, ms);
  ErrorSeries series;
  const int n = fine.n_layers();
  series.t_l2.reserve(n);
  series.t_h1.reserve(n);
  series.p_l2.reserve(n);
  series.p_h1.reserve(n);
  for (int l = 0; l < n; ++l) {
    series.t_l2.push_back(relative_l2(fine.T[l], ms.T[l], mesh));
    series.t_h1.push_back(relative_h1(fine.T[l], ms.T[l], mesh));
    const bool have_p = fine.p[l].norm() > 0.0;
    series.p_l2.push_back(have_p ? relative_l2(fine.p[l], ms.p[l], mesh) : 0.0);
    series.p_h1.push_back(have_p ? relative_h1(fine.p[l], ms.p[l], mesh) : 0.0);
  }
  return series;
}

ErrorRow summarize_errors(const Trajectory& fine, const Trajectory& ms,
                          const Mesh& mesh) {
  check_compatible(fine, ms);
  const int last = fine.n_layers() - 1;
  ErrorRow row;
  row.t_l2 = relative_l2(fine.T[last], ms.T[last], mesh);
  row.t_h1 = relative_h1(fine.T[last], ms.T[last], mesh);
  if (fine.p[last].norm() > 0.0) {
    row.p_l2 = relative_l2(fine.p[last], ms.p[last], mesh);
    row.p_h1 = relative_h1(fine.p[last], ms.p[last], mesh);
  }
  return row;
}

}  // namespace frost
