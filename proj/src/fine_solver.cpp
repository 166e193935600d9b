#include "frost/fine_solver.hpp"

#include <stdexcept>
#include <string>

namespace frost {

void TimeConfig::validate() const {
  if (n_steps < 1) throw std::invalid_argument("time: n_steps must be >= 1");
  if (!(t_max > 0.0)) throw std::invalid_argument("time: t_max must be positive");
}

bool StepContext::pressure_enabled() const {
  // without boundary values the pressure problem is pure Neumann and singular
  return materials->max_mobility() > 0.0 && !pressure_bc.empty();
}

void StepContext::prepare() {
  if (!mesh || !materials) throw std::invalid_argument("context: mesh and materials required");
  materials->validate(mesh->n_cells());
  for (const auto& [node, val] : temperature_bc) {
    (void)val;
    if (node < 0 || node >= mesh->n_nodes())
      throw std::invalid_argument("context: temperature constraint outside mesh");
  }
  for (const auto& [node, val] : pressure_bc) {
    (void)val;
    if (node < 0 || node >= mesh->n_nodes())
      throw std::invalid_argument("context: pressure constraint outside mesh");
  }
  if (heat_source.size() != 0 && heat_source.size() != mesh->n_cells())
    throw std::invalid_argument("context: heat source must be per-cell");
  if (fluid_source.size() != 0 && fluid_source.size() != mesh->n_cells())
    throw std::invalid_argument("context: fluid source must be per-cell");
  pressure_scale = pressure_enabled() ? materials->max_mobility() : 1.0;
}

LinearSystem assemble_pressure_system(const StepContext& ctx,
                                      const Eigen::VectorXd& T_state) {
  const Mesh& mesh = *ctx.mesh;
  Eigen::VectorXd mob = ctx.materials->cell_mobility(mesh, T_state) / ctx.pressure_scale;

  LinearSystem sys;
  sys.matrix = assemble_stiffness(mesh, mob);
  if (ctx.fluid_source.size() > 0)
    sys.rhs = assemble_load(mesh, ctx.fluid_source / ctx.pressure_scale);
  else
    sys.rhs = Eigen::VectorXd::Zero(mesh.n_nodes());
  sys.constraints = ctx.pressure_bc;
  return apply_dirichlet(std::move(sys));
}

CellVectors darcy_velocity(const StepContext& ctx, const Eigen::VectorXd& T_state,
                           const Eigen::VectorXd& p) {
  const Mesh& mesh = *ctx.mesh;
  const Eigen::VectorXd mob = ctx.materials->cell_mobility(mesh, T_state);
  CellVectors u = cell_gradients(mesh, p);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double f = ctx.velocity_sign * mob[c];
    u(c, 0) *= f;
    u(c, 1) *= f;
  }
  return u;
}

LinearSystem assemble_temperature_system(const StepContext& ctx,
                                         const Eigen::VectorXd& T_prev,
                                         const CellVectors& velocity, double tau) {
  const Mesh& mesh = *ctx.mesh;
  const Eigen::VectorXd cap = ctx.materials->cell_capacity(mesh, T_prev);
  const Eigen::VectorXd k = ctx.materials->cell_conductivity(mesh, T_prev);

  LinearSystem sys;
  // Row-sum lumped capacity: the time term contributes a positive diagonal,
  // so the system stays an M-matrix on the right-triangle mesh and pure
  // cooling cannot overshoot the initial state even across the latent band.
  // The lumped node weight cap_c |c|/3 is the load vector of the capacity.
  const Eigen::VectorXd lump = assemble_load(mesh, cap);
  SparseMat D(mesh.n_nodes(), mesh.n_nodes());
  D.reserve(Eigen::VectorXi::Constant(mesh.n_nodes(), 1));
  for (int g = 0; g < mesh.n_nodes(); ++g) D.insert(g, g) = lump[g] / tau;
  D.makeCompressed();
  sys.matrix = assemble_stiffness(mesh, k) + D;

  sys.rhs = lump.cwiseProduct(T_prev) / tau;
  if (ctx.heat_source.size() > 0) sys.rhs += assemble_load(mesh, ctx.heat_source);
  if (velocity.rows() > 0)
    sys.rhs -= assemble_convection_rhs(mesh, cap, velocity, T_prev);

  sys.constraints = ctx.temperature_bc;
  return apply_dirichlet(std::move(sys));
}

Eigen::VectorXd pressure_step(const StepContext& ctx, const Eigen::VectorXd& T_state) {
  LinearSystem sys = assemble_pressure_system(ctx, T_state);
  return solve_spd(sys.matrix, sys.rhs);
}

Eigen::VectorXd temperature_step(const StepContext& ctx, const Eigen::VectorXd& T_prev,
                                 const CellVectors& velocity, double tau) {
  LinearSystem sys = assemble_temperature_system(ctx, T_prev, velocity, tau);
  return solve_spd(sys.matrix, sys.rhs);
}

Trajectory run_fine(const StepContext& ctx, const TimeConfig& time,
                    const Eigen::VectorXd& T_initial) {
  time.validate();
  const Mesh& mesh = *ctx.mesh;
  if (T_initial.size() != mesh.n_nodes())
    throw std::invalid_argument("run: initial temperature size mismatch");

  Trajectory traj;
  traj.nx = mesh.nx;
  traj.ny = mesh.ny;
  traj.lx = mesh.lx;
  traj.ly = mesh.ly;
  traj.T.reserve(time.n_steps + 1);
  traj.p.reserve(time.n_steps + 1);

  const bool flow = ctx.pressure_enabled();
  const double tau = time.tau();

  Eigen::VectorXd T = T_initial;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(mesh.n_nodes());
  if (flow) p = pressure_step(ctx, T);
  traj.T.push_back(T);
  traj.p.push_back(p);

  for (int n = 0; n < time.n_steps; ++n) {
    try {
      // the t=0 solve already used lambda_eps(T^0); skip the duplicate
      Eigen::VectorXd p_next = (flow && n > 0) ? pressure_step(ctx, T) : p;
      CellVectors u(0, 2);
      if (flow)
        u = darcy_velocity(ctx, T, ctx.use_lagged_pressure ? p : p_next);
      T = temperature_step(ctx, T, u, tau);
      p = p_next;
    } catch (const std::exception& e) {
      throw std::runtime_error("layer " + std::to_string(n + 1) + ": " + e.what());
    }
    traj.T.push_back(T);
    traj.p.push_back(p);
  }
  return traj;
}

}  // namespace frost
