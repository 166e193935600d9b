#pragma once

#include <utility>
#include <vector>

#include "frost/fem.hpp"
#include "frost/materials.hpp"
#include "frost/mesh.hpp"

namespace frost {

struct TimeConfig {
  double t_max = 0.0;  // seconds
  int n_steps = 1;

  double tau() const { return t_max / n_steps; }
  void validate() const;
};

struct SystemState {
  int t_index = 0;
  Eigen::VectorXd T;
  Eigen::VectorXd p;
  CellVectors u;
};

// Fixed problem data shared by every time layer. The same assembly feeds
// the fine solver and the coarse projected solver, so the two discretize
// identically by construction.
struct StepContext {
  const Mesh* mesh = nullptr;
  const MaterialField* materials = nullptr;

  std::vector<std::pair<int, double>> temperature_bc;  // freezing pipes etc.
  std::vector<std::pair<int, double>> pressure_bc;

  // Darcy velocity u = velocity_sign * lambda_eps * grad p. The physical
  // choice is -1; +1 reproduces the variational form taken literally.
  double velocity_sign = -1.0;
  // Convect with the previous layer's pressure instead of the fresh one.
  bool use_lagged_pressure = false;

  Eigen::VectorXd heat_source;   // per-cell Q, empty means zero
  Eigen::VectorXd fluid_source;  // per-cell F, empty means zero

  // The pressure equation is assembled with mobility divided by this scale
  // so its entries sit near unity next to the Dirichlet identity rows.
  // The solution is invariant; velocities use the physical mobility.
  double pressure_scale = 1.0;

  // True when any layer can conduct fluid; otherwise pressure is skipped
  // and the run degenerates to pure heat conduction.
  bool pressure_enabled() const;

  void prepare();  // validates fields, fixes pressure_scale
};

// Constrained elliptic pressure system at the given temperature state.
LinearSystem assemble_pressure_system(const StepContext& ctx,
                                      const Eigen::VectorXd& T_state);

// Per-cell Darcy velocity from the physical frozen-aware mobility.
CellVectors darcy_velocity(const StepContext& ctx, const Eigen::VectorXd& T_state,
                           const Eigen::VectorXd& p);

// Constrained implicit temperature system: (S/tau + A) T_next = S/tau T_prev
// + Q - convection, with capacity, conductivity and the latent-heat spike
// evaluated from T_prev. The capacity operator S is row-sum lumped; with the
// stiffness an M-matrix this keeps the step monotone, so pure cooling never
// overshoots the initial state even across the latent-heat band.
LinearSystem assemble_temperature_system(const StepContext& ctx,
                                         const Eigen::VectorXd& T_prev,
                                         const CellVectors& velocity, double tau);

Eigen::VectorXd pressure_step(const StepContext& ctx, const Eigen::VectorXd& T_state);
Eigen::VectorXd temperature_step(const StepContext& ctx, const Eigen::VectorXd& T_prev,
                                 const CellVectors& velocity, double tau);

// Nodal fields for every layer, layer 0 being the initial state.
struct Trajectory {
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;
  std::vector<Eigen::VectorXd> T;
  std::vector<Eigen::VectorXd> p;

  int n_layers() const { return static_cast<int>(T.size()); }
};

Trajectory run_fine(const StepContext& ctx, const TimeConfig& time,
                    const Eigen::VectorXd& T_initial);

}  // namespace frost
