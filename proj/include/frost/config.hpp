#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "frost/fine_solver.hpp"
#include "frost/materials.hpp"
#include "frost/mesh.hpp"
#include "frost/msfem_offline.hpp"

namespace frost {

// Runtime configuration. Defaults reproduce the reference setup: a
// 12 x 6 m strip on a 120 x 120 fine grid with a 24 x 12 coarse grid,
// a layered reservoir of thin soil stripes, 20 freezing pipes at -30 C,
// initial ground at +2 C, 25 days in 80 implicit steps.
struct SimulationConfig {
  // geometry
  int nx = 120, ny = 120;
  double lx = 12.0, ly = 6.0;
  int coarse_nx = 24, coarse_ny = 12;
  std::vector<Vec2> pipe_centers;  // empty selects the standard two rows
  double pipe_radius = 0.0;        // 0 selects one fine-cell diagonal
  // half-metre soil layers cycling through the three reference materials
  std::vector<double> stripe_bounds{0.5, 1.0, 1.5, 2.0, 2.5, 3.0,
                                    3.5, 4.0, 4.5, 5.0, 5.5};
  std::vector<int> stripe_layers{0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2};

  // materials
  PhaseParams phase{0.0, 0.5, 1.0e-3};
  std::vector<LayerProperties> layers = reference_layers();

  // time
  double t_max_days = 25.0;
  int n_steps = 80;

  // boundary: 1 drives pressure left to right, 2 top to bottom, 0 disables
  // the Dirichlet drive (pure heat conduction)
  int test_case = 1;
  double t_pipe = -30.0;
  double t_initial = 2.0;

  // reduced-order solver
  int offline_bases = 4;
  int online_bases = 1;
  int period = 5;
  bool accumulate_online = false;
  bool use_lagged_pressure = false;
  double velocity_sign = -1.0;

  // output
  std::string output_dir = "out";
  std::vector<int> snapshot_layers;

  void validate() const;
  double t_max_seconds() const { return t_max_days * 86400.0; }

  // Hash of every input that shapes the offline spaces; stored in the
  // basis cache and checked on load.
  std::uint64_t offline_fingerprint() const;
};

// Line-based `key = value` text with `[section]` headers and '#' comments.
// Unknown keys and malformed values are reported with their line number.
SimulationConfig parse_config_text(const std::string& text);
SimulationConfig parse_config(const std::string& path);

// Geometry and problem data assembled from a validated config. StepContext
// holds pointers into this object, so it is pinned in place.
struct Problem {
  Mesh mesh;
  CoarseGrid coarse;
  NeighborhoodMap neighborhoods;
  PartitionOfUnity pou;
  PipeLayout pipes;
  MaterialField materials;
  TimeConfig time;
  SimulationConfig config;

  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;
  Problem() = default;

  StepContext context() const;
  Eigen::VectorXd initial_temperature() const;
  MultiscaleSpace offline_space(int m) const;
};

// Builder; the result is heap-pinned because StepContext points into it.
std::unique_ptr<Problem> build_problem(const SimulationConfig& config);

}  // namespace frost
