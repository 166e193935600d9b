#pragma once

#include <Eigen/Core>
#include <vector>

#include "frost/mesh.hpp"

namespace frost {

// Per-layer soil constants. Volumetric heat capacities c*rho in J/(m^3 K),
// conductivities in W/(m K), latent term rho_liquid*L in J/m^3, mobility is
// the Darcy coefficient rho_w*kappa/mu.
struct LayerProperties {
  double k_liquid = 0.0;
  double k_frozen = 0.0;
  double c_rho_liquid = 0.0;
  double c_rho_frozen = 0.0;
  double latent_heat = 0.0;
  double mobility = 0.0;
};

// Phase interface smearing: the freeze indicator ramps linearly over the
// band [t_star - delta, t_star + delta]. epsilon scales the mobility of
// frozen ground in the fictitious-domain pressure equation.
struct PhaseParams {
  double t_star = 0.0;
  double delta = 0.5;
  double epsilon = 1.0e-3;
};

// Liquid fraction indicator: 0 below the band, 1 above, linear inside.
double phase_fraction(double T, const PhaseParams& params);

// Derivative of the indicator; 1/(2 delta) strictly inside the band,
// 0 outside and at the kinks.
double phase_fraction_slope(double T, const PhaseParams& params);

// Effective volumetric heat capacity including the latent-heat spike.
double capacity(double T, const LayerProperties& layer, const PhaseParams& params);

// Thermal conductivity blended across the band.
double conductivity(double T, const LayerProperties& layer, const PhaseParams& params);

// Darcy mobility with the fictitious-domain penalty: frozen cells
// (T <= t_star) keep epsilon times their liquid mobility.
double mobility_eps(double T, const LayerProperties& layer, const PhaseParams& params);

// Soil column bound to a mesh: per-cell layer ids plus the layer table.
// Coefficients are evaluated per cell from the centroid temperature, taken
// as the mean of the three vertex values.
struct MaterialField {
  std::vector<int> cell_layer;
  std::vector<LayerProperties> layers;
  PhaseParams phase;

  void validate(int n_cells) const;

  double cell_temperature(const Mesh& mesh, const Eigen::VectorXd& T, int c) const;

  Eigen::VectorXd cell_capacity(const Mesh& mesh, const Eigen::VectorXd& T) const;
  Eigen::VectorXd cell_conductivity(const Mesh& mesh, const Eigen::VectorXd& T) const;
  Eigen::VectorXd cell_mobility(const Mesh& mesh, const Eigen::VectorXd& T) const;

  // Unfrozen-state fields used to build the model reduction spaces.
  Eigen::VectorXd cell_conductivity_liquid(const Mesh& mesh) const;
  Eigen::VectorXd cell_mobility_liquid(const Mesh& mesh) const;

  double max_mobility() const;
};

// The three soil layers of the reference problem, top to bottom stripes.
std::vector<LayerProperties> reference_layers();

}  // namespace frost
