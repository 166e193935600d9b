#include "frost/materials.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace frost {

double phase_fraction(double T, const PhaseParams& params) {
  const double lo = params.t_star - params.delta;
  const double hi = params.t_star + params.delta;
  if (T <= lo) return 0.0;
  if (T >= hi) return 1.0;
  return (T - lo) / (2.0 * params.delta);
}

double phase_fraction_slope(double T, const PhaseParams& params) {
  const double lo = params.t_star - params.delta;
  const double hi = params.t_star + params.delta;
  if (T <= lo || T >= hi) return 0.0;
  return 1.0 / (2.0 * params.delta);
}

double capacity(double T, const LayerProperties& layer, const PhaseParams& params) {
  const double phi = phase_fraction(T, params);
  const double alpha = layer.c_rho_frozen + phi * (layer.c_rho_liquid - layer.c_rho_frozen);
  return alpha + layer.latent_heat * phase_fraction_slope(T, params);
}

double conductivity(double T, const LayerProperties& layer, const PhaseParams& params) {
  const double phi = phase_fraction(T, params);
  return layer.k_frozen + phi * (layer.k_liquid - layer.k_frozen);
}

double mobility_eps(double T, const LayerProperties& layer, const PhaseParams& params) {
  return T > params.t_star ? layer.mobility : params.epsilon * layer.mobility;
}

void MaterialField::validate(int n_cells) const {
  if (static_cast<int>(cell_layer.size()) != n_cells)
    throw std::invalid_argument("materials: raster size does not match mesh");
  if (layers.empty()) throw std::invalid_argument("materials: no layers defined");
  for (int c = 0; c < n_cells; ++c) {
    if (cell_layer[c] < 0 || cell_layer[c] >= static_cast<int>(layers.size()))
      throw std::invalid_argument("materials: cell " + std::to_string(c) +
                                  " references undefined layer " +
                                  std::to_string(cell_layer[c]));
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    const auto& lay = layers[l];
    if (!(lay.k_liquid > 0.0) || !(lay.k_frozen > 0.0) ||
        !(lay.c_rho_liquid > 0.0) || !(lay.c_rho_frozen > 0.0))
      throw std::invalid_argument("materials: layer " + std::to_string(l) +
                                  " needs positive conductivity and capacity");
    if (lay.latent_heat < 0.0 || lay.mobility < 0.0)
      throw std::invalid_argument("materials: layer " + std::to_string(l) +
                                  " has negative latent heat or mobility");
  }
  if (!(phase.delta > 0.0))
    throw std::invalid_argument("materials: phase band half-width must be positive");
  if (!(phase.epsilon > 0.0) || phase.epsilon > 1.0)
    throw std::invalid_argument("materials: epsilon must lie in (0, 1]");
}

double MaterialField::cell_temperature(const Mesh& mesh, const Eigen::VectorXd& T,
                                       int c) const {
  const auto& t = mesh.cells[c];
  return (T[t[0]] + T[t[1]] + T[t[2]]) / 3.0;
}

Eigen::VectorXd MaterialField::cell_capacity(const Mesh& mesh,
                                             const Eigen::VectorXd& T) const {
  Eigen::VectorXd out(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    out[c] = capacity(cell_temperature(mesh, T, c), layers[cell_layer[c]], phase);
  return out;
}

Eigen::VectorXd MaterialField::cell_conductivity(const Mesh& mesh,
                                                 const Eigen::VectorXd& T) const {
  Eigen::VectorXd out(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    out[c] = conductivity(cell_temperature(mesh, T, c), layers[cell_layer[c]], phase);
  return out;
}

Eigen::VectorXd MaterialField::cell_mobility(const Mesh& mesh,
                                             const Eigen::VectorXd& T) const {
  Eigen::VectorXd out(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c)
    out[c] = mobility_eps(cell_temperature(mesh, T, c), layers[cell_layer[c]], phase);
  return out;
}

Eigen::VectorXd MaterialField::cell_conductivity_liquid(const Mesh& mesh) const {
  Eigen::VectorXd out(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) out[c] = layers[cell_layer[c]].k_liquid;
  return out;
}

Eigen::VectorXd MaterialField::cell_mobility_liquid(const Mesh& mesh) const {
  Eigen::VectorXd out(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) out[c] = layers[cell_layer[c]].mobility;
  return out;
}

double MaterialField::max_mobility() const {
  double m = 0.0;
  for (const auto& lay : layers) m = std::max(m, lay.mobility);
  return m;
}

std::vector<LayerProperties> reference_layers() {
  // k_liquid, k_frozen [W/(m K)]; c_rho [J/(m^3 K)]; latent [J/m^3];
  // mobility [rho_w kappa / mu].
  return {
      {1.37, 1.72, 2.397e6, 1.886e6, 75.33e6, 1.0e-13},
      {2.67, 3.37, 2.13e6, 2.09e6, 64.769e6, 10.0e-13},
      {1.40, 1.56, 2.96e6, 2.70e6, 130.544e6, 5.0e-13},
  };
}

}  // namespace frost
