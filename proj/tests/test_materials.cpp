#include "frost/materials.hpp"

#include "doctest.h"
#include "frost/mesh.hpp"

using namespace frost;

namespace {

MaterialField uniform_field(const Mesh& mesh, const LayerProperties& lay,
                            const PhaseParams& phase) {
  MaterialField f;
  f.cell_layer.assign(mesh.n_cells(), 0);
  f.layers = {lay};
  f.phase = phase;
  return f;
}

}  // namespace

TEST_CASE("phase fraction ramps linearly across the band") {
  const PhaseParams ph{0.0, 0.5, 1e-3};
  CHECK(phase_fraction(-1.0, ph) == 0.0);
  CHECK(phase_fraction(-0.5, ph) == 0.0);
  CHECK(phase_fraction(0.0, ph) == doctest::Approx(0.5));
  CHECK(phase_fraction(0.25, ph) == doctest::Approx(0.75));
  CHECK(phase_fraction(0.5, ph) == 1.0);
  CHECK(phase_fraction(2.0, ph) == 1.0);
}

TEST_CASE("phase slope is flat outside the band and at the kinks") {
  const PhaseParams ph{0.0, 0.5, 1e-3};
  CHECK(phase_fraction_slope(-0.6, ph) == 0.0);
  CHECK(phase_fraction_slope(-0.5, ph) == 0.0);
  CHECK(phase_fraction_slope(0.0, ph) == doctest::Approx(1.0));
  CHECK(phase_fraction_slope(0.49, ph) == doctest::Approx(1.0));
  CHECK(phase_fraction_slope(0.5, ph) == 0.0);
}

TEST_CASE("capacity carries the latent heat spike inside the band") {
  const auto layers = reference_layers();
  const PhaseParams ph{0.0, 0.5, 1e-3};

  // frozen side, outside the band
  CHECK(capacity(-3.0, layers[0], ph) == doctest::Approx(1.886e6));
  // thawed side
  CHECK(capacity(2.0, layers[0], ph) == doctest::Approx(2.397e6));
  // band center: average capacity plus latent mass divided by band width
  const double expect = 0.5 * (1.886e6 + 2.397e6) + 75.33e6;
  CHECK(capacity(0.0, layers[0], ph) == doctest::Approx(expect));
}

TEST_CASE("conductivity interpolates between phase values") {
  const auto layers = reference_layers();
  const PhaseParams ph{0.0, 0.5, 1e-3};
  CHECK(conductivity(-2.0, layers[1], ph) == doctest::Approx(3.37));
  CHECK(conductivity(3.0, layers[1], ph) == doctest::Approx(2.67));
  CHECK(conductivity(0.0, layers[1], ph) == doctest::Approx(3.02));
}

TEST_CASE("mobility collapses by epsilon in the frozen region") {
  const auto layers = reference_layers();
  const PhaseParams ph{0.0, 0.5, 1e-3};
  CHECK(mobility_eps(1.0, layers[0], ph) == doctest::Approx(1e-13));
  // the freezing point itself counts as frozen
  CHECK(mobility_eps(0.0, layers[0], ph) == doctest::Approx(1e-16));
  CHECK(mobility_eps(-5.0, layers[0], ph) == doctest::Approx(1e-16));
}

TEST_CASE("cell values average the three vertices") {
  const Mesh mesh = build_fine_mesh(2, 2, 1.0, 1.0);
  const auto layers = reference_layers();
  const MaterialField f = uniform_field(mesh, layers[0], {0.0, 0.5, 1e-3});

  Eigen::VectorXd T(mesh.n_nodes());
  for (int g = 0; g < mesh.n_nodes(); ++g) T[g] = mesh.nodes[g].x;

  const auto& c = mesh.cells[0];
  const double mean =
      (mesh.nodes[c[0]].x + mesh.nodes[c[1]].x + mesh.nodes[c[2]].x) / 3.0;
  CHECK(f.cell_temperature(mesh, T, 0) == doctest::Approx(mean));

  const Eigen::VectorXd k = f.cell_conductivity(mesh, T);
  const Eigen::VectorXd cap = f.cell_capacity(mesh, T);
  const Eigen::VectorXd mob = f.cell_mobility(mesh, T);
  REQUIRE(k.size() == mesh.n_cells());
  CHECK(k[0] == doctest::Approx(conductivity(mean, layers[0], f.phase)));
  CHECK(cap[0] == doctest::Approx(capacity(mean, layers[0], f.phase)));
  CHECK(mob[0] == doctest::Approx(mobility_eps(mean, layers[0], f.phase)));
  CHECK(f.cell_conductivity_liquid(mesh)[0] == doctest::Approx(layers[0].k_liquid));
  CHECK(f.cell_mobility_liquid(mesh)[0] == doctest::Approx(layers[0].mobility));
}

TEST_CASE("reference table and field validation") {
  const auto layers = reference_layers();
  REQUIRE(layers.size() == 3);
  CHECK(layers[2].latent_heat == doctest::Approx(130.544e6));
  CHECK(layers[1].mobility == doctest::Approx(10e-13));

  const Mesh mesh = build_fine_mesh(2, 2, 1.0, 1.0);
  MaterialField f = uniform_field(mesh, layers[0], {0.0, 0.5, 1e-3});
  CHECK_NOTHROW(f.validate(mesh.n_cells()));
  CHECK(f.max_mobility() == doctest::Approx(1e-13));

  MaterialField bad = f;
  bad.phase.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(mesh.n_cells()), std::invalid_argument);
  bad = f;
  bad.cell_layer[0] = 7;
  CHECK_THROWS_AS(bad.validate(mesh.n_cells()), std::invalid_argument);
  bad = f;
  bad.layers[0].k_frozen = 0.0;
  CHECK_THROWS_AS(bad.validate(mesh.n_cells()), std::invalid_argument);
}
