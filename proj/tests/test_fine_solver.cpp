#include "frost/fine_solver.hpp"

#include <cmath>

#include "doctest.h"
#include "frost/materials.hpp"
#include "frost/mesh.hpp"

using namespace frost;

namespace {

// one layer everywhere, parameters chosen per test
MaterialField uniform(const Mesh& mesh, LayerProperties lay, PhaseParams ph) {
  MaterialField f;
  f.cell_layer.assign(mesh.n_cells(), 0);
  f.layers = {lay};
  f.phase = ph;
  return f;
}

}  // namespace

TEST_CASE("pressure solve reproduces the linear profile exactly") {
  const Mesh mesh = build_fine_mesh(10, 5, 12.0, 6.0);
  const LayerProperties lay{1.0, 1.0, 1.0, 1.0, 0.0, 5e-13};
  const MaterialField mats = uniform(mesh, lay, {0.0, 0.5, 1e-3});

  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &mats;
  for (int g : mesh.side_nodes(0)) ctx.pressure_bc.emplace_back(g, 1.0);
  for (int g : mesh.side_nodes(1)) ctx.pressure_bc.emplace_back(g, 0.0);
  ctx.prepare();
  CHECK(ctx.pressure_scale == doctest::Approx(5e-13));

  // warm state: uniform mobility
  const Eigen::VectorXd T = Eigen::VectorXd::Constant(mesh.n_nodes(), 5.0);
  const Eigen::VectorXd p = pressure_step(ctx, T);
  for (int g = 0; g < mesh.n_nodes(); ++g)
    CHECK(p[g] == doctest::Approx(1.0 - mesh.nodes[g].x / 12.0).epsilon(1e-10));

  // velocity is sign * mobility * grad p, constant over the domain
  const CellVectors u = darcy_velocity(ctx, T, p);
  for (int e = 0; e < mesh.n_cells(); ++e) {
    CHECK(u(e, 0) == doctest::Approx(-1.0 * 5e-13 * (-1.0 / 12.0)));
    CHECK(u(e, 1) == doctest::Approx(0.0));
  }
}

TEST_CASE("velocity sign switch flips the field") {
  const Mesh mesh = build_fine_mesh(6, 3, 1.0, 1.0);
  const LayerProperties lay{1.0, 1.0, 1.0, 1.0, 0.0, 2e-13};
  const MaterialField mats = uniform(mesh, lay, {0.0, 0.5, 1e-3});

  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &mats;
  for (int g : mesh.side_nodes(0)) ctx.pressure_bc.emplace_back(g, 1.0);
  for (int g : mesh.side_nodes(1)) ctx.pressure_bc.emplace_back(g, 0.0);
  ctx.velocity_sign = 1.0;
  ctx.prepare();

  const Eigen::VectorXd T = Eigen::VectorXd::Constant(mesh.n_nodes(), 5.0);
  const Eigen::VectorXd p = pressure_step(ctx, T);
  const CellVectors u = darcy_velocity(ctx, T, p);
  CHECK(u(0, 0) == doctest::Approx(2e-13 * (-1.0)));
}

TEST_CASE("frozen cells throttle the flux by epsilon") {
  // left half frozen: mobility ratio epsilon, so the pressure drop
  // concentrates there and the flux scales like epsilon
  const Mesh mesh = build_fine_mesh(16, 4, 2.0, 1.0);
  const LayerProperties lay{1.0, 1.0, 1.0, 1.0, 0.0, 1e-12};
  const MaterialField mats = uniform(mesh, lay, {0.0, 0.25, 1e-2});

  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &mats;
  for (int g : mesh.side_nodes(0)) ctx.pressure_bc.emplace_back(g, 1.0);
  for (int g : mesh.side_nodes(1)) ctx.pressure_bc.emplace_back(g, 0.0);
  ctx.prepare();

  Eigen::VectorXd T(mesh.n_nodes());
  for (int g = 0; g < mesh.n_nodes(); ++g)
    T[g] = mesh.nodes[g].x < 1.0 ? -10.0 : 10.0;

  const Eigen::VectorXd p = pressure_step(ctx, T);
  const CellVectors u = darcy_velocity(ctx, T, p);

  // series of two resistors: flux = mobility / (L_f / eps + L_w)
  const double expect = 1e-12 / (1.0 / 1e-2 + 1.0);
  double max_x = 0.0;
  for (int e = 0; e < mesh.n_cells(); ++e)
    max_x = std::max(max_x, std::abs(u(e, 0)));
  CHECK(max_x == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("uniform heated block follows the exact linear-in-time ramp") {
  // no boundary constraints, constant capacity, uniform source: the
  // implicit step integrates dT/dt = Q / c exactly
  const Mesh mesh = build_fine_mesh(4, 4, 1.0, 1.0);
  const LayerProperties lay{1.3, 1.3, 2.0e6, 2.0e6, 0.0, 0.0};
  const MaterialField mats = uniform(mesh, lay, {-100.0, 0.5, 1e-3});

  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &mats;
  ctx.heat_source = Eigen::VectorXd::Constant(mesh.n_cells(), 50.0);
  ctx.prepare();
  CHECK_FALSE(ctx.pressure_enabled());

  TimeConfig time{86400.0, 4};
  const Eigen::VectorXd T0 = Eigen::VectorXd::Constant(mesh.n_nodes(), 5.0);
  const Trajectory traj = run_fine(ctx, time, T0);
  REQUIRE(traj.n_layers() == 5);

  const double rate = 50.0 / 2.0e6;
  for (int n = 0; n <= 4; ++n) {
    const double expect = 5.0 + rate * time.tau() * n;
    for (int g = 0; g < mesh.n_nodes(); ++g)
      CHECK(traj.T[n][g] == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("steady linear temperature profile is reproduced exactly") {
  const Mesh mesh = build_fine_mesh(8, 4, 2.0, 1.0);
  const LayerProperties lay{1.7, 1.7, 2.0e6, 2.0e6, 0.0, 0.0};
  // wide band so the coefficient stays smooth across the profile
  const MaterialField mats = uniform(mesh, lay, {0.0, 50.0, 1e-3});

  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &mats;
  for (int g : mesh.side_nodes(0)) ctx.temperature_bc.emplace_back(g, -10.0);
  for (int g : mesh.side_nodes(1)) ctx.temperature_bc.emplace_back(g, 10.0);
  ctx.prepare();

  Eigen::VectorXd T0(mesh.n_nodes());
  for (int g = 0; g < mesh.n_nodes(); ++g)
    T0[g] = -10.0 + 10.0 * mesh.nodes[g].x;

  // capacity is uniform and conductivity constant within each cell only
  // when the band covers the whole range: phase fraction stays linear in T
  // but conductivity is equal on both phases anyway, making the linear
  // profile a discrete steady state
  const CellVectors u = CellVectors::Zero(mesh.n_cells(), 2);
  const Eigen::VectorXd T1 = temperature_step(ctx, T0, u, 3600.0);
  CHECK((T1 - T0).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("convection shifts the implicit balance") {
  // manufactured check of the assembled system: with capacity c, velocity
  // u and previous field T, the rhs must carry -c (u . grad T) area/3
  const Mesh mesh = build_fine_mesh(4, 2, 1.0, 0.5);
  const LayerProperties lay{1.0, 1.0, 3.0, 3.0, 0.0, 0.0};
  const MaterialField mats = uniform(mesh, lay, {-100.0, 0.5, 1e-3});

  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &mats;
  ctx.prepare();

  Eigen::VectorXd T(mesh.n_nodes());
  for (int g = 0; g < mesh.n_nodes(); ++g) T[g] = 2.0 * mesh.nodes[g].x;
  CellVectors u(mesh.n_cells(), 2);
  u.col(0).setConstant(0.5);
  u.col(1).setZero();

  const double tau = 10.0;
  const LinearSystem with_u = assemble_temperature_system(ctx, T, u, tau);
  const LinearSystem no_u = assemble_temperature_system(
      ctx, T, CellVectors::Zero(mesh.n_cells(), 2), tau);

  // difference of the right-hand sides is exactly the convection load
  const Eigen::VectorXd d = no_u.rhs - with_u.rhs;
  // total = c * (u . grad T) * area = 3 * 0.5 * 2 * 0.5
  CHECK(d.sum() == doctest::Approx(3.0 * 0.5 * 2.0 * 0.5));
  // matrices agree: convection is fully explicit
  const SparseMat D = with_u.matrix - no_u.matrix;
  const double gap = D.coeffs().size() == 0 ? 0.0 : D.coeffs().abs().maxCoeff();
  CHECK(gap == 0.0);
}

TEST_CASE("zero mobility decouples the fields") {
  const Mesh mesh = build_fine_mesh(10, 5, 12.0, 6.0);
  LayerProperties lay{1.4, 1.6, 2.4e6, 1.9e6, 7e7, 0.0};
  const MaterialField mats = uniform(mesh, lay, {0.0, 0.5, 1e-3});

  const PipeLayout pipes = locate_pipe_nodes(
      mesh, {{6.0, 3.6}}, std::sqrt(mesh.hx() * mesh.hx() + mesh.hy() * mesh.hy()));

  StepContext with_bc;
  with_bc.mesh = &mesh;
  with_bc.materials = &mats;
  for (int g : pipes.nodes) with_bc.temperature_bc.emplace_back(g, -30.0);
  for (int g : mesh.side_nodes(0)) with_bc.pressure_bc.emplace_back(g, 1.0);
  for (int g : mesh.side_nodes(1)) with_bc.pressure_bc.emplace_back(g, 0.0);
  with_bc.prepare();
  CHECK_FALSE(with_bc.pressure_enabled());

  StepContext no_bc = with_bc;
  no_bc.pressure_bc.clear();
  no_bc.prepare();

  TimeConfig time{5.0 * 86400.0, 10};
  const Eigen::VectorXd T0 = Eigen::VectorXd::Constant(mesh.n_nodes(), 2.0);
  const Trajectory a = run_fine(with_bc, time, T0);
  const Trajectory b = run_fine(no_bc, time, T0);
  REQUIRE(a.n_layers() == b.n_layers());
  for (int n = 0; n < a.n_layers(); ++n)
    CHECK((a.T[n] - b.T[n]).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("freezing run honors the extremal bounds and grows the front") {
  const Mesh mesh = build_fine_mesh(24, 12, 12.0, 6.0);
  MaterialField mats;
  mats.cell_layer = build_layer_raster(mesh, {2.0, 4.0}, {0, 1, 2});
  mats.layers = reference_layers();
  mats.phase = {0.0, 0.5, 1e-3};

  const PipeLayout pipes =
      locate_pipe_nodes(mesh, default_pipe_centers(),
                        std::sqrt(mesh.hx() * mesh.hx() + mesh.hy() * mesh.hy()));

  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &mats;
  for (int g : pipes.nodes) ctx.temperature_bc.emplace_back(g, -30.0);
  for (int g : mesh.side_nodes(0)) ctx.pressure_bc.emplace_back(g, 1.0);
  for (int g : mesh.side_nodes(1)) ctx.pressure_bc.emplace_back(g, 0.0);
  ctx.prepare();
  CHECK(ctx.pressure_enabled());

  TimeConfig time{25.0 * 86400.0, 20};
  const Eigen::VectorXd T0 = Eigen::VectorXd::Constant(mesh.n_nodes(), 2.0);
  const Trajectory traj = run_fine(ctx, time, T0);
  REQUIRE(traj.n_layers() == 21);
  REQUIRE(static_cast<int>(traj.p.size()) == 21);

  for (int n = 0; n < traj.n_layers(); ++n) {
    CHECK(traj.T[n].minCoeff() >= -30.0 - 1e-6);
    CHECK(traj.T[n].maxCoeff() <= 2.0 + 1e-6);
  }
  // the pipes cool their surroundings over time
  CHECK(traj.T[20].mean() < traj.T[1].mean());
}

namespace {

// From-scratch reference stepper used as an oracle below: plain arrays,
// hand-rolled assembly and dense Gaussian elimination, no shared code with
// the library. Same discretization: P1 triangles, centroid coefficients,
// lumped capacity, symmetric Dirichlet elimination.
std::vector<double> reference_step(const Mesh& mesh, const LayerProperties& lay,
                                   const PhaseParams& ph,
                                   const std::vector<double>& T_prev,
                                   const std::vector<std::pair<int, double>>& bc,
                                   double tau) {
  const int n = mesh.n_nodes();
  std::vector<double> K(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> lump(n, 0.0);
  std::vector<double> rhs(n, 0.0);

  for (int e = 0; e < mesh.n_cells(); ++e) {
    const auto& c = mesh.cells[e];
    const double x[3] = {mesh.nodes[c[0]].x, mesh.nodes[c[1]].x,
                         mesh.nodes[c[2]].x};
    const double y[3] = {mesh.nodes[c[0]].y, mesh.nodes[c[1]].y,
                         mesh.nodes[c[2]].y};
    const double area =
        0.5 * ((x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]));

    const double tc = (T_prev[c[0]] + T_prev[c[1]] + T_prev[c[2]]) / 3.0;
    double phi, slope;
    if (tc <= ph.t_star - ph.delta) {
      phi = 0.0;
      slope = 0.0;
    } else if (tc >= ph.t_star + ph.delta) {
      phi = 1.0;
      slope = 0.0;
    } else {
      phi = (tc - (ph.t_star - ph.delta)) / (2.0 * ph.delta);
      slope = 1.0 / (2.0 * ph.delta);
    }
    const double cap = lay.c_rho_frozen + phi * (lay.c_rho_liquid - lay.c_rho_frozen) +
                       lay.latent_heat * slope;
    const double k = lay.k_frozen + phi * (lay.k_liquid - lay.k_frozen);

    double b[3], cc[3];
    for (int i = 0; i < 3; ++i) {
      b[i] = y[(i + 1) % 3] - y[(i + 2) % 3];
      cc[i] = x[(i + 2) % 3] - x[(i + 1) % 3];
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j)
        K[static_cast<size_t>(c[i]) * n + c[j]] +=
            k * (b[i] * b[j] + cc[i] * cc[j]) / (4.0 * area);
      lump[c[i]] += cap * area / 3.0;
    }
  }

  for (int g = 0; g < n; ++g) {
    K[static_cast<size_t>(g) * n + g] += lump[g] / tau;
    rhs[g] = lump[g] * T_prev[g] / tau;
  }

  std::vector<char> fixed(n, 0);
  std::vector<double> value(n, 0.0);
  for (const auto& [g, v] : bc) {
    fixed[g] = 1;
    value[g] = v;
  }
  for (int g = 0; g < n; ++g) {
    if (!fixed[g]) continue;
    for (int i = 0; i < n; ++i) {
      if (i == g || fixed[i]) continue;
      rhs[i] -= K[static_cast<size_t>(i) * n + g] * value[g];
    }
    for (int i = 0; i < n; ++i) {
      K[static_cast<size_t>(g) * n + i] = 0.0;
      K[static_cast<size_t>(i) * n + g] = 0.0;
    }
    K[static_cast<size_t>(g) * n + g] = 1.0;
    rhs[g] = value[g];
  }

  // Gaussian elimination with partial pivoting
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(K[static_cast<size_t>(perm[r]) * n + col]) >
          std::abs(K[static_cast<size_t>(perm[piv]) * n + col]))
        piv = r;
    std::swap(perm[col], perm[piv]);
    const double d = K[static_cast<size_t>(perm[col]) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = K[static_cast<size_t>(perm[r]) * n + col] / d;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j)
        K[static_cast<size_t>(perm[r]) * n + j] -=
            f * K[static_cast<size_t>(perm[col]) * n + j];
      rhs[perm[r]] -= f * rhs[perm[col]];
    }
  }
  std::vector<double> sol(n);
  for (int col = n - 1; col >= 0; --col) {
    double s = rhs[perm[col]];
    for (int j = col + 1; j < n; ++j)
      s -= K[static_cast<size_t>(perm[col]) * n + j] * sol[j];
    sol[col] = s / K[static_cast<size_t>(perm[col]) * n + col];
  }
  return sol;
}

}  // namespace

TEST_CASE("freezing column matches an independent scalar implementation") {
  const Mesh mesh = build_fine_mesh(24, 2, 1.2, 0.1);
  const LayerProperties lay{1.4, 1.8, 2.4e6, 1.9e6, 7.0e7, 0.0};
  const PhaseParams ph{0.0, 0.5, 1e-3};
  const MaterialField mats = uniform(mesh, lay, ph);

  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &mats;
  for (int g : mesh.side_nodes(0)) ctx.temperature_bc.emplace_back(g, -10.0);
  ctx.prepare();

  const double tau = 3600.0;
  Eigen::VectorXd T = Eigen::VectorXd::Constant(mesh.n_nodes(), 5.0);
  std::vector<double> T_ref(mesh.n_nodes(), 5.0);
  const CellVectors u = CellVectors::Zero(mesh.n_cells(), 2);

  for (int layer = 0; layer < 6; ++layer) {
    T = temperature_step(ctx, T, u, tau);
    T_ref = reference_step(mesh, lay, ph, T_ref, ctx.temperature_bc, tau);
    double gap = 0.0;
    for (int g = 0; g < mesh.n_nodes(); ++g)
      gap = std::max(gap, std::abs(T[g] - T_ref[g]));
    CHECK(gap < 1e-8);
  }
  // the front actually moved: the wall's neighbor is below the band while
  // the far end is still warm
  CHECK(T[mesh.node_id(1, 1)] < -0.5);
  CHECK(T[mesh.node_id(23, 1)] > 0.0);
}

TEST_CASE("time config validation") {
  const TimeConfig no_span{0.0, 10};
  const TimeConfig no_steps{1.0, 0};
  const TimeConfig ok{1.0, 1};
  CHECK_THROWS_AS(no_span.validate(), std::invalid_argument);
  CHECK_THROWS_AS(no_steps.validate(), std::invalid_argument);
  CHECK_NOTHROW(ok.validate());
}
