#include "frost/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "frost/materials.hpp"
#include "frost/mesh.hpp"
#include "frost/msfem_offline.hpp"

using namespace frost;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("frost_io_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

Trajectory sample_trajectory() {
  Trajectory traj;
  traj.nx = 3;
  traj.ny = 2;
  traj.lx = 1.5;
  traj.ly = 1.0;
  const int n = 12;
  for (int l = 0; l < 4; ++l) {
    Eigen::VectorXd T(n), p(n);
    for (int g = 0; g < n; ++g) {
      T[g] = 0.1 * l + 0.01 * g + 1.0 / 3.0;
      p[g] = -0.2 * l + 0.001 * g;
    }
    traj.T.push_back(T);
    traj.p.push_back(p);
  }
  return traj;
}

MultiscaleSpace sample_space() {
  const Mesh mesh = build_fine_mesh(10, 5, 12.0, 6.0);
  const CoarseGrid coarse = build_coarse_grid(mesh, 2, 1);
  NeighborhoodMap map = build_neighborhoods(mesh, coarse);
  const PartitionOfUnity pou = build_pou(mesh, coarse, map);
  const PipeLayout pipes = locate_pipe_nodes(
      mesh, {{6.0, 3.0}},
      std::sqrt(mesh.hx() * mesh.hx() + mesh.hy() * mesh.hy()));
  tag_pipe_neighborhoods(map, mesh, pipes);

  MaterialField mats;
  mats.cell_layer.assign(mesh.n_cells(), 0);
  mats.layers = {LayerProperties{1.4, 1.7, 2.4e6, 1.9e6, 7.5e7, 1e-13}};
  mats.phase = {0.0, 0.5, 1e-3};
  return build_offline_space(mesh, coarse, map, pou, mats, -30.0, 3);
}

}  // namespace

TEST_CASE("trajectory round trip is bit exact") {
  const TempDir dir;
  const Trajectory traj = sample_trajectory();
  save_trajectory(dir.file("run"), traj);
  const Trajectory back = load_trajectory(dir.file("run"));

  CHECK(back.nx == traj.nx);
  CHECK(back.ny == traj.ny);
  CHECK(back.lx == traj.lx);
  CHECK(back.ly == traj.ly);
  REQUIRE(back.T.size() == traj.T.size());
  REQUIRE(back.p.size() == traj.p.size());
  for (size_t l = 0; l < traj.T.size(); ++l) {
    CHECK((back.T[l].array() == traj.T[l].array()).all());
    CHECK((back.p[l].array() == traj.p[l].array()).all());
  }
}

TEST_CASE("trajectory without pressure layers loads as such") {
  const TempDir dir;
  Trajectory traj = sample_trajectory();
  traj.p.clear();
  save_trajectory(dir.file("dry"), traj);
  const Trajectory back = load_trajectory(dir.file("dry"));
  CHECK(back.p.empty());
  CHECK(back.T.size() == traj.T.size());
}

TEST_CASE("trajectory loader rejects foreign and truncated files") {
  const TempDir dir;
  {
    std::ofstream meta(dir.file("junk.meta"));
    meta << "something else\n";
  }
  CHECK_THROWS_AS(load_trajectory(dir.file("junk")), std::runtime_error);

  const Trajectory traj = sample_trajectory();
  save_trajectory(dir.file("cut"), traj);
  std::filesystem::resize_file(dir.file("cut") + "_T.bin", 10);
  CHECK_THROWS_AS(load_trajectory(dir.file("cut")), std::runtime_error);
}

TEST_CASE("basis cache round trip is bit exact") {
  const TempDir dir;
  const MultiscaleSpace space = sample_space();
  const std::uint64_t print = 0x1234abcd5678ef00ull;
  save_basis(dir.file("basis.bin"), space, print);
  const MultiscaleSpace back = load_basis(dir.file("basis.bin"), print);

  CHECK(back.n_nodes == space.n_nodes);
  CHECK(back.m_offline == space.m_offline);
  CHECK(back.spectral_regularized == space.spectral_regularized);
  REQUIRE(back.n_omega() == space.n_omega());
  for (int i = 0; i < space.n_omega(); ++i) {
    CHECK(back.omega_nodes[i] == space.omega_nodes[i]);
    CHECK((back.t_offline[i].array() == space.t_offline[i].array()).all());
    CHECK((back.p_offline[i].array() == space.p_offline[i].array()).all());
  }
  REQUIRE(back.pipe_omegas == space.pipe_omegas);
  for (size_t k = 0; k < space.t_pipe.size(); ++k)
    CHECK((back.t_pipe[k].array() == space.t_pipe[k].array()).all());
}

TEST_CASE("basis cache rejects mismatches") {
  const TempDir dir;
  const MultiscaleSpace space = sample_space();
  save_basis(dir.file("b.bin"), space, 7u);

  // wrong fingerprint
  CHECK_THROWS_WITH_AS(load_basis(dir.file("b.bin"), 8u),
                       doctest::Contains("stale"), std::runtime_error);

  // corrupted magic
  {
    std::fstream f(dir.file("b.bin"),
                   std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XX", 2);
  }
  CHECK_THROWS_AS(load_basis(dir.file("b.bin"), 7u), std::runtime_error);

  // truncation
  save_basis(dir.file("c.bin"), space, 7u);
  const auto size = std::filesystem::file_size(dir.file("c.bin"));
  std::filesystem::resize_file(dir.file("c.bin"), size / 2);
  CHECK_THROWS_AS(load_basis(dir.file("c.bin"), 7u), std::runtime_error);

  // missing file
  CHECK_THROWS_AS(load_basis(dir.file("absent.bin"), 7u), std::runtime_error);
}

TEST_CASE("vtk snapshot carries fields and flags") {
  const TempDir dir;
  const Mesh mesh = build_fine_mesh(3, 2, 1.5, 1.0);
  MaterialField mats;
  mats.cell_layer.assign(mesh.n_cells(), 0);
  mats.layers = {LayerProperties{1.0, 1.0, 1.0, 1.0, 0.0, 0.0}};
  mats.phase = {0.0, 0.5, 1e-3};

  Eigen::VectorXd T(mesh.n_nodes()), p(mesh.n_nodes());
  for (int g = 0; g < mesh.n_nodes(); ++g) {
    T[g] = mesh.nodes[g].x - 0.7;
    p[g] = 1.0 - mesh.nodes[g].x / 1.5;
  }
  write_vtk(dir.file("snap.vtk"), mesh, mats, T, p);

  std::ifstream in(dir.file("snap.vtk"));
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.rfind("# vtk DataFile Version 2.0", 0) == 0);
  CHECK(text.find("POINTS 12 double") != std::string::npos);
  CHECK(text.find("CELLS 12 48") != std::string::npos);
  CHECK(text.find("SCALARS temperature double 1") != std::string::npos);
  CHECK(text.find("SCALARS pressure double 1") != std::string::npos);
  CHECK(text.find("SCALARS frozen int 1") != std::string::npos);
  // never a comma decimal
  CHECK(text.find(',') == std::string::npos);
}

TEST_CASE("error table formats fixed columns") {
  const TempDir dir;
  std::vector<ErrorRow> rows(2);
  rows[0] = {4, 0, 1300, 1296, 12.3456, 20.0, 1.5, 3.25};
  rows[1] = {4, 2, 1876, 1872, 3.0, 8.125, 0.75, 2.0};
  write_error_csv(dir.file("err.csv"), rows);

  std::ifstream in(dir.file("err.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "M,L,DOF_c,e_L2_T,e_H1_T,e_L2_p,e_H1_p");
  std::getline(in, line);
  CHECK(line == "4,0,1300,12.346,20.000,1.500,3.250");
  std::getline(in, line);
  CHECK(line == "4,2,1876,3.000,8.125,0.750,2.000");
}

TEST_CASE("series table walks layers in order") {
  const TempDir dir;
  ErrorSeries s;
  s.t_l2 = {0.0, 1.5};
  s.t_h1 = {0.0, 2.5};
  s.p_l2 = {0.0, 0.25};
  s.p_h1 = {0.0, 0.5};
  write_series_csv(dir.file("series.csv"), s);

  std::ifstream in(dir.file("series.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "layer,e_L2_T,e_H1_T,e_L2_p,e_H1_p");
  std::getline(in, line);
  CHECK(line == "0,0.000,0.000,0.000,0.000");
  std::getline(in, line);
  CHECK(line == "1,1.500,2.500,0.250,0.500");
}
