#include "frost/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace frost {

namespace {

// snprintf keeps the decimal point independent of any locale machinery
std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("io: cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("io: cannot open '" + path + "'");
  return in;
}

void put_raw(std::ofstream& out, const void* p, size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get_raw(std::ifstream& in, void* p, size_t n, const std::string& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n))
    throw std::runtime_error("io: truncated file '" + path + "'");
}

void put_i32(std::ofstream& out, std::int32_t v) { put_raw(out, &v, sizeof v); }
void put_u64(std::ofstream& out, std::uint64_t v) { put_raw(out, &v, sizeof v); }

std::int32_t get_i32(std::ifstream& in, const std::string& path) {
  std::int32_t v = 0;
  get_raw(in, &v, sizeof v, path);
  return v;
}

std::uint64_t get_u64(std::ifstream& in, const std::string& path) {
  std::uint64_t v = 0;
  get_raw(in, &v, sizeof v, path);
  return v;
}

void save_layers(const std::string& path,
                 const std::vector<Eigen::VectorXd>& layers) {
  auto out = open_out(path, std::ios::binary);
  for (const auto& u : layers)
    put_raw(out, u.data(), sizeof(double) * u.size());
  if (!out) throw std::runtime_error("io: write failed on '" + path + "'");
}

std::vector<Eigen::VectorXd> load_layers(const std::string& path, int n_layers,
                                         int n_nodes) {
  std::vector<Eigen::VectorXd> layers;
  if (n_layers == 0) return layers;
  auto in = open_in(path, std::ios::binary);
  layers.reserve(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    Eigen::VectorXd u(n_nodes);
    get_raw(in, u.data(), sizeof(double) * n_nodes, path);
    layers.push_back(std::move(u));
  }
  return layers;
}

constexpr char kBasisMagic[8] = {'F', 'R', 'O', 'S', 'T', 'B', 'A', 'S'};
constexpr std::int32_t kBasisVersion = 1;

}  // namespace

void ensure_directory(const std::string& path) {
  if (path.empty()) return;
  std::filesystem::create_directories(path);
}

void write_vtk(const std::string& path, const Mesh& mesh,
               const MaterialField& materials, const Eigen::VectorXd& T,
               const Eigen::VectorXd& p) {
  if (T.size() != mesh.n_nodes())
    throw std::invalid_argument("vtk: temperature size mismatch");
  const bool with_p = p.size() == mesh.n_nodes();

  auto out = open_out(path, std::ios::out);
  out << "# vtk DataFile Version 2.0\n"
      << "frost snapshot\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n";

  out << "POINTS " << mesh.n_nodes() << " double\n";
  for (const auto& v : mesh.nodes)
    out << fmt("%.9g", v.x) << ' ' << fmt("%.9g", v.y) << " 0\n";

  out << "CELLS " << mesh.n_cells() << ' ' << 4 * mesh.n_cells() << '\n';
  for (const auto& c : mesh.cells)
    out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';

  out << "CELL_TYPES " << mesh.n_cells() << '\n';
  for (int e = 0; e < mesh.n_cells(); ++e) out << "5\n";

  out << "POINT_DATA " << mesh.n_nodes() << '\n';
  out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < T.size(); ++i) out << fmt("%.9g", T[i]) << '\n';
  if (with_p) {
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < p.size(); ++i) out << fmt("%.9g", p[i]) << '\n';
  }

  out << "CELL_DATA " << mesh.n_cells() << '\n';
  out << "SCALARS layer int 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < mesh.n_cells(); ++e) out << materials.cell_layer[e] << '\n';
  out << "SCALARS frozen int 1\nLOOKUP_TABLE default\n";
  for (int e = 0; e < mesh.n_cells(); ++e) {
    const double tc = materials.cell_temperature(mesh, T, e);
    out << (tc <= materials.phase.t_star ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("io: write failed on '" + path + "'");
}

void save_trajectory(const std::string& prefix, const Trajectory& traj) {
  const int n_nodes = (traj.nx + 1) * (traj.ny + 1);
  for (const auto& u : traj.T)
    if (u.size() != n_nodes)
      throw std::invalid_argument("trajectory: temperature layer size mismatch");
  for (const auto& u : traj.p)
    if (u.size() != n_nodes)
      throw std::invalid_argument("trajectory: pressure layer size mismatch");

  auto meta = open_out(prefix + ".meta", std::ios::out);
  meta << "frost trajectory 1\n"
       << "nx " << traj.nx << '\n'
       << "ny " << traj.ny << '\n'
       << "lx " << fmt("%.17g", traj.lx) << '\n'
       << "ly " << fmt("%.17g", traj.ly) << '\n'
       << "t_layers " << traj.T.size() << '\n'
       << "p_layers " << traj.p.size() << '\n';
  if (!meta) throw std::runtime_error("io: write failed on '" + prefix + ".meta'");

  save_layers(prefix + "_T.bin", traj.T);
  if (!traj.p.empty()) save_layers(prefix + "_p.bin", traj.p);
}

Trajectory load_trajectory(const std::string& prefix) {
  const std::string meta_path = prefix + ".meta";
  auto meta = open_in(meta_path, std::ios::in);

  std::string header;
  std::getline(meta, header);
  if (header != "frost trajectory 1")
    throw std::runtime_error("io: '" + meta_path + "' is not a trajectory");

  Trajectory traj;
  int n_t = -1, n_p = -1;
  std::string key;
  while (meta >> key) {
    if (key == "nx")
      meta >> traj.nx;
    else if (key == "ny")
      meta >> traj.ny;
    else if (key == "lx")
      meta >> traj.lx;
    else if (key == "ly")
      meta >> traj.ly;
    else if (key == "t_layers")
      meta >> n_t;
    else if (key == "p_layers")
      meta >> n_p;
    else
      throw std::runtime_error("io: unknown field '" + key + "' in '" +
                               meta_path + "'");
    if (!meta)
      throw std::runtime_error("io: malformed value in '" + meta_path + "'");
  }
  if (traj.nx < 1 || traj.ny < 1 || n_t < 0 || n_p < 0)
    throw std::runtime_error("io: incomplete metadata in '" + meta_path + "'");

  const int n_nodes = (traj.nx + 1) * (traj.ny + 1);
  traj.T = load_layers(prefix + "_T.bin", n_t, n_nodes);
  traj.p = load_layers(prefix + "_p.bin", n_p, n_nodes);
  return traj;
}

void save_basis(const std::string& path, const MultiscaleSpace& space,
                std::uint64_t fingerprint) {
  space.validate();
  const bool with_p = space.has_pressure();

  auto out = open_out(path, std::ios::binary);
  put_raw(out, kBasisMagic, sizeof kBasisMagic);
  put_i32(out, kBasisVersion);
  put_u64(out, fingerprint);
  put_i32(out, space.n_nodes);
  put_i32(out, space.m_offline);
  put_i32(out, space.n_omega());
  put_i32(out, static_cast<std::int32_t>(space.pipe_omegas.size()));
  put_i32(out, with_p ? 1 : 0);
  put_i32(out, space.spectral_regularized ? 1 : 0);

  for (int i = 0; i < space.n_omega(); ++i) {
    const auto& nodes = space.omega_nodes[i];
    put_i32(out, static_cast<std::int32_t>(nodes.size()));
    for (int g : nodes) put_i32(out, g);
    const auto& t = space.t_offline[i];
    put_raw(out, t.data(), sizeof(double) * t.size());
    if (with_p) {
      const auto& p = space.p_offline[i];
      put_raw(out, p.data(), sizeof(double) * p.size());
    }
  }
  for (size_t k = 0; k < space.pipe_omegas.size(); ++k) {
    put_i32(out, space.pipe_omegas[k]);
    const auto& v = space.t_pipe[k];
    put_i32(out, static_cast<std::int32_t>(v.size()));
    put_raw(out, v.data(), sizeof(double) * v.size());
  }
  if (!out) throw std::runtime_error("io: write failed on '" + path + "'");
}

MultiscaleSpace load_basis(const std::string& path, std::uint64_t fingerprint) {
  auto in = open_in(path, std::ios::binary);

  char magic[8];
  get_raw(in, magic, sizeof magic, path);
  if (std::memcmp(magic, kBasisMagic, sizeof magic) != 0)
    throw std::runtime_error("io: '" + path + "' is not a basis cache");
  if (get_i32(in, path) != kBasisVersion)
    throw std::runtime_error("io: unsupported basis cache version in '" + path +
                             "'");
  if (get_u64(in, path) != fingerprint)
    throw std::runtime_error("io: stale basis cache '" + path +
                             "' (configuration changed)");

  MultiscaleSpace space;
  space.n_nodes = get_i32(in, path);
  space.m_offline = get_i32(in, path);
  const int n_omega = get_i32(in, path);
  const int n_pipe = get_i32(in, path);
  const bool with_p = get_i32(in, path) != 0;
  space.spectral_regularized = get_i32(in, path) != 0;
  if (space.n_nodes < 1 || space.m_offline < 1 || n_omega < 1 || n_pipe < 0)
    throw std::runtime_error("io: corrupt basis cache '" + path + "'");

  space.omega_nodes.resize(n_omega);
  space.t_offline.resize(n_omega);
  // mirror build_offline_space: pressure blocks exist but stay 0x0 when
  // the cache was produced without a conducting layer
  space.p_offline.resize(n_omega);
  for (int i = 0; i < n_omega; ++i) {
    const int n_local = get_i32(in, path);
    if (n_local < 1 || n_local > space.n_nodes)
      throw std::runtime_error("io: corrupt basis cache '" + path + "'");
    auto& nodes = space.omega_nodes[i];
    nodes.resize(n_local);
    for (int& g : nodes) g = get_i32(in, path);
    auto& t = space.t_offline[i];
    t.resize(n_local, space.m_offline);
    get_raw(in, t.data(), sizeof(double) * t.size(), path);
    if (with_p) {
      auto& p = space.p_offline[i];
      p.resize(n_local, space.m_offline);
      get_raw(in, p.data(), sizeof(double) * p.size(), path);
    }
  }
  space.pipe_omegas.resize(n_pipe);
  space.t_pipe.resize(n_pipe);
  for (int k = 0; k < n_pipe; ++k) {
    space.pipe_omegas[k] = get_i32(in, path);
    const int n_local = get_i32(in, path);
    if (n_local < 1 || n_local > space.n_nodes)
      throw std::runtime_error("io: corrupt basis cache '" + path + "'");
    space.t_pipe[k].resize(n_local);
    get_raw(in, space.t_pipe[k].data(), sizeof(double) * n_local, path);
  }

  space.validate();
  return space;
}

void write_error_csv(const std::string& path,
                     const std::vector<ErrorRow>& rows) {
  auto out = open_out(path, std::ios::out);
  out << "M,L,DOF_c,e_L2_T,e_H1_T,e_L2_p,e_H1_p\n";
  for (const auto& r : rows)
    out << r.m_offline << ',' << r.n_online << ',' << r.dof_T << ','
        << fmt("%.3f", r.t_l2) << ',' << fmt("%.3f", r.t_h1) << ','
        << fmt("%.3f", r.p_l2) << ',' << fmt("%.3f", r.p_h1) << '\n';
  if (!out) throw std::runtime_error("io: write failed on '" + path + "'");
}

void write_series_csv(const std::string& path, const ErrorSeries& series) {
  auto out = open_out(path, std::ios::out);
  out << "layer,e_L2_T,e_H1_T,e_L2_p,e_H1_p\n";
  for (size_t l = 0; l < series.t_l2.size(); ++l)
    out << l << ',' << fmt("%.3f", series.t_l2[l]) << ','
        << fmt("%.3f", series.t_h1[l]) << ',' << fmt("%.3f", series.p_l2[l])
        << ',' << fmt("%.3f", series.p_h1[l]) << '\n';
  if (!out) throw std::runtime_error("io: write failed on '" + path + "'");
}

}  // namespace frost
