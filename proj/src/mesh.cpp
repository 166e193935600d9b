#include "frost/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace frost {

Mesh build_fine_mesh(int nx, int ny, double lx, double ly) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("mesh: nx, ny must be >= 1");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw std::invalid_argument("mesh: lx, ly must be positive");

  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.lx = lx;
  mesh.ly = ly;

  mesh.nodes.resize(static_cast<size_t>(nx + 1) * (ny + 1));
  const double hx = lx / nx;
  const double hy = ly / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes[mesh.node_id(i, j)] = {i * hx, j * hy};

  mesh.cells.reserve(static_cast<size_t>(2) * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = mesh.node_id(i, j);
      const int n10 = mesh.node_id(i + 1, j);
      const int n01 = mesh.node_id(i, j + 1);
      const int n11 = mesh.node_id(i + 1, j + 1);
      mesh.cells.push_back({n00, n10, n11});
      mesh.cells.push_back({n00, n11, n01});
    }
  }
  return mesh;
}

std::vector<int> Mesh::boundary_nodes() const {
  std::vector<int> out;
  out.reserve(2 * (nx + ny));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      if (i == 0 || i == nx || j == 0 || j == ny) out.push_back(node_id(i, j));
    }
  }
  return out;
}

std::vector<int> Mesh::side_nodes(int side) const {
  std::vector<int> out;
  switch (side) {
    case 0:
      for (int j = 0; j <= ny; ++j) out.push_back(node_id(0, j));
      break;
    case 1:
      for (int j = 0; j <= ny; ++j) out.push_back(node_id(nx, j));
      break;
    case 2:
      for (int i = 0; i <= nx; ++i) out.push_back(node_id(i, 0));
      break;
    case 3:
      for (int i = 0; i <= nx; ++i) out.push_back(node_id(i, ny));
      break;
    default:
      throw std::invalid_argument("mesh: side must be 0..3");
  }
  return out;
}

Vec2 Mesh::cell_centroid(int c) const {
  const auto& t = cells[c];
  return {(nodes[t[0]].x + nodes[t[1]].x + nodes[t[2]].x) / 3.0,
          (nodes[t[0]].y + nodes[t[1]].y + nodes[t[2]].y) / 3.0};
}

CoarseGrid build_coarse_grid(const Mesh& mesh, int coarse_nx, int coarse_ny) {
  if (coarse_nx < 1 || coarse_ny < 1)
    throw std::invalid_argument("coarse grid: dimensions must be >= 1");
  if (mesh.nx % coarse_nx != 0 || mesh.ny % coarse_ny != 0)
    throw std::invalid_argument(
        "coarse grid: fine cell counts must be divisible by coarse counts");

  CoarseGrid cg;
  cg.nx = coarse_nx;
  cg.ny = coarse_ny;
  cg.mx = mesh.nx / coarse_nx;
  cg.my = mesh.ny / coarse_ny;

  cg.vertices.resize(static_cast<size_t>(coarse_nx + 1) * (coarse_ny + 1));
  cg.vertex_fine_node.resize(cg.vertices.size());
  for (int bj = 0; bj <= coarse_ny; ++bj) {
    for (int bi = 0; bi <= coarse_nx; ++bi) {
      const int v = cg.vertex_id(bi, bj);
      const int g = mesh.node_id(bi * cg.mx, bj * cg.my);
      cg.vertices[v] = mesh.nodes[g];
      cg.vertex_fine_node[v] = g;
    }
  }
  return cg;
}

int Neighborhood::local_node(int g, int row) const {
  if (!contains(g, row))
    throw std::out_of_range("neighborhood: node " + std::to_string(g) +
                            " not in omega of vertex " + std::to_string(vertex));
  const int i = g % row, j = g / row;
  return (j - j_lo) * (i_hi - i_lo + 1) + (i - i_lo);
}

NeighborhoodMap build_neighborhoods(const Mesh& mesh, const CoarseGrid& cg) {
  NeighborhoodMap map;
  map.items.resize(cg.n_vertices());

  for (int bj = 0; bj <= cg.ny; ++bj) {
    for (int bi = 0; bi <= cg.nx; ++bi) {
      Neighborhood& nh = map.items[cg.vertex_id(bi, bj)];
      nh.vertex = cg.vertex_id(bi, bj);
      nh.i_lo = std::max(0, (bi - 1) * cg.mx);
      nh.i_hi = std::min(mesh.nx, (bi + 1) * cg.mx);
      nh.j_lo = std::max(0, (bj - 1) * cg.my);
      nh.j_hi = std::min(mesh.ny, (bj + 1) * cg.my);

      // nodes.ascending follows from the row-major sweep
      for (int j = nh.j_lo; j <= nh.j_hi; ++j) {
        for (int i = nh.i_lo; i <= nh.i_hi; ++i) {
          const int g = mesh.node_id(i, j);
          nh.nodes.push_back(g);
          const bool rim =
              (i == nh.i_lo || i == nh.i_hi || j == nh.j_lo || j == nh.j_hi);
          (rim ? nh.boundary : nh.interior).push_back(g);
        }
      }
      for (int j = nh.j_lo; j < nh.j_hi; ++j) {
        for (int i = nh.i_lo; i < nh.i_hi; ++i) {
          const int quad = j * mesh.nx + i;
          nh.cells.push_back(2 * quad);
          nh.cells.push_back(2 * quad + 1);
        }
      }
    }
  }
  return map;
}

PipeLayout locate_pipe_nodes(const Mesh& mesh, const std::vector<Vec2>& centers,
                             double r_p) {
  if (!(r_p > 0.0)) throw std::invalid_argument("pipes: radius must be positive");

  PipeLayout layout;
  layout.centers = centers;
  layout.radius = r_p;
  layout.per_pipe.resize(centers.size());

  std::vector<char> taken(mesh.n_nodes(), 0);
  const double r2 = r_p * r_p;
  for (size_t pidx = 0; pidx < centers.size(); ++pidx) {
    const Vec2 c = centers[pidx];
    // scan only the index window around the center
    const int i0 = std::max(0, static_cast<int>(std::floor((c.x - r_p) / mesh.hx())));
    const int i1 = std::min(mesh.nx, static_cast<int>(std::ceil((c.x + r_p) / mesh.hx())));
    const int j0 = std::max(0, static_cast<int>(std::floor((c.y - r_p) / mesh.hy())));
    const int j1 = std::min(mesh.ny, static_cast<int>(std::ceil((c.y + r_p) / mesh.hy())));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const int g = mesh.node_id(i, j);
        const double dx = mesh.nodes[g].x - c.x;
        const double dy = mesh.nodes[g].y - c.y;
        if (dx * dx + dy * dy <= r2 && !taken[g]) {
          taken[g] = 1;
          layout.per_pipe[pidx].push_back(g);
        }
      }
    }
    if (layout.per_pipe[pidx].empty())
      throw std::runtime_error("pipes: pipe " + std::to_string(pidx) +
                               " captures no mesh node; radius below grid "
                               "resolution");
    layout.nodes.insert(layout.nodes.end(), layout.per_pipe[pidx].begin(),
                        layout.per_pipe[pidx].end());
  }
  std::sort(layout.nodes.begin(), layout.nodes.end());
  return layout;
}

std::vector<Vec2> default_pipe_centers() {
  std::vector<Vec2> centers;
  centers.reserve(20);
  for (double y : {2.4, 3.6}) {
    for (int k = 0; k < 10; ++k) {
      centers.push_back({1.2 + k * (10.8 - 1.2) / 9.0, y});
    }
  }
  return centers;
}

void tag_pipe_neighborhoods(NeighborhoodMap& map, const Mesh& mesh,
                            const PipeLayout& pipes) {
  for (auto& nh : map.items) {
    nh.has_pipe = false;
    nh.pipe_nodes.clear();
  }
  for (int g : pipes.nodes) {
    for (auto& nh : map.items) {
      if (nh.contains(g, mesh.nx + 1)) {
        nh.has_pipe = true;
        nh.pipe_nodes.push_back(g);
      }
    }
  }
}

std::vector<int> build_layer_raster(const Mesh& mesh,
                                    const std::vector<double>& bounds,
                                    const std::vector<int>& layer_ids) {
  if (layer_ids.empty())
    throw std::invalid_argument("raster: need at least one stripe");
  if (bounds.size() + 1 != layer_ids.size())
    throw std::invalid_argument(
        "raster: stripe bounds must be one fewer than stripe labels");
  if (!std::is_sorted(bounds.begin(), bounds.end()))
    throw std::invalid_argument("raster: stripe bounds must ascend");

  std::vector<int> raster(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double yc = mesh.cell_centroid(c).y;
    size_t s = 0;
    while (s < bounds.size() && yc > bounds[s]) ++s;
    raster[c] = layer_ids[s];
  }
  return raster;
}

}  // namespace frost
