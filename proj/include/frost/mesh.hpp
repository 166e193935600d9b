#pragma once

#include <array>
#include <vector>

namespace frost {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Structured triangulation of the rectangle [0,lx] x [0,ly].
// Nodes are laid out row by row: node(i,j) = j*(nx+1) + i. Every grid quad
// is split along its lower-left to upper-right diagonal into two
// counterclockwise triangles.
struct Mesh {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> cells;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return 0.5 * hx() * hy(); }

  int node_id(int i, int j) const { return j * (nx + 1) + i; }

  // Nodes on the outer boundary, each listed once, ascending.
  std::vector<int> boundary_nodes() const;
  // Nodes on one side of the rectangle: 0 left, 1 right, 2 bottom, 3 top.
  std::vector<int> side_nodes(int side) const;

  Vec2 cell_centroid(int c) const;
};

Mesh build_fine_mesh(int nx, int ny, double lx, double ly);

// Coarse conforming grid over the same rectangle. Each coarse cell covers
// an mx-by-my block of fine quads; coarse vertices coincide with fine nodes.
struct CoarseGrid {
  int nx = 0;
  int ny = 0;
  int mx = 0;  // fine cells per coarse cell, x direction
  int my = 0;
  std::vector<Vec2> vertices;
  std::vector<int> vertex_fine_node;  // fine node under each coarse vertex

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return nx * ny; }
  int vertex_id(int bi, int bj) const { return bj * (nx + 1) + bi; }
};

CoarseGrid build_coarse_grid(const Mesh& mesh, int coarse_nx, int coarse_ny);

// Neighborhood of a coarse vertex: the union of coarse cells touching it,
// described as a rectangle in fine-node index space.
struct Neighborhood {
  int vertex = -1;
  int i_lo = 0, i_hi = 0;  // fine-node index range, inclusive
  int j_lo = 0, j_hi = 0;
  std::vector<int> nodes;     // all fine nodes inside the rectangle, ascending
  std::vector<int> interior;  // nodes strictly inside the rectangle
  std::vector<int> boundary;  // nodes on the rectangle perimeter
  std::vector<int> cells;     // fine triangles covering the rectangle
  bool has_pipe = false;
  std::vector<int> pipe_nodes;  // pipe nodes that fall inside this neighborhood

  int n_local() const { return static_cast<int>(nodes.size()); }

  // nodes fills the index rectangle row-major, so membership and local
  // position reduce to integer arithmetic. row = mesh.nx + 1.
  bool contains(int g, int row) const {
    const int i = g % row, j = g / row;
    return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi;
  }
  int local_node(int g, int row) const;
};

struct NeighborhoodMap {
  std::vector<Neighborhood> items;
};

NeighborhoodMap build_neighborhoods(const Mesh& mesh, const CoarseGrid& coarse);

// Freezing pipes resolved to fine-node sets: every node within r_p of a
// center belongs to that pipe. Pipes are point constraints, not holes.
struct PipeLayout {
  std::vector<Vec2> centers;
  double radius = 0.0;
  std::vector<int> nodes;                  // union of all pipes, ascending
  std::vector<std::vector<int>> per_pipe;  // node ids per center
};

PipeLayout locate_pipe_nodes(const Mesh& mesh, const std::vector<Vec2>& centers,
                             double r_p);

// Standard configuration: two rows of ten pipes each.
std::vector<Vec2> default_pipe_centers();

// Marks neighborhoods that contain pipe nodes and records which ones.
void tag_pipe_neighborhoods(NeighborhoodMap& map, const Mesh& mesh,
                            const PipeLayout& pipes);

// Horizontal-stripe material raster: cell gets the layer id of the stripe
// its centroid falls in. bounds holds the ny_stripes-1 interior interfaces
// (ascending y), layer_ids the stripe labels bottom to top.
std::vector<int> build_layer_raster(const Mesh& mesh,
                                    const std::vector<double>& bounds,
                                    const std::vector<int>& layer_ids);

}  // namespace frost
