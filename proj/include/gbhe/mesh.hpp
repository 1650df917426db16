#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace gbhe {

using Index = std::int32_t;

/// Spatial point or vector; components beyond the mesh dimension are zero.
using Vec3 = std::array<double, 3>;

/// Axis-aligned box [low, high] in 2 or 3 dimensions.
struct Box {
  int dim = 2;
  Vec3 low{0.0, 0.0, 0.0};
  Vec3 high{1.0, 1.0, 1.0};

  static Box unit(int dim);
  static Box square(double side);

  double volume() const;
};

/// Volume and barycentric-basis gradients of one simplex.
struct CellGeometry {
  double volume = 0.0;
  std::array<Vec3, 4> gradients{};  // one per cell vertex; the last is unused in 2D
};

/// Simplicial triangulation of a box: triangles in 2D, tetrahedra in 3D.
///
/// Cells are stored positively oriented. Boundary facets are ordered so the
/// right-hand normal points out of the domain. The mesh is immutable once
/// built.
class Mesh {
 public:
  /// Uniform mesh with n cells per side. 2D squares are split along the
  /// lower-left to upper-right diagonal; 3D cubes use the 6-tetrahedron
  /// Kuhn subdivision around the main diagonal.
  static Mesh structured(int dim, int n, const Box& extent);

  int dim() const { return dim_; }
  int vertices_per_cell() const { return dim_ + 1; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size() / static_cast<std::size_t>(dim_ + 1); }
  const Box& extent() const { return extent_; }
  int cells_per_side() const { return n_; }
  /// Mesh size: the box span along the first axis divided by n.
  double h() const;

  const Vec3& vertex(Index v) const { return vertices_.at(static_cast<std::size_t>(v)); }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  std::span<const Index> cell(Index c) const;

  double signed_volume(Index c) const;
  CellGeometry cell_geometry(Index c) const;

  /// Sorted vertex indices lying on the box boundary.
  const std::vector<Index>& boundary_vertices() const { return boundary_vertices_; }
  bool is_boundary_vertex(Index v) const { return on_boundary_.at(static_cast<std::size_t>(v)) != 0; }

  std::size_t num_boundary_facets() const { return boundary_facets_.size() / static_cast<std::size_t>(dim_); }
  std::span<const Index> boundary_facet(std::size_t f) const;

 private:
  Mesh() = default;
  void build_boundary_facets();

  int dim_ = 2;
  int n_ = 1;
  Box extent_;
  std::vector<Vec3> vertices_;
  std::vector<Index> cells_;
  std::vector<Index> boundary_vertices_;
  std::vector<char> on_boundary_;
  std::vector<Index> boundary_facets_;
};

}  // namespace gbhe
