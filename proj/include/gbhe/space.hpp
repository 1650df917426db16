#pragma once

#include "gbhe/mesh.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace gbhe {

enum class BoundaryKind { Dirichlet, Neumann };

/// Continuous piecewise-linear (P1) Lagrange space on a simplicial mesh.
/// Degrees of freedom are the mesh vertices.
class FunctionSpace {
 public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, BoundaryKind kind);

  static std::shared_ptr<const FunctionSpace> create(std::shared_ptr<const Mesh> mesh, BoundaryKind kind) {
    return std::make_shared<const FunctionSpace>(std::move(mesh), kind);
  }

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  std::size_t n_dofs() const { return mesh_->num_vertices(); }
  BoundaryKind bc_kind() const { return kind_; }

  /// Sorted constrained vertices; empty for Neumann spaces.
  const std::vector<Index>& dirichlet_dofs() const { return dirichlet_dofs_; }
  bool is_dirichlet(Index dof) const { return constrained_[static_cast<std::size_t>(dof)] != 0; }

  /// Overwrite the constrained entries of a coefficient vector.
  void apply_dirichlet(std::span<double> coeffs, double value = 0.0) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  BoundaryKind kind_;
  std::vector<Index> dirichlet_dofs_;
  std::vector<char> constrained_;
};

/// Nodal coefficient vector of a P1 function.
class FemFunction {
 public:
  explicit FemFunction(std::shared_ptr<const FunctionSpace> space);
  FemFunction(std::shared_ptr<const FunctionSpace> space, std::vector<double> coeffs);

  const FunctionSpace& space() const { return *space_; }
  const std::shared_ptr<const FunctionSpace>& space_ptr() const { return space_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  std::vector<double>& values() { return coeffs_; }
  const std::vector<double>& values() const { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

 private:
  std::shared_ptr<const FunctionSpace> space_;
  std::vector<double> coeffs_;
};

using SpaceTimeFunction = std::function<double(const Vec3&, double)>;

/// Nodal interpolation: coeffs[i] = g(vertex_i, t). Throws on non-finite
/// values, naming the offending vertex.
FemFunction interpolate(const SpaceTimeFunction& g, double t, std::shared_ptr<const FunctionSpace> space);

struct PointValue {
  double value = 0.0;
  Vec3 gradient{0.0, 0.0, 0.0};
};

/// Value at a barycentric point of a cell together with the (cell-constant)
/// gradient.
PointValue eval_in_cell(const FemFunction& f, Index cell, std::span<const double> barycentric);

}  // namespace gbhe
