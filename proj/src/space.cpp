#include "gbhe/space.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gbhe {

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, BoundaryKind kind)
    : mesh_(std::move(mesh)), kind_(kind) {
  if (!mesh_) throw std::invalid_argument("FunctionSpace: null mesh");
  constrained_.assign(mesh_->num_vertices(), 0);
  if (kind_ == BoundaryKind::Dirichlet) {
    dirichlet_dofs_ = mesh_->boundary_vertices();
    for (Index v : dirichlet_dofs_) constrained_[static_cast<std::size_t>(v)] = 1;
  }
}

void FunctionSpace::apply_dirichlet(std::span<double> coeffs, double value) const {
  if (coeffs.size() != n_dofs()) throw std::invalid_argument("apply_dirichlet: length does not match n_dofs");
  for (Index v : dirichlet_dofs_) coeffs[static_cast<std::size_t>(v)] = value;
}

FemFunction::FemFunction(std::shared_ptr<const FunctionSpace> space)
    : space_(std::move(space)), coeffs_(space_->n_dofs(), 0.0) {}

FemFunction::FemFunction(std::shared_ptr<const FunctionSpace> space, std::vector<double> coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_->n_dofs())
    throw std::invalid_argument("FemFunction: coefficient length does not match n_dofs");
}

FemFunction interpolate(const SpaceTimeFunction& g, double t, std::shared_ptr<const FunctionSpace> space) {
  FemFunction f(space);
  const Mesh& mesh = space->mesh();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3& x = mesh.vertex(static_cast<Index>(v));
    const double value = g(x, t);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "interpolate: non-finite value " << value << " at vertex " << v << " (" << x[0] << ", " << x[1];
      if (mesh.dim() == 3) msg << ", " << x[2];
      msg << "), t = " << t;
      throw std::domain_error(msg.str());
    }
    f[v] = value;
  }
  return f;
}

PointValue eval_in_cell(const FemFunction& f, Index cell, std::span<const double> barycentric) {
  const Mesh& mesh = f.space().mesh();
  auto cv = mesh.cell(cell);
  if (barycentric.size() < cv.size()) throw std::invalid_argument("eval_in_cell: too few barycentric coordinates");
  const CellGeometry geo = mesh.cell_geometry(cell);
  PointValue out;
  for (std::size_t l = 0; l < cv.size(); ++l) {
    const double c = f[static_cast<std::size_t>(cv[l])];
    out.value += barycentric[l] * c;
    for (int a = 0; a < 3; ++a) out.gradient[a] += c * geo.gradients[l][a];
  }
  return out;
}

}  // namespace gbhe
