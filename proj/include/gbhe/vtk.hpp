#pragma once

#include "gbhe/mesh.hpp"
#include "gbhe/space.hpp"

#include <span>
#include <string>
#include <vector>

namespace gbhe {

struct VtkField {
  std::string name;
  std::span<const double> values;  // one per vertex
};

/// Legacy ASCII VTK unstructured grid with nodal scalar fields. Field names
/// must be nonempty and free of whitespace. Throws std::runtime_error naming
/// the path when the file cannot be written.
void write_vtk(const Mesh& mesh, std::span<const VtkField> fields, const std::string& path);
void write_vtk(const Mesh& mesh, const std::vector<std::pair<std::string, const FemFunction*>>& fields,
               const std::string& path);

}  // namespace gbhe
