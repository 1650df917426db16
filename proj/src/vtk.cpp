#include "gbhe/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gbhe {

void write_vtk(const Mesh& mesh, std::span<const VtkField> fields, const std::string& path) {
  const std::size_t nv = mesh.num_vertices();
  for (const auto& f : fields) {
    if (f.name.empty() || f.name.find_first_of(" \t\n") != std::string::npos)
      throw std::invalid_argument("write_vtk: invalid field name '" + f.name + "'");
    if (f.values.size() != nv)
      throw std::invalid_argument("write_vtk: field '" + f.name + "' has " + std::to_string(f.values.size()) +
                                  " values for " + std::to_string(nv) + " points");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open '" + path + "' for writing");

  char buf[96];
  out << "# vtk DataFile Version 3.0\ngbhe\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " float\n";
  for (std::size_t i = 0; i < nv; ++i) {
    const Vec3& x = mesh.vertex(static_cast<Index>(i));
    std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", x[0], x[1], x[2]);
    out << buf;
  }
  const std::size_t nc = mesh.num_cells();
  const int nodes = mesh.dim() + 1;
  out << "CELLS " << nc << ' ' << nc * static_cast<std::size_t>(nodes + 1) << '\n';
  for (std::size_t c = 0; c < nc; ++c) {
    out << nodes;
    for (Index v : mesh.cell(static_cast<Index>(c))) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  const char* type = mesh.dim() == 2 ? "5\n" : "10\n";
  for (std::size_t c = 0; c < nc; ++c) out << type;
  if (!fields.empty()) {
    out << "POINT_DATA " << nv << '\n';
    for (const auto& f : fields) {
      out << "SCALARS " << f.name << " float 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) {
        std::snprintf(buf, sizeof buf, "%.9g\n", v);
        out << buf;
      }
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("write_vtk: write to '" + path + "' failed");
}

void write_vtk(const Mesh& mesh, const std::vector<std::pair<std::string, const FemFunction*>>& fields,
               const std::string& path) {
  std::vector<VtkField> views;
  views.reserve(fields.size());
  for (const auto& [name, f] : fields) views.push_back({name, f->coeffs()});
  write_vtk(mesh, views, path);
}

}  // namespace gbhe
