#include "gbhe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gbhe {

namespace {

double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double lattice_coordinate(double low, double high, int i, int n) {
  if (i == n) return high;
  return low + (high - low) * static_cast<double>(i) / static_cast<double>(n);
}

}  // namespace

Box Box::unit(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("Box: dimension must be 2 or 3");
  Box b;
  b.dim = dim;
  b.low = {0.0, 0.0, 0.0};
  b.high = {1.0, 1.0, dim == 3 ? 1.0 : 0.0};
  return b;
}

Box Box::square(double side) {
  Box b = unit(2);
  b.high = {side, side, 0.0};
  return b;
}

double Box::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= high[a] - low[a];
  return v;
}

Mesh Mesh::structured(int dim, int n, const Box& extent) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("structured mesh: dimension must be 2 or 3");
  if (n < 1) throw std::invalid_argument("structured mesh: need at least one cell per side, got " + std::to_string(n));
  if (extent.dim != dim) throw std::invalid_argument("structured mesh: extent dimension does not match");
  for (int a = 0; a < dim; ++a) {
    if (!(extent.low[a] < extent.high[a]) || !std::isfinite(extent.low[a]) || !std::isfinite(extent.high[a])) {
      throw std::invalid_argument("structured mesh: degenerate extent along axis " + std::to_string(a));
    }
  }

  Mesh m;
  m.dim_ = dim;
  m.n_ = n;
  m.extent_ = extent;
  const int np = n + 1;

  if (dim == 2) {
    m.vertices_.reserve(static_cast<std::size_t>(np) * np);
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        m.vertices_.push_back({lattice_coordinate(extent.low[0], extent.high[0], i, n),
                               lattice_coordinate(extent.low[1], extent.high[1], j, n), 0.0});
    auto id = [np](int i, int j) { return static_cast<Index>(i + np * j); };
    m.cells_.reserve(static_cast<std::size_t>(6) * n * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Index v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
        m.cells_.insert(m.cells_.end(), {v00, v10, v11});
        m.cells_.insert(m.cells_.end(), {v00, v11, v01});
      }
  } else {
    m.vertices_.reserve(static_cast<std::size_t>(np) * np * np);
    for (int k = 0; k < np; ++k)
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i)
          m.vertices_.push_back({lattice_coordinate(extent.low[0], extent.high[0], i, n),
                                 lattice_coordinate(extent.low[1], extent.high[1], j, n),
                                 lattice_coordinate(extent.low[2], extent.high[2], k, n)});
    auto id = [np](int i, int j, int k) { return static_cast<Index>(i + np * (j + np * k)); };
    static constexpr std::array<std::array<int, 3>, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    m.cells_.reserve(static_cast<std::size_t>(24) * n * n * n);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          for (const auto& p : perms) {
            std::array<int, 3> c{i, j, k};
            std::array<Index, 4> tet{};
            tet[0] = id(c[0], c[1], c[2]);
            for (int s = 0; s < 3; ++s) {
              ++c[p[s]];
              tet[s + 1] = id(c[0], c[1], c[2]);
            }
            const Vec3& x0 = m.vertices_[tet[0]];
            if (det3(sub(m.vertices_[tet[1]], x0), sub(m.vertices_[tet[2]], x0), sub(m.vertices_[tet[3]], x0)) < 0.0)
              std::swap(tet[2], tet[3]);
            m.cells_.insert(m.cells_.end(), tet.begin(), tet.end());
          }
  }

  m.on_boundary_.assign(m.vertices_.size(), 0);
  for (std::size_t v = 0; v < m.vertices_.size(); ++v) {
    for (int a = 0; a < dim; ++a) {
      if (m.vertices_[v][a] == extent.low[a] || m.vertices_[v][a] == extent.high[a]) {
        m.on_boundary_[v] = 1;
        m.boundary_vertices_.push_back(static_cast<Index>(v));
        break;
      }
    }
  }
  m.build_boundary_facets();
  return m;
}

double Mesh::h() const { return (extent_.high[0] - extent_.low[0]) / static_cast<double>(n_); }

std::span<const Index> Mesh::cell(Index c) const {
  const auto nv = static_cast<std::size_t>(dim_ + 1);
  if (c < 0 || static_cast<std::size_t>(c) >= num_cells()) throw std::out_of_range("cell index out of range");
  return {cells_.data() + static_cast<std::size_t>(c) * nv, nv};
}

std::span<const Index> Mesh::boundary_facet(std::size_t f) const {
  const auto nv = static_cast<std::size_t>(dim_);
  if (f >= num_boundary_facets()) throw std::out_of_range("boundary facet index out of range");
  return {boundary_facets_.data() + f * nv, nv};
}

double Mesh::signed_volume(Index c) const {
  auto cv = cell(c);
  const Vec3& x0 = vertices_[cv[0]];
  if (dim_ == 2) {
    const Vec3 a = sub(vertices_[cv[1]], x0), b = sub(vertices_[cv[2]], x0);
    return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  }
  return det3(sub(vertices_[cv[1]], x0), sub(vertices_[cv[2]], x0), sub(vertices_[cv[3]], x0)) / 6.0;
}

CellGeometry Mesh::cell_geometry(Index c) const {
  auto cv = cell(c);
  CellGeometry g;
  const Vec3& x0 = vertices_[cv[0]];
  if (dim_ == 2) {
    const Vec3 a = sub(vertices_[cv[1]], x0), b = sub(vertices_[cv[2]], x0);
    const double det = a[0] * b[1] - a[1] * b[0];
    g.volume = 0.5 * det;
    // Rows of the inverse Jacobian are the gradients of lambda_1, lambda_2.
    g.gradients[1] = {b[1] / det, -b[0] / det, 0.0};
    g.gradients[2] = {-a[1] / det, a[0] / det, 0.0};
    g.gradients[0] = {-g.gradients[1][0] - g.gradients[2][0], -g.gradients[1][1] - g.gradients[2][1], 0.0};
    return g;
  }
  const Vec3 a = sub(vertices_[cv[1]], x0), b = sub(vertices_[cv[2]], x0), d = sub(vertices_[cv[3]], x0);
  const double det = det3(a, b, d);
  g.volume = det / 6.0;
  // Inverse of [a b d] (columns): rows are cross products over the determinant.
  auto cross = [](const Vec3& u, const Vec3& v) {
    return Vec3{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  };
  const Vec3 r1 = cross(b, d), r2 = cross(d, a), r3 = cross(a, b);
  for (int k = 0; k < 3; ++k) {
    g.gradients[1][k] = r1[k] / det;
    g.gradients[2][k] = r2[k] / det;
    g.gradients[3][k] = r3[k] / det;
    g.gradients[0][k] = -(g.gradients[1][k] + g.gradients[2][k] + g.gradients[3][k]);
  }
  return g;
}

void Mesh::build_boundary_facets() {
  struct FacetRecord {
    std::array<Index, 3> key;
    Index cell;
    int opposite;
  };
  const int nv = dim_ + 1;
  std::vector<FacetRecord> records;
  records.reserve(num_cells() * static_cast<std::size_t>(nv));
  for (std::size_t c = 0; c < num_cells(); ++c) {
    auto cv = cell(static_cast<Index>(c));
    for (int opp = 0; opp < nv; ++opp) {
      FacetRecord r{{-1, -1, -1}, static_cast<Index>(c), opp};
      int s = 0;
      for (int l = 0; l < nv; ++l)
        if (l != opp) r.key[s++] = cv[l];
      std::sort(r.key.begin(), r.key.begin() + dim_);
      records.push_back(r);
    }
  }
  std::sort(records.begin(), records.end(), [](const FacetRecord& x, const FacetRecord& y) { return x.key < y.key; });

  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i + 1;
    while (j < records.size() && records[j].key == records[i].key) ++j;
    if (j - i > 2) throw std::logic_error("mesh: facet shared by more than two cells");
    if (j - i == 1) {
      const FacetRecord& r = records[i];
      std::array<Index, 3> f = r.key;
      const Vec3& p = vertices_[cell(r.cell)[r.opposite]];
      const Vec3& x0 = vertices_[f[0]];
      double side;
      if (dim_ == 2) {
        const Vec3 e = sub(vertices_[f[1]], x0);
        const Vec3 normal{e[1], -e[0], 0.0};
        const Vec3 q = sub(p, x0);
        side = normal[0] * q[0] + normal[1] * q[1];
      } else {
        side = det3(sub(vertices_[f[1]], x0), sub(vertices_[f[2]], x0), sub(p, x0));
      }
      // The opposite vertex must lie on the inner side of the facet normal.
      if (side > 0.0) std::swap(f[0], f[1]);
      boundary_facets_.insert(boundary_facets_.end(), f.begin(), f.begin() + dim_);
    }
    i = j;
  }
}

}  // namespace gbhe
