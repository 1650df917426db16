#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gbhe/assembly.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace gbhe;

namespace {

std::shared_ptr<const FunctionSpace> unit_space(int dim, int n, BoundaryKind kind = BoundaryKind::Dirichlet) {
  return FunctionSpace::create(std::make_shared<const Mesh>(Mesh::structured(dim, n, Box::unit(dim))), kind);
}

Index vertex_at(const Mesh& m, double x, double y) {
  for (Index v = 0; v < static_cast<Index>(m.num_vertices()); ++v)
    if (m.vertex(v)[0] == x && m.vertex(v)[1] == y) return v;
  throw std::logic_error("no such vertex");
}

std::vector<double> random_interior(const FunctionSpace& s, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> c(s.n_dofs());
  for (double& x : c) x = u(rng);
  s.apply_dirichlet(c, 0.0);
  return c;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

/// max_i |J w - (F(u + eps w) - F(u - eps w)) / (2 eps)| / max_i |J w|
template <class F>
double fd_defect(const SparseMatrix& j, const F& f, const std::vector<double>& u, const std::vector<double>& w,
                 double eps = 1e-6) {
  std::vector<double> up(u), um(u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    up[i] += eps * w[i];
    um[i] -= eps * w[i];
  }
  const auto fp = f(up), fm = f(um);
  const auto jw = spmv(j, w);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    err = std::max(err, std::abs(jw[i] - (fp[i] - fm[i]) / (2.0 * eps)));
    scale = std::max(scale, std::abs(jw[i]));
  }
  return err / scale;
}

}  // namespace

TEST_CASE("coefficient validation") {
  ProblemCoefficients c;
  CHECK_NOTHROW(c.validate());
  c.delta = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.gamma = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.nu = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.eta = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("reaction term and its roots") {
  for (int delta : {1, 2, 3}) {
    CHECK(reaction_term(0.0, 0.5, delta) == 0.0);
    CHECK(reaction_term(1.0, 0.5, delta) == 0.0);
    CHECK(std::abs(reaction_term(std::pow(0.5, 1.0 / delta), 0.5, delta)) < 1e-15);
    CHECK(reaction_derivative(0.0, 0.3, delta) == doctest::Approx(-0.3));
    for (double u : {-0.7, 0.2, 0.9, 1.4}) {
      const double h = 1e-6;
      const double fd = (reaction_term(u + h, 0.3, delta) - reaction_term(u - h, 0.3, delta)) / (2 * h);
      CHECK(reaction_derivative(u, 0.3, delta) == doctest::Approx(fd).epsilon(1e-8));
    }
  }
  CHECK(advection_quadrature_degree(1) == 4);
  CHECK(advection_quadrature_degree(2) == 6);
  CHECK(reaction_quadrature_degree(1) == 6);
  CHECK(reaction_quadrature_degree(2) == 6);
}

TEST_CASE("mass matrix") {
  auto s = unit_space(2, 1);
  const SparseMatrix m = mass_matrix(s);
  CHECK(m.symmetry_defect() == 0.0);
  CHECK(sum(m.values()) == doctest::Approx(1.0).epsilon(1e-15));
  const Mesh& mesh = s->mesh();
  // P1 element mass: |T| (1 + delta_ab) / 12. The diagonal corners lie in both
  // triangles, the other two in one.
  const Index v00 = vertex_at(mesh, 0, 0), v11 = vertex_at(mesh, 1, 1), v10 = vertex_at(mesh, 1, 0),
              v01 = vertex_at(mesh, 0, 1);
  CHECK(m.coeff(v00, v00) == doctest::Approx(1.0 / 6.0));
  CHECK(m.coeff(v11, v11) == doctest::Approx(1.0 / 6.0));
  CHECK(m.coeff(v10, v10) == doctest::Approx(1.0 / 12.0));
  CHECK(m.coeff(v00, v11) == doctest::Approx(1.0 / 12.0));
  CHECK(m.coeff(v00, v10) == doctest::Approx(1.0 / 24.0));
  CHECK(m.coeff(v10, v01) == 0.0);

  for (int dim : {2, 3}) {
    auto sp = unit_space(dim, 3);
    const SparseMatrix md = mass_matrix(sp);
    CHECK(sum(md.values()) == doctest::Approx(1.0).epsilon(1e-13));
    // M 1 = int phi_i = (number of incident cells) |T| / (d + 1).
    std::vector<double> lumped(sp->n_dofs(), 0.0);
    for (Index c = 0; c < static_cast<Index>(sp->mesh().num_cells()); ++c)
      for (Index v : sp->mesh().cell(c)) lumped[static_cast<std::size_t>(v)] += sp->mesh().cell_geometry(c).volume / (dim + 1);
    const auto m1 = spmv(md, std::vector<double>(sp->n_dofs(), 1.0));
    for (std::size_t i = 0; i < lumped.size(); ++i) CHECK(m1[i] == doctest::Approx(lumped[i]).epsilon(1e-13));
  }
}

TEST_CASE("stiffness matrix") {
  auto s = unit_space(2, 1);
  const SparseMatrix k = stiffness_matrix(s);
  CHECK(k.symmetry_defect() == 0.0);
  const Mesh& mesh = s->mesh();
  const Index v00 = vertex_at(mesh, 0, 0), v11 = vertex_at(mesh, 1, 1), v10 = vertex_at(mesh, 1, 0),
              v01 = vertex_at(mesh, 0, 1);
  // Sum of the two right-triangle element matrices.
  const std::map<std::pair<Index, Index>, double> expected{
      {{v00, v00}, 1.0},  {{v11, v11}, 1.0},  {{v10, v10}, 1.0},  {{v01, v01}, 1.0},
      {{v00, v10}, -0.5}, {{v00, v01}, -0.5}, {{v11, v10}, -0.5}, {{v11, v01}, -0.5},
      {{v00, v11}, 0.0},  {{v10, v01}, 0.0}};
  for (const auto& [ij, val] : expected) {
    CHECK(k.coeff(ij.first, ij.second) == doctest::Approx(val).epsilon(1e-15));
    CHECK(k.coeff(ij.second, ij.first) == doctest::Approx(val).epsilon(1e-15));
  }
  for (int dim : {2, 3}) {
    const SparseMatrix kd = stiffness_matrix(unit_space(dim, 4));
    CHECK(norm_inf(spmv(kd, std::vector<double>(kd.n_rows(), 1.0))) <= 1e-12);
    CHECK(kd.symmetry_defect() == 0.0);
  }
}

TEST_CASE("Rayleigh quotient of sin(pi x) sin(pi y) approximates 2 pi^2") {
  auto s = unit_space(2, 64);
  const auto u = interpolate(
      [](const Vec3& x, double) { return std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]); }, 0.0,
      s);
  const double rq = dot(u.coeffs(), spmv(stiffness_matrix(s), u.coeffs())) / dot(u.coeffs(), spmv(mass_matrix(s), u.coeffs()));
  CHECK(std::abs(rq / (2.0 * std::numbers::pi * std::numbers::pi) - 1.0) <= 0.01);
}

TEST_CASE("advection vector: constants, hand case, skew identity") {
  ProblemCoefficients c;
  auto s = unit_space(2, 4);
  const Assembler a(s);
  CHECK(norm_inf(a.advection_vector(std::vector<double>(s->n_dofs(), 0.7), c)) <= 1e-15);

  // Hat at (1,1) on the 1x1 mesh: grad sums to 1 in both cells, so
  // b_i = int lambda^delta phi_i, from the Dirichlet integral of barycentrics.
  auto one = unit_space(2, 1);
  const Assembler a1(one);
  const Index v11 = vertex_at(one->mesh(), 1, 1), v00 = vertex_at(one->mesh(), 0, 0), v10 = vertex_at(one->mesh(), 1, 0);
  std::vector<double> hat(4, 0.0);
  hat[static_cast<std::size_t>(v11)] = 1.0;
  c.delta = 1;
  auto b = a1.advection_vector(hat, c);
  CHECK(b[static_cast<std::size_t>(v11)] == doctest::Approx(1.0 / 6.0));
  CHECK(b[static_cast<std::size_t>(v00)] == doctest::Approx(1.0 / 12.0));
  CHECK(b[static_cast<std::size_t>(v10)] == doctest::Approx(1.0 / 24.0));
  c.delta = 2;
  b = a1.advection_vector(hat, c);
  CHECK(b[static_cast<std::size_t>(v11)] == doctest::Approx(0.1));
  CHECK(b[static_cast<std::size_t>(v00)] == doctest::Approx(1.0 / 30.0));
  CHECK(b[static_cast<std::size_t>(v10)] == doctest::Approx(1.0 / 60.0));

  std::mt19937 rng(99);
  for (int dim : {2, 3}) {
    auto sd = unit_space(dim, dim == 2 ? 8 : 4);
    const Assembler ad(sd);
    for (int delta : {1, 2}) {
      c.delta = delta;
      for (int trial = 0; trial < 10; ++trial) {
        const auto u = random_interior(*sd, rng);
        const auto bu = ad.advection_vector(u, c);
        CHECK(std::abs(dot(bu, u)) <= 1e-12 * norm1(bu) * norm_inf(u));
      }
    }
  }
  CHECK_THROWS_AS(a.advection_vector(std::vector<double>(3, 0.0), c), std::invalid_argument);
}

TEST_CASE("advection Jacobian") {
  ProblemCoefficients c;
  auto s = unit_space(2, 4);
  const Assembler a(s);
  for (int delta : {1, 2}) {
    c.delta = delta;
    const SparseMatrix j0 = a.advection_jacobian(std::vector<double>(s->n_dofs(), 0.0), c);
    for (double v : j0.values()) CHECK(v == 0.0);
  }
  // u = const, delta = 1: J w = (c0 sum_l d_l w, phi_i), and on each cell
  // int sum_l d_l w phi_i = (sum_l d_l w)|_T |T| / 3.
  c.delta = 1;
  const double c0 = 0.4;
  std::mt19937 rng(5);
  const auto w = random_interior(*s, rng);
  const auto jw = spmv(a.advection_jacobian(std::vector<double>(s->n_dofs(), c0), c), w);
  std::vector<double> ref(s->n_dofs(), 0.0);
  for (Index cell = 0; cell < static_cast<Index>(s->mesh().num_cells()); ++cell) {
    const auto g = s->mesh().cell_geometry(cell);
    const auto verts = s->mesh().cell(cell);
    double div = 0.0;
    for (int v = 0; v < 3; ++v) div += w[static_cast<std::size_t>(verts[v])] * (g.gradients[v][0] + g.gradients[v][1]);
    for (int v = 0; v < 3; ++v) ref[static_cast<std::size_t>(verts[v])] += c0 * div * g.volume / 3.0;
  }
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(jw[i] == doctest::Approx(ref[i]).epsilon(1e-12));

  for (int delta : {1, 2}) {
    c.delta = delta;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> u(s->n_dofs()), dir(s->n_dofs());
      std::uniform_real_distribution<double> d(-1.0, 1.0);
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = d(rng);
        dir[i] = d(rng);
      }
      const double defect = fd_defect(a.advection_jacobian(u, c), [&](const std::vector<double>& x) { return a.advection_vector(x, c); }, u, dir);
      CHECK(defect <= 1e-6);
    }
  }
}

TEST_CASE("reaction vector and Jacobian") {
  ProblemCoefficients c;
  auto s = unit_space(2, 4, BoundaryKind::Neumann);
  const Assembler a(s);
  const SparseMatrix m = a.mass_matrix();
  for (int delta : {1, 2}) {
    c.delta = delta;
    CHECK(norm_inf(a.reaction_vector(std::vector<double>(s->n_dofs(), 0.0), c)) == 0.0);
    CHECK(norm_inf(a.reaction_vector(std::vector<double>(s->n_dofs(), 1.0), c)) <= 1e-16);
    CHECK(norm_inf(a.reaction_vector(std::vector<double>(s->n_dofs(), std::pow(c.gamma, 1.0 / delta)), c)) <= 1e-15);
    const SparseMatrix j0 = a.reaction_jacobian(std::vector<double>(s->n_dofs(), 0.0), c);
    REQUIRE(j0.same_pattern(m));
    for (std::size_t i = 0; i < m.nnz(); ++i) CHECK(j0.values()[i] == doctest::Approx(-c.gamma * m.values()[i]).epsilon(1e-13));

    std::mt19937 rng(17 + delta);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> u(s->n_dofs()), dir(s->n_dofs());
      std::uniform_real_distribution<double> d(-1.0, 1.0);
      for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = d(rng);
        dir[i] = d(rng);
      }
      const double defect = fd_defect(a.reaction_jacobian(u, c), [&](const std::vector<double>& x) { return a.reaction_vector(x, c); }, u, dir);
      CHECK(defect <= 1e-6);
    }
  }
}

TEST_CASE("load vector") {
  auto s = unit_space(2, 3);
  const Assembler a(s);
  CHECK(norm_inf(a.load_vector([](const Vec3&, double) { return 0.0; }, 0.0, 1.0)) == 0.0);
  const auto m1 = spmv(a.mass_matrix(), std::vector<double>(s->n_dofs(), 1.0));
  const auto f1 = a.load_vector([](const Vec3&, double) { return 1.0; }, 0.0, 0.5);
  for (std::size_t i = 0; i < m1.size(); ++i) CHECK(f1[i] == doctest::Approx(m1[i]).epsilon(1e-14));
  const double dt = 0.1;
  const auto ft = a.load_vector([](const Vec3&, double t) { return t; }, 0.0, dt);
  for (std::size_t i = 0; i < m1.size(); ++i) CHECK(ft[i] == doctest::Approx(dt / 2.0 * m1[i]).epsilon(1e-13));
  // Linear in space: exact with the degree-5 rule; compare against the mass matrix action on the interpolant.
  const auto fx = a.load_vector([](const Vec3& x, double) { return 2.0 * x[0] - x[1]; }, 0.0, 1.0);
  const auto ix = interpolate([](const Vec3& x, double) { return 2.0 * x[0] - x[1]; }, 0.0, s);
  const auto mx = spmv(a.mass_matrix(), ix.coeffs());
  for (std::size_t i = 0; i < m1.size(); ++i) CHECK(fx[i] == doctest::Approx(mx[i]).epsilon(1e-13));
  CHECK_THROWS_AS(a.load_vector([](const Vec3&, double) { return 1.0; }, 1.0, 1.0), std::invalid_argument);
}
