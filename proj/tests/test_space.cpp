#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gbhe/quadrature.hpp"
#include "gbhe/space.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace gbhe;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

/// Dirichlet integral over the reference simplex:
/// int prod lambda_i^{a_i} = prod a_i! / (sum a_i + d)!.
double dirichlet_integral(const std::array<int, 4>& a, int dim) {
  double num = 1.0;
  int total = 0;
  for (int i = 0; i <= dim; ++i) {
    num *= factorial(a[i]);
    total += a[i];
  }
  return num / factorial(total + dim);
}

double apply_rule(const QuadratureRule& q, const std::array<int, 4>& a) {
  double s = 0.0;
  for (std::size_t p = 0; p < q.size(); ++p) {
    double v = q.weights[p];
    for (int i = 0; i <= q.dim; ++i) v *= std::pow(q.points[p][i], a[i]);
    s += v;
  }
  return s;
}

}  // namespace

TEST_CASE("centroid rule") {
  const QuadratureRule q = simplex_quadrature(2, 1);
  REQUIRE(q.size() == 1);
  CHECK(q.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  for (int i = 0; i < 3; ++i) CHECK(q.points[0][i] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("x^2 y^2 over the reference triangle is 1/180") {
  const QuadratureRule q = simplex_quadrature(2, 4);
  CHECK(std::abs(apply_rule(q, {0, 2, 2, 0}) - 1.0 / 180.0) <= 1e-14);
}

TEST_CASE("weights are positive, sum to the reference volume, and reach the exactness degree") {
  for (int dim : {2, 3}) {
    for (int deg = 1; deg <= 6; ++deg) {
      const QuadratureRule q = simplex_quadrature(dim, deg);
      CHECK(q.exactness_degree >= deg);
      double sum = 0.0;
      for (double w : q.weights) {
        CHECK(w > 0.0);
        sum += w;
      }
      CHECK(std::abs(sum - (dim == 2 ? 0.5 : 1.0 / 6.0)) <= 1e-14);
      for (const auto& p : q.points) {
        double s = 0.0;
        for (int i = 0; i <= dim; ++i) {
          CHECK(p[i] >= 0.0);
          s += p[i];
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
      }
      // Every barycentric monomial of total degree <= exactness.
      const int e = q.exactness_degree;
      for (int a0 = 0; a0 <= e; ++a0)
        for (int a1 = 0; a0 + a1 <= e; ++a1)
          for (int a2 = 0; a0 + a1 + a2 <= e; ++a2)
            for (int a3 = 0; a0 + a1 + a2 + a3 <= e; ++a3) {
              if (dim == 2 && a3 > 0) continue;
              const std::array<int, 4> a{a0, a1, a2, a3};
              CHECK(std::abs(apply_rule(q, a) - dirichlet_integral(a, dim)) <= 1e-12);
            }
    }
  }
  CHECK(simplex_quadrature(3, 2).weights.size() >= 1);
}

TEST_CASE("unsupported degrees throw") {
  CHECK_THROWS_AS(simplex_quadrature(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(simplex_quadrature(2, 7), std::invalid_argument);
  CHECK_THROWS_AS(simplex_quadrature(4, 2), std::invalid_argument);
}

TEST_CASE("Gauss-Jacobi line rules integrate polynomials against (1-x)^a") {
  for (int a : {0, 1, 2}) {
    const LineRule r = gauss_jacobi_unit(4, a);
    for (int p = 0; p <= 7; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.points.size(); ++i) s += r.weights[i] * std::pow(r.points[i], p);
      // Beta(p+1, a+1)
      const double exact = factorial(p) * factorial(a) / factorial(p + a + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

namespace {
std::shared_ptr<const FunctionSpace> unit_space(int dim, int n, BoundaryKind kind = BoundaryKind::Dirichlet) {
  return FunctionSpace::create(std::make_shared<const Mesh>(Mesh::structured(dim, n, Box::unit(dim))), kind);
}
}  // namespace

TEST_CASE("Dirichlet bookkeeping") {
  auto d = unit_space(2, 4);
  CHECK(d->n_dofs() == 25);
  CHECK(d->dirichlet_dofs().size() == 16);
  for (Index v : d->dirichlet_dofs()) CHECK(d->mesh().is_boundary_vertex(v));
  auto n = unit_space(2, 4, BoundaryKind::Neumann);
  CHECK(n->dirichlet_dofs().empty());

  std::vector<double> c(d->n_dofs(), 3.0);
  d->apply_dirichlet(c, 0.25);
  for (Index v = 0; v < 25; ++v) CHECK(c[static_cast<std::size_t>(v)] == (d->is_dirichlet(v) ? 0.25 : 3.0));
}

TEST_CASE("interpolation") {
  auto s = unit_space(2, 4);
  const auto zero = interpolate([](const Vec3&, double) { return 0.0; }, 0.0, s);
  for (double v : zero.values()) CHECK(v == 0.0);

  const auto sines = interpolate(
      [](const Vec3& x, double) { return std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]); },
      0.0, s);
  for (Index v = 0; v < static_cast<Index>(s->n_dofs()); ++v) {
    const Vec3& x = s->mesh().vertex(v);
    if (x[0] == 0.5 && x[1] == 0.5) CHECK(sines[static_cast<std::size_t>(v)] == doctest::Approx(1.0).epsilon(1e-15));
    if (s->mesh().is_boundary_vertex(v)) CHECK(std::abs(sines[static_cast<std::size_t>(v)]) < 1e-15);
  }

  const auto timed = interpolate([](const Vec3& x, double t) { return x[0] + t; }, 2.0, s);
  CHECK(timed[0] == doctest::Approx(s->mesh().vertex(0)[0] + 2.0));

  const auto bad = [](const Vec3& x, double) {
    return x[0] == 1.0 && x[1] == 1.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  };
  CHECK_THROWS_AS(interpolate(bad, 0.0, s), std::domain_error);
  try {
    interpolate(bad, 0.0, s);
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("vertex") != std::string::npos);
  }
}

TEST_CASE("FemFunction length must match the space") {
  auto s = unit_space(2, 2);
  CHECK_THROWS_AS(FemFunction(s, std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST_CASE("eval_in_cell") {
  for (int dim : {2, 3}) {
    auto s = unit_space(dim, 3, BoundaryKind::Neumann);
    const FemFunction c = interpolate([](const Vec3&, double) { return 2.5; }, 0.0, s);
    const FemFunction lin = interpolate([](const Vec3& x, double) { return x[0]; }, 0.0, s);
    const FemFunction aff =
        interpolate([](const Vec3& x, double) { return 1.0 + 2.0 * x[0] - 3.0 * x[1] + 0.5 * x[2]; }, 0.0, s);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (Index cell = 0; cell < static_cast<Index>(s->mesh().num_cells()); ++cell) {
      std::array<double, 4> b{};
      double sum = 0.0;
      for (int i = 0; i <= dim; ++i) sum += (b[i] = u(rng));
      for (int i = 0; i <= dim; ++i) b[i] /= sum;
      const std::span<const double> bary(b.data(), static_cast<std::size_t>(dim + 1));

      const PointValue pc = eval_in_cell(c, cell, bary);
      CHECK(pc.value == doctest::Approx(2.5));
      for (double g : pc.gradient) CHECK(std::abs(g) < 1e-12);

      const PointValue pl = eval_in_cell(lin, cell, bary);
      CHECK(pl.gradient[0] == doctest::Approx(1.0));
      CHECK(std::abs(pl.gradient[1]) < 1e-12);

      // Affine reproduction: value at the mapped point and exact gradient.
      Vec3 x{0.0, 0.0, 0.0};
      const auto verts = s->mesh().cell(cell);
      for (int a = 0; a <= dim; ++a)
        for (int i = 0; i < 3; ++i) x[i] += b[a] * s->mesh().vertex(verts[a])[i];
      const PointValue pa = eval_in_cell(aff, cell, bary);
      CHECK(pa.value == doctest::Approx(1.0 + 2.0 * x[0] - 3.0 * x[1] + 0.5 * x[2]));
      CHECK(pa.gradient[0] == doctest::Approx(2.0));
      CHECK(pa.gradient[1] == doctest::Approx(-3.0));
      CHECK(pa.gradient[2] == doctest::Approx(dim == 3 ? 0.5 : 0.0));
    }
  }
  // Hat function at its own vertex.
  auto s = unit_space(2, 2, BoundaryKind::Neumann);
  FemFunction hat(s);
  const Index cell = 3;
  const Index v = s->mesh().cell(cell)[1];
  hat[static_cast<std::size_t>(v)] = 1.0;
  const double at_vertex[] = {0.0, 1.0, 0.0};
  CHECK(eval_in_cell(hat, cell, at_vertex).value == 1.0);
}

TEST_CASE("Applying constraints then evaluating at boundary vertices gives the prescribed value") {
  auto s = unit_space(3, 2);
  FemFunction f = interpolate([](const Vec3& x, double) { return 1.0 + x[0]; }, 0.0, s);
  s->apply_dirichlet(f.coeffs(), 0.0);
  for (Index cell = 0; cell < static_cast<Index>(s->mesh().num_cells()); ++cell) {
    const auto verts = s->mesh().cell(cell);
    for (int a = 0; a < 4; ++a) {
      if (!s->is_dirichlet(verts[a])) continue;
      std::array<double, 4> b{};
      b[static_cast<std::size_t>(a)] = 1.0;
      CHECK(eval_in_cell(f, cell, b).value == 0.0);
    }
  }
}
