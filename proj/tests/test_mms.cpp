#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gbhe/mms.hpp"
#include "mms_residual.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

using namespace gbhe;

TEST_CASE("case registry") {
  CHECK(case_names().size() == 6);
  for (const auto& n : case_names()) {
    const ManufacturedCase c = make_case(n);
    CHECK(c.name() == n);
    CHECK(c.dim() == (n.ends_with("3d") ? 3 : 2));
  }
  CHECK(make_case("singular-threehalves-2d").frequency() == 2);
  CHECK(make_case("singular-cubic-2d").frequency() == 1);
  CHECK(make_case("smooth-exp-2d").kernel() == KernelSpec::exponential(1.0));
  CHECK(make_case("singular-cubic-3d").kernel() == KernelSpec::power_law(0.5));
  CHECK_THROWS_AS(make_case("smooth-exp-4d"), std::invalid_argument);
  CHECK_THROWS_AS(make_case("nope"), std::invalid_argument);
}

TEST_CASE("exact values at the centre and on the boundary") {
  CHECK(make_case("smooth-exp-2d").exact({0.5, 0.5, 0.0}, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& n : case_names()) {
    const ManufacturedCase c = make_case(n);
    for (int trial = 0; trial < 10; ++trial) {
      Vec3 x{u(rng), u(rng), c.dim() == 3 ? u(rng) : 0.0};
      x[static_cast<std::size_t>(trial % c.dim())] = (trial % 2) ? 1.0 : 0.0;
      CHECK(std::abs(c.exact(x, u(rng))) <= 1e-15);
    }
  }
}

TEST_CASE("gradient matches central differences") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (const auto& n : case_names()) {
    const ManufacturedCase c = make_case(n);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec3 x{u(rng), u(rng), c.dim() == 3 ? u(rng) : 0.0};
      const double t = u(rng);
      const Vec3 g = c.exact_gradient(x, t);
      double scale = 0.0;
      for (double v : g) scale = std::max(scale, std::abs(v));
      for (int i = 0; i < c.dim(); ++i) {
        const double h = 1e-6;
        Vec3 xp = x, xm = x;
        xp[static_cast<std::size_t>(i)] += h;
        xm[static_cast<std::size_t>(i)] -= h;
        const double fd = (c.exact(xp, t) - c.exact(xm, t)) / (2 * h);
        CHECK(std::abs(g[static_cast<std::size_t>(i)] - fd) <= 1e-7 * std::max(scale, 1e-3));
      }
    }
  }
}

TEST_CASE("eta = 0 forcing equals the symbolic oracle") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& n : case_names()) {
    const ManufacturedCase c = make_case(n);  // default eta = 0
    for (int trial = 0; trial < 20; ++trial) {
      const std::array<double, 3> x{u(rng), u(rng), c.dim() == 3 ? u(rng) : 0.0};
      const double t = u(rng);
      const oracle::Derivs d = oracle::derivs(n, x, t);
      double div = 0.0;
      for (int i = 0; i < c.dim(); ++i) div += d.grad[static_cast<std::size_t>(i)];
      const auto& k = c.coeffs();
      const double f = d.u_t + k.alpha * d.u * div - k.nu * d.lap - k.beta * reaction_term(d.u, k.gamma, k.delta);
      CHECK(std::abs(c.forcing(x, t) - f) <= 1e-10 * std::max(1.0, std::abs(f)));
    }
  }
}

TEST_CASE("three-halves forcing vanishes at t = 0") {
  for (const char* n : {"singular-threehalves-2d", "singular-threehalves-3d"}) {
    ProblemCoefficients k;
    k.eta = 1.0;
    const ManufacturedCase c = make_case(n, k);
    CHECK(c.forcing({0.3, 0.6, 0.2}, 0.0) == 0.0);
    CHECK(c.memory_factor(0.0) == 0.0);
  }
}

TEST_CASE("memory factors use the closed forms") {
  // {1/sqrt t} * {t^3/2} = (3 pi / 8) t^2.
  const ManufacturedCase th = make_case("singular-threehalves-2d");
  CHECK(th.memory_factor(0.6) == doctest::Approx(3.0 * M_PI / 8.0 * 0.36).epsilon(1e-14));
  CHECK_FALSE(th.numeric_memory());
  // {e^-t} * {e^-t} = t e^-t.
  const ManufacturedCase se = make_case("smooth-exp-3d");
  CHECK(se.memory_factor(0.8) == doctest::Approx(0.8 * std::exp(-0.8)).epsilon(1e-14));
  // Power-law kernel with exponential decay has no closed form: numeric path.
  const ManufacturedCase mixed("mixed", 2, 1, TemporalFactor::ExpDecay, KernelSpec::power_law(0.5), {});
  CHECK(mixed.numeric_memory());
  CHECK(mixed.memory_factor(0.5) > 0.0);
}

TEST_CASE("PDE residual of every case with memory is below 1e-9") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (const auto& n : case_names()) {
    for (int delta : {1, 2}) {
      ProblemCoefficients k;
      k.eta = 1.0;
      k.delta = delta;
      const ManufacturedCase c = make_case(n, k);
      for (int trial = 0; trial < 10; ++trial) {
        const std::array<double, 3> x{u(rng), u(rng), c.dim() == 3 ? u(rng) : 0.0};
        CHECK(std::abs(oracle::pde_residual(c, x, u(rng))) <= 1e-9);
      }
    }
  }
}

TEST_CASE("forcing is affine in eta") {
  ProblemCoefficients k;
  k.eta = 0.7;
  for (const auto& n : case_names()) {
    const ManufacturedCase with = make_case(n, k);
    const ManufacturedCase without = make_case(n);
    const Vec3 x{0.3, 0.45, 0.8};
    for (double t : {0.1, 0.5, 1.0}) {
      CHECK(with.forcing(x, t) - without.forcing(x, t) == doctest::Approx(with.memory_forcing(x, t)).epsilon(1e-12));
      CHECK(with.memory_forcing(x, t) ==
            doctest::Approx(-0.7 * with.memory_factor(t) * with.laplacian_factor() * with.spatial(x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("time factors and derivatives") {
  const ManufacturedCase c = make_case("singular-cubic-2d");
  CHECK(c.time_factor(0.0) == 1.0);
  CHECK(c.time_factor(2.0) == doctest::Approx(5.0));
  CHECK(c.time_derivative(2.0) == doctest::Approx(8.0));
  const ManufacturedCase h = make_case("singular-threehalves-3d");
  CHECK(h.laplacian_factor() == doctest::Approx(-3.0 * 4.0 * M_PI * M_PI));
  CHECK(h.time_derivative(0.25) == doctest::Approx(0.75));
}
