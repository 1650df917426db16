#pragma once

#include <array>
#include <vector>

namespace gbhe {

/// Quadrature on the reference simplex. Points are barycentric coordinates
/// (lambda_0, ..., lambda_d); weights sum to the reference volume 1/d!.
struct QuadratureRule {
  int dim = 2;
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;
  int exactness_degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Positive-weight rule exact for polynomials of total degree <= `degree`.
/// Supported degrees are 1 through 6. Built as a collapsed (Duffy) product of
/// Gauss-Jacobi rules; degree 1 reduces to the centroid rule.
QuadratureRule simplex_quadrature(int dim, int degree);

/// Gauss-Jacobi rule on [0, 1] for the weight (1 - x)^a, a >= 0 integer.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};
LineRule gauss_jacobi_unit(int n_points, int a);
inline LineRule gauss_legendre_unit(int n_points) { return gauss_jacobi_unit(n_points, 0); }

}  // namespace gbhe
