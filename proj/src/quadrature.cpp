#include "gbhe/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace gbhe {

LineRule gauss_jacobi_unit(int n_points, int a) {
  if (n_points < 1) throw std::invalid_argument("gauss_jacobi_unit: need at least one point");
  if (a < 0) throw std::invalid_argument("gauss_jacobi_unit: exponent must be nonnegative");

  // Golub-Welsch on [-1, 1] with weight (1 - x)^a, then mapped to [0, 1].
  const double al = a, be = 0.0;
  Eigen::VectorXd diag(n_points), sub(std::max(n_points - 1, 1));
  for (int k = 0; k < n_points; ++k) {
    const double s = 2.0 * k + al + be;
    diag(k) = (k == 0) ? (be - al) / (al + be + 2.0) : (be * be - al * al) / (s * (s + 2.0));
  }
  for (int k = 1; k < n_points; ++k) {
    const double s = 2.0 * k + al + be;
    const double b = 4.0 * k * (k + al) * (k + be) * (k + al + be) / (s * s * (s + 1.0) * (s - 1.0));
    sub(k - 1) = std::sqrt(b);
  }
  const double mu0 = std::pow(2.0, al + be + 1.0) * std::tgamma(al + 1.0) * std::tgamma(be + 1.0) /
                     std::tgamma(al + be + 2.0);

  LineRule rule;
  rule.points.resize(static_cast<std::size_t>(n_points));
  rule.weights.resize(static_cast<std::size_t>(n_points));
  if (n_points == 1) {
    rule.points[0] = 0.5 * (diag(0) + 1.0);
    rule.weights[0] = mu0 * std::pow(0.5, al + 1.0);
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub.head(n_points - 1), Eigen::ComputeEigenvectors);
  const double scale = std::pow(0.5, al + 1.0);
  for (int k = 0; k < n_points; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    rule.points[static_cast<std::size_t>(k)] = 0.5 * (eig.eigenvalues()(k) + 1.0);
    rule.weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0 * scale;
  }
  return rule;
}

QuadratureRule simplex_quadrature(int dim, int degree) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("simplex_quadrature: dimension must be 2 or 3");
  if (degree < 1 || degree > 6)
    throw std::invalid_argument("simplex_quadrature: unsupported degree " + std::to_string(degree) +
                                " (supported: 1..6)");
  const int q = (degree + 2) / 2;  // 2q - 1 >= degree
  QuadratureRule rule;
  rule.dim = dim;
  rule.exactness_degree = 2 * q - 1;

  const LineRule r0 = gauss_jacobi_unit(q, 0);
  const LineRule r1 = gauss_jacobi_unit(q, 1);
  if (dim == 2) {
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        const double xi = r0.points[i], eta = r1.points[j];
        const double x = xi * (1.0 - eta), y = eta;
        rule.points.push_back({1.0 - x - y, x, y, 0.0});
        rule.weights.push_back(r0.weights[i] * r1.weights[j]);
      }
    return rule;
  }
  const LineRule r2 = gauss_jacobi_unit(q, 2);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int k = 0; k < q; ++k) {
        const double xi = r0.points[i], eta = r1.points[j], zeta = r2.points[k];
        const double x = xi * (1.0 - eta) * (1.0 - zeta), y = eta * (1.0 - zeta), z = zeta;
        rule.points.push_back({1.0 - x - y - z, x, y, z});
        rule.weights.push_back(r0.weights[i] * r1.weights[j] * r2.weights[k]);
      }
  return rule;
}

}  // namespace gbhe
