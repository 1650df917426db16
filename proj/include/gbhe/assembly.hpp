#pragma once

#include "gbhe/linalg.hpp"
#include "gbhe/quadrature.hpp"
#include "gbhe/space.hpp"

#include <memory>
#include <span>
#include <vector>

namespace gbhe {

/// Coefficients of u_t + alpha u^delta sum_i d_i u - nu Lap u - eta (K * Lap u)
///   = beta u (1 - u^delta)(u^delta - gamma) + f.
struct ProblemCoefficients {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.5;
  int delta = 1;
  double nu = 1.0;
  double eta = 0.0;

  void validate() const;
  bool operator==(const ProblemCoefficients&) const = default;
};

/// c(u) = u (1 - u^delta)(u^delta - gamma) and its derivative.
double reaction_term(double u, double gamma, int delta);
double reaction_derivative(double u, double gamma, int delta);

/// Quadrature degree used for the advection form: 2 delta + 2.
int advection_quadrature_degree(int delta);
/// Quadrature degree used for the reaction form: min(2 (2 delta + 1), 6).
int reaction_quadrature_degree(int delta);

/// Cell-loop assembly of the P1 forms on one function space. All matrices
/// share the vertex-adjacency CSR pattern built at construction.
class Assembler {
 public:
  explicit Assembler(std::shared_ptr<const FunctionSpace> space);

  const FunctionSpace& space() const { return *space_; }
  const std::shared_ptr<const FunctionSpace>& space_ptr() const { return space_; }
  std::size_t n_dofs() const { return space_->n_dofs(); }
  const SparseMatrix& pattern() const { return pattern_; }

  /// (phi_j, phi_i)
  SparseMatrix mass_matrix() const;
  /// (grad phi_j, grad phi_i)
  SparseMatrix stiffness_matrix() const;

  /// b(u, u, phi_i) = (u^delta sum_l d_l u, phi_i).
  std::vector<double> advection_vector(std::span<const double> u, const ProblemCoefficients& coeffs) const;
  /// Derivative of advection_vector with respect to u.
  SparseMatrix advection_jacobian(std::span<const double> u, const ProblemCoefficients& coeffs) const;

  /// (c(u), phi_i).
  std::vector<double> reaction_vector(std::span<const double> u, const ProblemCoefficients& coeffs) const;
  /// (c'(u) phi_j, phi_i).
  SparseMatrix reaction_jacobian(std::span<const double> u, const ProblemCoefficients& coeffs) const;

  /// (f^k, phi_i) with f^k the mean of f over [t_start, t_end], taken by
  /// 2-point Gauss-Legendre in time.
  std::vector<double> load_vector(const SpaceTimeFunction& f, double t_start, double t_end) const;

  /// Spatial quadrature degree used by load_vector.
  static constexpr int kLoadDegree = 5;

  std::vector<double> advection_vector(const FemFunction& u, const ProblemCoefficients& c) const {
    return advection_vector(u.coeffs(), c);
  }
  std::vector<double> reaction_vector(const FemFunction& u, const ProblemCoefficients& c) const {
    return reaction_vector(u.coeffs(), c);
  }
  SparseMatrix advection_jacobian(const FemFunction& u, const ProblemCoefficients& c) const {
    return advection_jacobian(u.coeffs(), c);
  }
  SparseMatrix reaction_jacobian(const FemFunction& u, const ProblemCoefficients& c) const {
    return reaction_jacobian(u.coeffs(), c);
  }

  /// Per-cell geometry cached at construction.
  const CellGeometry& geometry(Index c) const { return geometry_[static_cast<std::size_t>(c)]; }
  /// Rules for degrees 1..6, built at construction.
  const QuadratureRule& rule(int degree) const;

 private:
  std::size_t slot(std::size_t cell, int a, int b) const {
    const auto nv = static_cast<std::size_t>(nv_);
    return slots_[cell * nv * nv + static_cast<std::size_t>(a) * nv + static_cast<std::size_t>(b)];
  }
  void check_length(std::span<const double> u) const;

  std::shared_ptr<const FunctionSpace> space_;
  int nv_;
  SparseMatrix pattern_;
  std::vector<std::size_t> slots_;  // cell-local (a, b) -> position in pattern values
  std::vector<CellGeometry> geometry_;
  std::vector<QuadratureRule> rules_;
};

/// Free-function forms of the same assemblies.
SparseMatrix mass_matrix(std::shared_ptr<const FunctionSpace> space);
SparseMatrix stiffness_matrix(std::shared_ptr<const FunctionSpace> space);
std::vector<double> load_vector(const SpaceTimeFunction& f, std::shared_ptr<const FunctionSpace> space, double t_start,
                                double t_end);

}  // namespace gbhe
