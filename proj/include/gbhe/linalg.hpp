#pragma once

#include "gbhe/mesh.hpp"

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbhe {

/// Compressed sparse row matrix. Column indices are sorted and unique per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<Index> row_offsets, std::vector<Index> col_indices,
               std::vector<double> values);

  struct Triplet {
    Index row;
    Index col;
    double value;
  };
  /// Duplicates are summed.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(std::size_t n);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return col_indices_.size(); }

  const std::vector<Index>& row_offsets() const { return row_offsets_; }
  const std::vector<Index>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Position of entry (i, j) in the value array, or -1 if structurally zero.
  std::ptrdiff_t find(Index i, Index j) const;
  double coeff(Index i, Index j) const;

  /// Same sparsity pattern, all values zero.
  SparseMatrix zeros_like() const;
  bool same_pattern(const SparseMatrix& other) const;

  /// Max |A_ij - A_ji| over the pattern; requires structural symmetry.
  double symmetry_defect() const;

  /// Zero row and column of each listed index and put 1 on the diagonal.
  void eliminate_rows_and_columns(std::span<const Index> indices);

  std::vector<double> diagonal() const;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

/// y = A x.
std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm1(std::span<const double> x);
double norm_inf(std::span<const double> x);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

enum class SolverMethod { Auto, DirectLU, BiCGStab };
enum class Preconditioner { None, Jacobi };

struct LinearSolverConfig {
  SolverMethod method = SolverMethod::Auto;
  double rel_tol = 1e-12;
  int max_iter = 2000;
  Preconditioner preconditioner = Preconditioner::Jacobi;
  /// Auto picks the direct solver up to this many unknowns.
  std::size_t direct_limit = 50000;

  void validate() const;
  SolverMethod resolve(std::size_t n) const;
  bool operator==(const LinearSolverConfig&) const = default;
};

struct SolveReport {
  SolverMethod method = SolverMethod::DirectLU;
  int iterations = 0;
  double residual = 0.0;  // ||A x - b||_2
};

/// Linear solver failure: BiCGStab breakdown or stagnation, or a singular LU pivot.
class LinearSolveError : public std::runtime_error {
 public:
  LinearSolveError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Reusable solver. The direct path keeps the symbolic LU analysis while the
/// sparsity pattern stays the same between calls.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverConfig cfg = {});
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  std::vector<double> solve(const SparseMatrix& a, std::span<const double> b, SolveReport* report = nullptr);
  const LinearSolverConfig& config() const { return cfg_; }

 private:
  struct DirectCache;
  LinearSolverConfig cfg_;
  std::unique_ptr<DirectCache> direct_;
};

std::vector<double> solve(const SparseMatrix& a, std::span<const double> b, const LinearSolverConfig& cfg,
                          SolveReport* report = nullptr);

/// Right-preconditioned BiCGStab; throws LinearSolveError on breakdown or
/// when max_iter is reached above tolerance.
std::vector<double> bicgstab(const SparseMatrix& a, std::span<const double> b, const LinearSolverConfig& cfg,
                             SolveReport* report = nullptr);

}  // namespace gbhe
