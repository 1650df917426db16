#include "gbhe/linalg.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gbhe {

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<Index> row_offsets,
                           std::vector<Index> col_indices, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != n_rows_ + 1 || row_offsets_.front() != 0 ||
      static_cast<std::size_t>(row_offsets_.back()) != col_indices_.size() || values_.size() != col_indices_.size())
    throw std::invalid_argument("SparseMatrix: inconsistent CSR arrays");
  for (std::size_t i = 0; i < n_rows_; ++i) {
    if (row_offsets_[i + 1] < row_offsets_[i]) throw std::invalid_argument("SparseMatrix: row offsets not monotone");
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const Index c = col_indices_[p];
      if (c < 0 || static_cast<std::size_t>(c) >= n_cols_)
        throw std::invalid_argument("SparseMatrix: column index out of range");
      if (p > row_offsets_[i] && col_indices_[p - 1] >= c)
        throw std::invalid_argument("SparseMatrix: column indices must be sorted and unique within a row");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets)
    if (t.row < 0 || static_cast<std::size_t>(t.row) >= n_rows || t.col < 0 || static_cast<std::size_t>(t.col) >= n_cols)
      throw std::invalid_argument("from_triplets: index out of range");
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  std::vector<Index> offsets(n_rows + 1, 0);
  std::vector<Index> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[static_cast<std::size_t>(t.row) + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Index> offsets(n + 1), cols(n);
  std::iota(offsets.begin(), offsets.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

std::ptrdiff_t SparseMatrix::find(Index i, Index j) const {
  if (i < 0 || static_cast<std::size_t>(i) >= n_rows_) return -1;
  const auto begin = col_indices_.begin() + row_offsets_[i];
  const auto end = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return -1;
  return it - col_indices_.begin();
}

double SparseMatrix::coeff(Index i, Index j) const {
  const auto p = find(i, j);
  return p < 0 ? 0.0 : values_[static_cast<std::size_t>(p)];
}

SparseMatrix SparseMatrix::zeros_like() const {
  SparseMatrix z = *this;
  std::fill(z.values_.begin(), z.values_.end(), 0.0);
  return z;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ && row_offsets_ == other.row_offsets_ &&
         col_indices_ == other.col_indices_;
}

double SparseMatrix::symmetry_defect() const {
  if (n_rows_ != n_cols_) throw std::logic_error("symmetry_defect: matrix is not square");
  double defect = 0.0;
  for (std::size_t i = 0; i < n_rows_; ++i)
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const auto q = find(col_indices_[p], static_cast<Index>(i));
      if (q < 0) throw std::logic_error("symmetry_defect: pattern is not structurally symmetric");
      defect = std::max(defect, std::abs(values_[p] - values_[static_cast<std::size_t>(q)]));
    }
  return defect;
}

void SparseMatrix::eliminate_rows_and_columns(std::span<const Index> indices) {
  std::vector<char> mark(n_rows_, 0);
  for (Index i : indices) mark.at(static_cast<std::size_t>(i)) = 1;
  for (std::size_t i = 0; i < n_rows_; ++i)
    for (Index p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const auto c = static_cast<std::size_t>(col_indices_[p]);
      if (mark[i] || (c < n_rows_ && mark[c])) values_[p] = (c == i) ? 1.0 : 0.0;
    }
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(std::min(n_rows_, n_cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = coeff(static_cast<Index>(i), static_cast<Index>(i));
  return d;
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.n_cols() || y.size() != a.n_rows())
    throw std::invalid_argument("spmv: dimension mismatch");
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    double s = 0.0;
    for (Index p = off[i]; p < off[i + 1]; ++p) s += val[p] * x[static_cast<std::size_t>(col[p])];
    y[i] = s;
  }
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.n_rows());
  spmv(a, x, y);
  return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double norm_inf(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::abs(v));
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void LinearSolverConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("LinearSolverConfig: rel_tol must lie in (0, 1)");
  if (max_iter < 1) throw std::invalid_argument("LinearSolverConfig: max_iter must be >= 1");
}

SolverMethod LinearSolverConfig::resolve(std::size_t n) const {
  if (method != SolverMethod::Auto) return method;
  return n <= direct_limit ? SolverMethod::DirectLU : SolverMethod::BiCGStab;
}

namespace {

double residual_norm(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm2(r);
}

}  // namespace

std::vector<double> bicgstab(const SparseMatrix& a, std::span<const double> b, const LinearSolverConfig& cfg,
                             SolveReport* report) {
  cfg.validate();
  const std::size_t n = a.n_rows();
  if (a.n_cols() != n || b.size() != n) throw std::invalid_argument("bicgstab: dimension mismatch");

  std::vector<double> inv_diag(n, 1.0);
  if (cfg.preconditioner == Preconditioner::Jacobi) {
    const auto d = a.diagonal();
    for (std::size_t i = 0; i < n; ++i) inv_diag[i] = d[i] != 0.0 ? 1.0 / d[i] : 1.0;
  }
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
  };

  std::vector<double> x(n, 0.0);
  const double bnorm = norm2(b);
  const double target = cfg.rel_tol * bnorm;
  auto finish = [&](int it, double res) {
    if (report) *report = {SolverMethod::BiCGStab, it, res};
  };
  if (bnorm == 0.0) {
    finish(0, 0.0);
    return x;
  }

  std::vector<double> r(b.begin(), b.end()), r_hat = r, p(n, 0.0), v(n, 0.0), y(n), s(n), z(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double rnorm = bnorm;
  const double tiny = 1e-300;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const double rho_new = dot(r_hat, r);
    if (std::abs(rho_new) < tiny) {
      throw LinearSolveError("bicgstab: breakdown (rho = 0) at iteration " + std::to_string(it), it, rnorm);
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    precondition(p, y);
    spmv(a, y, v);
    const double rv = dot(r_hat, v);
    if (std::abs(rv) < tiny) throw LinearSolveError("bicgstab: breakdown (r_hat . v = 0)", it, rnorm);
    alpha = rho_new / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) <= target) {
      axpy(alpha, y, x);
      const double res = residual_norm(a, x, b);
      if (res <= target) {
        finish(it, res);
        return x;
      }
      for (std::size_t i = 0; i < n; ++i) r[i] = s[i];
      rnorm = res;
      rho = rho_new;
      continue;
    }
    precondition(s, z);
    spmv(a, z, t);
    const double tt = dot(t, t);
    if (tt < tiny) throw LinearSolveError("bicgstab: breakdown (t = 0)", it, rnorm);
    omega = dot(t, s) / tt;
    if (std::abs(omega) < tiny) throw LinearSolveError("bicgstab: breakdown (omega = 0)", it, rnorm);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * y[i] + omega * z[i];
      r[i] = s[i] - omega * t[i];
    }
    rho = rho_new;
    rnorm = norm2(r);
    if (rnorm <= target) {
      const double res = residual_norm(a, x, b);
      if (res <= target) {
        finish(it, res);
        return x;
      }
      // Recursive residual drifted; restart from the true residual.
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i];
      const auto ax = spmv(a, x);
      for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
      r_hat = r;
      rho = alpha = omega = 1.0;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rnorm = res;
    }
  }
  const double res = residual_norm(a, x, b);
  std::ostringstream msg;
  msg << "bicgstab: no convergence after " << cfg.max_iter << " iterations, residual " << res << " > target "
      << target;
  throw LinearSolveError(msg.str(), cfg.max_iter, res);
}

struct LinearSolver::DirectCache {
  using EigenMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  std::vector<Index> offsets;
  std::vector<Index> cols;
  Eigen::SparseLU<EigenMatrix, Eigen::COLAMDOrdering<int>> lu;
};

LinearSolver::LinearSolver(LinearSolverConfig cfg) : cfg_(cfg) { cfg_.validate(); }
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

std::vector<double> LinearSolver::solve(const SparseMatrix& a, std::span<const double> b, SolveReport* report) {
  const std::size_t n = a.n_rows();
  if (a.n_cols() != n || b.size() != n) throw std::invalid_argument("solve: dimension mismatch");
  const SolverMethod method = cfg_.resolve(n);
  if (method == SolverMethod::BiCGStab) return bicgstab(a, b, cfg_, report);

  using RowMap = Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>>;
  RowMap rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(a.nnz()),
              a.row_offsets().data(), a.col_indices().data(), a.values().data());
  DirectCache::EigenMatrix cm = rows;
  cm.makeCompressed();

  if (!direct_ || direct_->offsets != a.row_offsets() || direct_->cols != a.col_indices()) {
    direct_ = std::make_unique<DirectCache>();
    direct_->offsets = a.row_offsets();
    direct_->cols = a.col_indices();
    direct_->lu.analyzePattern(cm);
  }
  direct_->lu.factorize(cm);
  if (direct_->lu.info() != Eigen::Success) {
    const std::string why = direct_->lu.lastErrorMessage();
    direct_.reset();
    throw LinearSolveError("direct LU: factorization failed (singular pivot): " + why, 0, norm2(b));
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd sol = direct_->lu.solve(rhs);
  std::vector<double> x(sol.data(), sol.data() + n);
  if (report) *report = {SolverMethod::DirectLU, 1, residual_norm(a, x, b)};
  return x;
}

std::vector<double> solve(const SparseMatrix& a, std::span<const double> b, const LinearSolverConfig& cfg,
                          SolveReport* report) {
  LinearSolver solver(cfg);
  return solver.solve(a, b, report);
}

}  // namespace gbhe
