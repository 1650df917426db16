#include "gbhe/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gbhe {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

void ProblemCoefficients::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("coefficients: alpha must be >= 0");
  // beta = 0 is allowed so the linear sub-cases can be expressed.
  if (!(beta >= 0.0)) throw std::invalid_argument("coefficients: beta must be >= 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("coefficients: gamma must lie in (0, 1)");
  if (delta < 1) throw std::invalid_argument("coefficients: delta must be an integer >= 1");
  if (!(nu > 0.0)) throw std::invalid_argument("coefficients: nu must be > 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("coefficients: eta must be >= 0");
}

double reaction_term(double u, double gamma, int delta) {
  const double ud = ipow(u, delta);
  return u * (1.0 - ud) * (ud - gamma);
}

double reaction_derivative(double u, double gamma, int delta) {
  // (1 + gamma)(delta + 1) u^delta - gamma - (2 delta + 1) u^{2 delta}
  const double ud = ipow(u, delta);
  return (1.0 + gamma) * (delta + 1) * ud - gamma - (2 * delta + 1) * ud * ud;
}

int advection_quadrature_degree(int delta) { return std::min(2 * delta + 2, 6); }
int reaction_quadrature_degree(int delta) { return std::min(2 * (2 * delta + 1), 6); }

Assembler::Assembler(std::shared_ptr<const FunctionSpace> space)
    : space_(std::move(space)), nv_(space_->mesh().vertices_per_cell()) {
  const Mesh& mesh = space_->mesh();
  const std::size_t n = mesh.num_vertices();
  const std::size_t n_cells = mesh.num_cells();

  std::vector<std::vector<Index>> adjacency(n);
  for (std::size_t c = 0; c < n_cells; ++c) {
    auto cv = mesh.cell(static_cast<Index>(c));
    for (Index a : cv)
      for (Index b : cv) adjacency[static_cast<std::size_t>(a)].push_back(b);
  }
  std::vector<Index> offsets(n + 1, 0), cols;
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adjacency[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    offsets[i + 1] = offsets[i] + static_cast<Index>(row.size());
    cols.insert(cols.end(), row.begin(), row.end());
  }
  const std::size_t nnz = cols.size();
  pattern_ = SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(nnz, 0.0));

  const auto nv = static_cast<std::size_t>(nv_);
  slots_.resize(n_cells * nv * nv);
  geometry_.resize(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    auto cv = mesh.cell(static_cast<Index>(c));
    for (std::size_t a = 0; a < nv; ++a)
      for (std::size_t b = 0; b < nv; ++b)
        slots_[c * nv * nv + a * nv + b] = static_cast<std::size_t>(pattern_.find(cv[a], cv[b]));
    geometry_[c] = mesh.cell_geometry(static_cast<Index>(c));
    if (!(geometry_[c].volume > 0.0)) throw std::logic_error("Assembler: cell with nonpositive volume");
  }
  for (int d = 1; d <= 6; ++d) rules_.push_back(simplex_quadrature(mesh.dim(), d));
}

const QuadratureRule& Assembler::rule(int degree) const {
  if (degree < 1 || degree > 6) throw std::invalid_argument("Assembler::rule: degree must be in 1..6");
  return rules_[static_cast<std::size_t>(degree - 1)];
}

void Assembler::check_length(std::span<const double> u) const {
  if (u.size() != n_dofs()) throw std::invalid_argument("Assembler: coefficient vector length does not match n_dofs");
}

SparseMatrix Assembler::mass_matrix() const {
  SparseMatrix m = pattern_.zeros_like();
  auto& val = m.values();
  const int d = space_->mesh().dim();
  const double denom = (d + 1.0) * (d + 2.0);
  for (std::size_t c = 0; c < geometry_.size(); ++c) {
    const double vol = geometry_[c].volume;
    for (int a = 0; a < nv_; ++a)
      for (int b = 0; b < nv_; ++b) val[slot(c, a, b)] += vol * (a == b ? 2.0 : 1.0) / denom;
  }
  return m;
}

SparseMatrix Assembler::stiffness_matrix() const {
  SparseMatrix k = pattern_.zeros_like();
  auto& val = k.values();
  for (std::size_t c = 0; c < geometry_.size(); ++c) {
    const auto& g = geometry_[c];
    for (int a = 0; a < nv_; ++a)
      for (int b = 0; b < nv_; ++b) {
        const auto& ga = g.gradients[static_cast<std::size_t>(a)];
        const auto& gb = g.gradients[static_cast<std::size_t>(b)];
        val[slot(c, a, b)] += g.volume * (ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2]);
      }
  }
  return k;
}

std::vector<double> Assembler::advection_vector(std::span<const double> u, const ProblemCoefficients& coeffs) const {
  check_length(u);
  const Mesh& mesh = space_->mesh();
  const QuadratureRule& qr = rule(advection_quadrature_degree(coeffs.delta));
  const double ref_scale = factorial(mesh.dim());
  std::vector<double> out(n_dofs(), 0.0);
  std::array<double, 4> uc{};
  for (std::size_t c = 0; c < geometry_.size(); ++c) {
    auto cv = mesh.cell(static_cast<Index>(c));
    const auto& g = geometry_[c];
    double div = 0.0;  // sum_l d_l u, constant on the cell
    for (int a = 0; a < nv_; ++a) {
      uc[a] = u[static_cast<std::size_t>(cv[a])];
      const auto& ga = g.gradients[static_cast<std::size_t>(a)];
      div += uc[a] * (ga[0] + ga[1] + ga[2]);
    }
    if (div == 0.0) continue;
    const double jac = g.volume * ref_scale;
    std::array<double, 4> local{};
    for (std::size_t q = 0; q < qr.size(); ++q) {
      const auto& lam = qr.points[q];
      double uq = 0.0;
      for (int a = 0; a < nv_; ++a) uq += lam[a] * uc[a];
      const double integrand = qr.weights[q] * jac * ipow(uq, coeffs.delta) * div;
      for (int a = 0; a < nv_; ++a) local[a] += integrand * lam[a];
    }
    for (int a = 0; a < nv_; ++a) out[static_cast<std::size_t>(cv[a])] += local[a];
  }
  return out;
}

SparseMatrix Assembler::advection_jacobian(std::span<const double> u, const ProblemCoefficients& coeffs) const {
  check_length(u);
  const Mesh& mesh = space_->mesh();
  const QuadratureRule& qr = rule(advection_quadrature_degree(coeffs.delta));
  const double ref_scale = factorial(mesh.dim());
  const int delta = coeffs.delta;
  SparseMatrix j = pattern_.zeros_like();
  auto& val = j.values();
  std::array<double, 4> uc{}, gsum{};
  for (std::size_t c = 0; c < geometry_.size(); ++c) {
    auto cv = mesh.cell(static_cast<Index>(c));
    const auto& g = geometry_[c];
    double div = 0.0;
    for (int a = 0; a < nv_; ++a) {
      uc[a] = u[static_cast<std::size_t>(cv[a])];
      const auto& ga = g.gradients[static_cast<std::size_t>(a)];
      gsum[a] = ga[0] + ga[1] + ga[2];
      div += uc[a] * gsum[a];
    }
    const double jac = g.volume * ref_scale;
    std::array<std::array<double, 4>, 4> local{};
    for (std::size_t q = 0; q < qr.size(); ++q) {
      const auto& lam = qr.points[q];
      double uq = 0.0;
      for (int a = 0; a < nv_; ++a) uq += lam[a] * uc[a];
      const double wq = qr.weights[q] * jac;
      const double ud1 = ipow(uq, delta - 1);
      const double d_val = wq * delta * ud1 * div;  // multiplies phi_j
      const double d_grad = wq * ud1 * uq;          // multiplies sum_l d_l phi_j
      for (int a = 0; a < nv_; ++a)
        for (int b = 0; b < nv_; ++b) local[a][b] += (d_val * lam[b] + d_grad * gsum[b]) * lam[a];
    }
    for (int a = 0; a < nv_; ++a)
      for (int b = 0; b < nv_; ++b) val[slot(c, a, b)] += local[a][b];
  }
  return j;
}

std::vector<double> Assembler::reaction_vector(std::span<const double> u, const ProblemCoefficients& coeffs) const {
  check_length(u);
  const Mesh& mesh = space_->mesh();
  const QuadratureRule& qr = rule(reaction_quadrature_degree(coeffs.delta));
  const double ref_scale = factorial(mesh.dim());
  std::vector<double> out(n_dofs(), 0.0);
  std::array<double, 4> uc{};
  for (std::size_t c = 0; c < geometry_.size(); ++c) {
    auto cv = mesh.cell(static_cast<Index>(c));
    for (int a = 0; a < nv_; ++a) uc[a] = u[static_cast<std::size_t>(cv[a])];
    const double jac = geometry_[c].volume * ref_scale;
    std::array<double, 4> local{};
    for (std::size_t q = 0; q < qr.size(); ++q) {
      const auto& lam = qr.points[q];
      double uq = 0.0;
      for (int a = 0; a < nv_; ++a) uq += lam[a] * uc[a];
      const double integrand = qr.weights[q] * jac * reaction_term(uq, coeffs.gamma, coeffs.delta);
      for (int a = 0; a < nv_; ++a) local[a] += integrand * lam[a];
    }
    for (int a = 0; a < nv_; ++a) out[static_cast<std::size_t>(cv[a])] += local[a];
  }
  return out;
}

SparseMatrix Assembler::reaction_jacobian(std::span<const double> u, const ProblemCoefficients& coeffs) const {
  check_length(u);
  const Mesh& mesh = space_->mesh();
  const QuadratureRule& qr = rule(reaction_quadrature_degree(coeffs.delta));
  const double ref_scale = factorial(mesh.dim());
  SparseMatrix j = pattern_.zeros_like();
  auto& val = j.values();
  std::array<double, 4> uc{};
  for (std::size_t c = 0; c < geometry_.size(); ++c) {
    auto cv = mesh.cell(static_cast<Index>(c));
    for (int a = 0; a < nv_; ++a) uc[a] = u[static_cast<std::size_t>(cv[a])];
    const double jac = geometry_[c].volume * ref_scale;
    std::array<std::array<double, 4>, 4> local{};
    for (std::size_t q = 0; q < qr.size(); ++q) {
      const auto& lam = qr.points[q];
      double uq = 0.0;
      for (int a = 0; a < nv_; ++a) uq += lam[a] * uc[a];
      const double wq = qr.weights[q] * jac * reaction_derivative(uq, coeffs.gamma, coeffs.delta);
      for (int a = 0; a < nv_; ++a)
        for (int b = 0; b < nv_; ++b) local[a][b] += wq * lam[a] * lam[b];
    }
    for (int a = 0; a < nv_; ++a)
      for (int b = 0; b < nv_; ++b) val[slot(c, a, b)] += local[a][b];
  }
  return j;
}

std::vector<double> Assembler::load_vector(const SpaceTimeFunction& f, double t_start, double t_end) const {
  if (!(t_end > t_start)) throw std::invalid_argument("load_vector: need t_end > t_start");
  const Mesh& mesh = space_->mesh();
  const QuadratureRule& qr = rule(kLoadDegree);
  const double ref_scale = factorial(mesh.dim());
  const double mid = 0.5 * (t_start + t_end);
  const double half = 0.5 * (t_end - t_start) / std::sqrt(3.0);
  const double times[2] = {mid - half, mid + half};
  std::vector<double> out(n_dofs(), 0.0);
  for (std::size_t c = 0; c < geometry_.size(); ++c) {
    auto cv = mesh.cell(static_cast<Index>(c));
    const double jac = geometry_[c].volume * ref_scale;
    std::array<double, 4> local{};
    for (std::size_t q = 0; q < qr.size(); ++q) {
      const auto& lam = qr.points[q];
      Vec3 x{0.0, 0.0, 0.0};
      for (int a = 0; a < nv_; ++a) {
        const Vec3& xa = mesh.vertex(cv[a]);
        for (int k = 0; k < 3; ++k) x[k] += lam[a] * xa[k];
      }
      const double fbar = 0.5 * (f(x, times[0]) + f(x, times[1]));
      const double integrand = qr.weights[q] * jac * fbar;
      for (int a = 0; a < nv_; ++a) local[a] += integrand * lam[a];
    }
    for (int a = 0; a < nv_; ++a) out[static_cast<std::size_t>(cv[a])] += local[a];
  }
  return out;
}

SparseMatrix mass_matrix(std::shared_ptr<const FunctionSpace> space) { return Assembler(std::move(space)).mass_matrix(); }

SparseMatrix stiffness_matrix(std::shared_ptr<const FunctionSpace> space) {
  return Assembler(std::move(space)).stiffness_matrix();
}

std::vector<double> load_vector(const SpaceTimeFunction& f, std::shared_ptr<const FunctionSpace> space, double t_start,
                                double t_end) {
  return Assembler(std::move(space)).load_vector(f, t_start, t_end);
}

}  // namespace gbhe
