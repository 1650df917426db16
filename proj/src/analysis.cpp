#include "gbhe/analysis.hpp"

#include "gbhe/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gbhe {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Integrates a per-point functional of (x, u_h, grad u_h) over the mesh.
template <class F>
double integrate_cells(const FemFunction& uh, int degree, F&& integrand) {
  const Mesh& mesh = uh.space().mesh();
  const QuadratureRule qr = simplex_quadrature(mesh.dim(), degree);
  const double ref = factorial(mesh.dim());
  double total = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cv = mesh.cell(static_cast<Index>(c));
    const CellGeometry g = mesh.cell_geometry(static_cast<Index>(c));
    Vec3 grad{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < cv.size(); ++a)
      for (int k = 0; k < 3; ++k) grad[k] += uh[static_cast<std::size_t>(cv[a])] * g.gradients[a][k];
    double cell_sum = 0.0;
    for (std::size_t q = 0; q < qr.size(); ++q) {
      Vec3 x{0.0, 0.0, 0.0};
      double value = 0.0;
      for (std::size_t a = 0; a < cv.size(); ++a) {
        const double lam = qr.points[q][a];
        const Vec3& xa = mesh.vertex(cv[a]);
        for (int k = 0; k < 3; ++k) x[k] += lam * xa[k];
        value += lam * uh[static_cast<std::size_t>(cv[a])];
      }
      cell_sum += qr.weights[q] * integrand(x, value, grad);
    }
    total += cell_sum * g.volume * ref;
  }
  return total;
}

}  // namespace

double l2_error(const FemFunction& uh, const ExactValue& exact, double t) {
  return std::sqrt(integrate_cells(uh, kErrorQuadratureDegree, [&](const Vec3& x, double v, const Vec3&) {
    const double e = v - exact(x, t);
    return e * e;
  }));
}

double h1_semi_error(const FemFunction& uh, const ExactGradient& exact_grad, double t) {
  return std::sqrt(integrate_cells(uh, kErrorQuadratureDegree, [&](const Vec3& x, double, const Vec3& g) {
    const Vec3 ge = exact_grad(x, t);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += (g[k] - ge[k]) * (g[k] - ge[k]);
    return s;
  }));
}

double l2_norm(const FemFunction& uh) {
  return std::sqrt(integrate_cells(uh, 2, [](const Vec3&, double v, const Vec3&) { return v * v; }));
}

double h1_seminorm(const FemFunction& uh) {
  return std::sqrt(integrate_cells(uh, 1, [](const Vec3&, double, const Vec3& g) {
    return g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
  }));
}

double triple_norm(const TimeHistory& history, std::shared_ptr<const FunctionSpace> space, const TimeGrid& grid,
                   const ExactValue& exact, const ExactGradient& exact_grad, double nu) {
  if (history.size() != static_cast<std::size_t>(grid.n_steps) + 1)
    throw std::invalid_argument("triple_norm: history must hold u^0 ... u^N");
  double sum = 0.0;
  for (int k = 1; k <= grid.n_steps; ++k) {
    const FemFunction uk(space, history[static_cast<std::size_t>(k)]);
    const double e = h1_semi_error(uk, exact_grad, grid.t(k));
    sum += nu * grid.dt() * e * e;
  }
  const FemFunction un(space, history.back());
  const double e_final = l2_error(un, exact, grid.t_final);
  return std::sqrt(e_final * e_final + sum);
}

double convergence_rate(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  if (!(e_coarse > 0.0 && e_fine > 0.0 && h_coarse > 0.0 && h_fine > 0.0))
    throw std::invalid_argument("convergence_rate: errors and mesh sizes must be positive");
  if (h_coarse == h_fine) throw std::invalid_argument("convergence_rate: mesh sizes must differ");
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

namespace {

StudyRow solve_row(const ManufacturedCase& base, int n, std::span<const double> etas, const StudyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  auto mesh = std::make_shared<const Mesh>(Mesh::structured(base.dim(), n, Box::unit(base.dim())));
  auto space = FunctionSpace::create(mesh, BoundaryKind::Dirichlet);

  StudyRow row;
  row.n = n;
  row.h = mesh->h();
  const double target_dt = opt.dt_over_h * row.h;
  row.n_steps = std::max(1, static_cast<int>(std::lround(opt.t_final / target_dt)));
  TimeGrid grid{opt.t_final, row.n_steps};
  row.dt = grid.dt();

  for (double eta : etas) {
    ProblemCoefficients c = base.coeffs();
    c.eta = eta;
    const ManufacturedCase mcase = base.with_coeffs(c);
    Problem p;
    p.space = space;
    p.coeffs = c;
    p.kernel = mcase.kernel();
    p.grid = grid;
    p.forcing = [&mcase](const Vec3& x, double t) { return mcase.forcing(x, t); };
    p.initial = [&mcase](const Vec3& x, double t) { return mcase.exact(x, t); };
    p.newton = opt.newton;
    p.linear = opt.linear;

    Stepper stepper(std::move(p));
    double grad_sum = 0.0;
    const TimeHistory history = stepper.run([&](int k, double t, std::span<const double> u) {
      if (k == 0) return;
      const FemFunction uk(space, std::vector<double>(u.begin(), u.end()));
      const double e = h1_semi_error(uk, [&](const Vec3& x, double tt) { return mcase.exact_gradient(x, tt); }, t);
      grad_sum += c.nu * grid.dt() * e * e;
    });
    const FemFunction un(space, history.back());
    const double e_final = l2_error(un, [&](const Vec3& x, double t) { return mcase.exact(x, t); }, grid.t_final);
    row.columns.push_back({std::sqrt(e_final * e_final + grad_sum), std::nullopt});
    row.newton_max_iters = std::max(row.newton_max_iters, stepper.statistics().max_newton_iterations);
  }
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

StudyResult run_study(const ManufacturedCase& mms_case, std::span<const int> meshes, std::span<const double> etas,
                      const StudyOptions& options) {
  if (meshes.empty()) throw std::invalid_argument("run_study: need at least one mesh");
  if (etas.empty()) throw std::invalid_argument("run_study: need at least one eta value");
  for (std::size_t i = 1; i < meshes.size(); ++i)
    if (meshes[i] <= meshes[i - 1]) throw std::invalid_argument("run_study: mesh sizes must be strictly increasing");
  if (!(options.dt_over_h > 0.0)) throw std::invalid_argument("run_study: dt/h must be positive");

  StudyResult result;
  result.case_name = mms_case.name();
  result.dim = mms_case.dim();
  result.etas.assign(etas.begin(), etas.end());
  result.rows.resize(meshes.size());

  const int threads = std::max(1, options.threads);
  for (std::size_t first = 0; first < meshes.size(); first += static_cast<std::size_t>(threads)) {
    const std::size_t last = std::min(meshes.size(), first + static_cast<std::size_t>(threads));
    if (threads == 1) {
      result.rows[first] = solve_row(mms_case, meshes[first], etas, options);
      continue;
    }
    std::vector<std::future<StudyRow>> jobs;
    for (std::size_t i = first; i < last; ++i)
      jobs.push_back(std::async(std::launch::async, solve_row, std::cref(mms_case), meshes[i], etas, options));
    for (std::size_t i = first; i < last; ++i) result.rows[i] = jobs[i - first].get();
  }

  for (std::size_t i = 1; i < result.rows.size(); ++i)
    for (std::size_t e = 0; e < etas.size(); ++e) {
      auto& col = result.rows[i].columns[e];
      col.rate = convergence_rate(result.rows[i - 1].columns[e].error, col.error, result.rows[i - 1].h,
                                  result.rows[i].h);
    }
  return result;
}

StabilityCheck stability_check(const TimeHistory& history, const Problem& problem) {
  const auto& grid = problem.grid;
  if (history.size() != static_cast<std::size_t>(grid.n_steps) + 1)
    throw std::invalid_argument("stability_check: history must hold u^0 ... u^N");
  StabilityCheck out;
  for (int k = 1; k <= grid.n_steps; ++k) {
    const double g = h1_seminorm(FemFunction(problem.space, history[static_cast<std::size_t>(k)]));
    out.lhs += grid.dt() * g * g;
  }
  out.initial_norm_sq = std::pow(l2_norm(FemFunction(problem.space, history[0])), 2);

  if (problem.forcing) {
    // ||f||^2_{L2(0,T;L2)} by 3-point Gauss in time on every step.
    const LineRule gt = gauss_legendre_unit(3);
    const FemFunction dummy(problem.space);
    for (int k = 1; k <= grid.n_steps; ++k)
      for (std::size_t q = 0; q < gt.points.size(); ++q) {
        const double t = grid.t(k - 1) + grid.dt() * gt.points[q];
        const double fsq = integrate_cells(dummy, 6, [&](const Vec3& x, double, const Vec3&) {
          const double f = problem.forcing(x, t);
          return f * f;
        });
        out.forcing_norm_sq += grid.dt() * gt.weights[q] * fsq;
      }
  }
  const auto& c = problem.coeffs;
  out.rhs = (out.forcing_norm_sq / c.nu + out.initial_norm_sq) *
            std::exp(c.beta * (1.0 + c.gamma) * (1.0 + c.gamma) * grid.t_final);
  return out;
}

namespace {

std::string eta_label(double eta) {
  std::ostringstream s;
  s << eta;
  return s.str();
}

}  // namespace

void write_study_csv(const StudyResult& result, std::ostream& out) {
  out << "n,h,dt,n_steps";
  for (double eta : result.etas) out << ",error_eta_" << eta_label(eta) << ",rate_eta_" << eta_label(eta);
  out << ",newton_max_iters\n";
  char buf[64];
  auto full = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& row : result.rows) {
    out << row.n << ',' << full(row.h) << ',' << full(row.dt) << ',' << row.n_steps;
    for (const auto& col : row.columns) {
      out << ',' << full(col.error) << ',';
      if (col.rate) out << full(*col.rate);
    }
    out << ',' << row.newton_max_iters << '\n';
  }
}

void write_study_timing(const StudyResult& result, std::ostream& out) {
  out << "n,wall_time\n";
  char buf[32];
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof buf, "%.3f", row.wall_time);
    out << row.n << ',' << buf << '\n';
  }
}

std::string format_compact_scientific(double v) {
  if (v == 0.0) return "0.00(00)";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  std::string s(buf);
  const auto e = s.find('e');
  const std::string mantissa = s.substr(0, e);
  const int exponent = std::stoi(s.substr(e + 1));
  std::snprintf(buf, sizeof buf, "%s(%s%02d)", mantissa.c_str(), exponent < 0 ? "-" : "", std::abs(exponent));
  return buf;
}

void write_study_table(const StudyResult& result, std::ostream& out) {
  out << "Error history in " << result.dim << "D, case " << result.case_name << "\n";
  std::ostringstream header;
  header << std::left << std::setw(14) << "Mesh";
  for (double eta : result.etas) {
    header << std::setw(22) << ("|||.|||-error eta=" + eta_label(eta)) << std::setw(8) << "O(h)";
  }
  header << std::setw(8) << "Newton";
  out << header.str() << "\n";
  for (const auto& row : result.rows) {
    std::string mesh = std::to_string(row.n);
    for (int d = 1; d < result.dim; ++d) mesh += "x" + std::to_string(row.n);
    std::ostringstream line;
    line << std::left << std::setw(14) << mesh;
    for (const auto& col : row.columns) {
      line << std::setw(22) << format_compact_scientific(col.error);
      if (col.rate) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.2f", *col.rate);
        line << std::setw(8) << buf;
      } else {
        line << std::setw(8) << "-";
      }
    }
    line << std::setw(8) << row.newton_max_iters;
    out << line.str() << "\n";
  }
}

}  // namespace gbhe
