#pragma once

#include "gbhe/linalg.hpp"
#include "gbhe/mms.hpp"
#include "gbhe/space.hpp"
#include "gbhe/stepper.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace gbhe {

using ExactValue = std::function<double(const Vec3&, double)>;
using ExactGradient = std::function<Vec3(const Vec3&, double)>;

/// Quadrature degree used by the error norms.
inline constexpr int kErrorQuadratureDegree = 5;

/// ||u_h - u(t)||_{L2}.
double l2_error(const FemFunction& uh, const ExactValue& exact, double t);
/// ||grad u_h - grad u(t)||_{L2}.
double h1_semi_error(const FemFunction& uh, const ExactGradient& exact_grad, double t);

double l2_norm(const FemFunction& uh);
double h1_seminorm(const FemFunction& uh);

/// Energy-type error E = sqrt( ||u(T) - u_h^N||^2 + sum_k nu dt ||grad(u(t_k) - u_h^k)||^2 ).
double triple_norm(const TimeHistory& history, std::shared_ptr<const FunctionSpace> space, const TimeGrid& grid,
                   const ExactValue& exact, const ExactGradient& exact_grad, double nu);

/// r = log(e_coarse / e_fine) / log(h_coarse / h_fine).
double convergence_rate(double e_coarse, double e_fine, double h_coarse, double h_fine);

struct StudyColumn {
  double error = 0.0;
  std::optional<double> rate;
};

struct StudyRow {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  int n_steps = 0;
  std::vector<StudyColumn> columns;  // one per eta value
  int newton_max_iters = 0;
  double wall_time = 0.0;  // seconds, all eta values of the row
};

struct StudyResult {
  std::string case_name;
  int dim = 2;
  std::vector<double> etas;
  std::vector<StudyRow> rows;
};

struct StudyOptions {
  double t_final = 1.0;
  double dt_over_h = 1.0;
  NewtonConfig newton;
  LinearSolverConfig linear;
  int threads = 1;  // rows solved concurrently
};

/// Solve the manufactured case on each mesh (cells per side) with dt = c h
/// rounded to the nearest uniform grid on [0, T], once per eta.
StudyResult run_study(const ManufacturedCase& mms_case, std::span<const int> meshes, std::span<const double> etas,
                      const StudyOptions& options = {});

/// Energy stability bound check for one discrete trajectory.
struct StabilityCheck {
  double lhs = 0.0;  // sum_k dt ||grad u_h^k||^2
  double rhs = 0.0;  // (||f||^2 / nu + ||u_h^0||^2) exp(beta (1+gamma)^2 T)
  double forcing_norm_sq = 0.0;
  double initial_norm_sq = 0.0;
};
/// The H^{-1} norm of f is replaced by its L2 norm, which bounds it from
/// above on domains whose Poincare constant is at most one.
StabilityCheck stability_check(const TimeHistory& history, const Problem& problem);

/// Deterministic columns only; wall times go through write_study_timing.
void write_study_csv(const StudyResult& result, std::ostream& out);
void write_study_timing(const StudyResult& result, std::ostream& out);
void write_study_table(const StudyResult& result, std::ostream& out);

/// "7.21(-01)" style with three significant digits.
std::string format_compact_scientific(double v);

}  // namespace gbhe
