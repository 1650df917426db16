#pragma once

#include "gbhe/assembly.hpp"
#include "gbhe/kernel.hpp"
#include "gbhe/linalg.hpp"
#include "gbhe/space.hpp"

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbhe {

/// Uniform grid t_k = k dt on [0, t_final].
struct TimeGrid {
  double t_final = 1.0;
  int n_steps = 1;

  double dt() const { return t_final / n_steps; }
  double t(int k) const { return k == n_steps ? t_final : k * dt(); }
  void validate() const;
};

enum class NewtonDamping { None, LineHalving };

struct NewtonConfig {
  double abs_tol = 1e-10;  // on the Euclidean norm of the residual vector
  int max_iter = 25;
  NewtonDamping damping = NewtonDamping::None;

  void validate() const;
  bool operator==(const NewtonConfig&) const = default;
};

/// Recovery-variable coefficients: dv/dt = epsilon (u - rho v).
struct FhnCoefficients {
  double epsilon = 0.02;
  double rho = 0.5;

  void validate() const;
  bool operator==(const FhnCoefficients&) const = default;
};

/// Nodal snapshots u^0 ... u^k.
class TimeHistory {
 public:
  std::size_t size() const { return snapshots_.size(); }
  bool empty() const { return snapshots_.empty(); }
  const std::vector<double>& operator[](std::size_t k) const { return snapshots_.at(k); }
  const std::vector<double>& back() const { return snapshots_.back(); }
  void push_back(std::vector<double> u) { snapshots_.push_back(std::move(u)); }
  const std::vector<std::vector<double>>& snapshots() const { return snapshots_; }
  bool operator==(const TimeHistory&) const = default;

 private:
  std::vector<std::vector<double>> snapshots_;
};

struct Problem {
  std::shared_ptr<const FunctionSpace> space;
  ProblemCoefficients coeffs;
  KernelSpec kernel;
  TimeGrid grid;
  SpaceTimeFunction forcing;        // empty means f = 0
  SpaceTimeFunction initial;        // evaluated at t = 0; empty means u0 = 0
  NewtonConfig newton;
  LinearSolverConfig linear;
};

struct NewtonResult {
  std::vector<double> u;
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;  // norm before each Newton update, then the final norm
};

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residual_history() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// A failure inside time step `step`.
class StepError : public std::runtime_error {
 public:
  StepError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// Called with k = 0 for the initial data and then after every step.
using StepCallback = std::function<void(int k, double t, std::span<const double> u)>;
using FhnCallback = std::function<void(int k, double t, std::span<const double> u, std::span<const double> v)>;

struct FhnHistory {
  TimeHistory u;
  TimeHistory v;
};

struct RunStatistics {
  int max_newton_iterations = 0;
  long total_newton_iterations = 0;
  int steps = 0;
};

/// Backward Euler in time, P1 in space, with the memory integral replaced by
/// sum_{j<=k} omega_kj dt (grad u^j, grad chi). Each step is solved by Newton's
/// method from the previous step.
class Stepper {
 public:
  explicit Stepper(Problem problem);

  const Problem& problem() const { return problem_; }
  const Assembler& assembler() const { return assembler_; }
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const WeightTable& weights() const { return weights_; }
  const RunStatistics& statistics() const { return stats_; }

  /// sum_{j=1}^{k-1} omega_kj dt u^j.
  std::vector<double> memory_sum(const TimeHistory& history, int k) const;

  /// (f^k, phi_i) for step k; zero when no forcing is set.
  std::vector<double> load(int k) const;

  /// Discrete residual of step k at u_trial, Dirichlet rows zeroed:
  ///   M (u - u^{k-1}) / dt + nu A u + eta dt omega_kk A u + eta A memory_sum
  ///   + alpha B(u) - beta C(u) - load.
  /// `history` holds u^0 ... u^{k-1}.
  std::vector<double> residual(std::span<const double> u_trial, const TimeHistory& history, int k,
                               std::span<const double> load) const;

  /// Newton solve of step k starting from u^{k-1}.
  NewtonResult newton_step_solve(const TimeHistory& history, int k, std::span<const double> load);

  TimeHistory run(const StepCallback& callback = {});

  /// Coupled recovery-variable system with lagged v in the u equation and a
  /// pointwise implicit update of v. Requires a Neumann space.
  FhnHistory run_fhn(const FhnCoefficients& fhn, const SpaceTimeFunction& v0, const FhnCallback& callback = {});

  std::vector<double> initial_state() const;

 private:
  std::vector<double> residual_impl(std::span<const double> u, std::span<const double> u_prev,
                                    std::span<const double> memory, std::span<const double> load) const;
  NewtonResult newton_impl(std::span<const double> u_prev, std::span<const double> memory,
                           std::span<const double> load);

  Problem problem_;
  Assembler assembler_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  WeightTable weights_;
  LinearSolver solver_;
  RunStatistics stats_;
};

}  // namespace gbhe
