#include "gbhe/stepper.hpp"

#include <cmath>
#include <sstream>

namespace gbhe {

void TimeGrid::validate() const {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("time grid: T must be positive");
  if (n_steps < 1) throw std::invalid_argument("time grid: need at least one step");
}

void NewtonConfig::validate() const {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("newton: abs_tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("newton: max_iter must be >= 1");
}

void FhnCoefficients::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("fhn: epsilon must be >= 0");
  if (!(rho >= 0.0)) throw std::invalid_argument("fhn: rho must be >= 0");
}

Stepper::Stepper(Problem problem)
    : problem_(std::move(problem)),
      assembler_(problem_.space),
      mass_(assembler_.mass_matrix()),
      stiffness_(assembler_.stiffness_matrix()),
      weights_(build_weights(problem_.kernel, problem_.grid.dt(), problem_.grid.n_steps)),
      solver_(problem_.linear) {
  problem_.coeffs.validate();
  problem_.grid.validate();
  problem_.newton.validate();
}

std::vector<double> Stepper::initial_state() const {
  std::vector<double> u0(assembler_.n_dofs(), 0.0);
  if (problem_.initial) u0 = interpolate(problem_.initial, 0.0, problem_.space).values();
  problem_.space->apply_dirichlet(u0);
  return u0;
}

std::vector<double> Stepper::memory_sum(const TimeHistory& history, int k) const {
  if (history.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("memory_sum: history must hold u^0 ... u^{k-1}");
  std::vector<double> sum(assembler_.n_dofs(), 0.0);
  if (problem_.kernel.is_none() || problem_.coeffs.eta == 0.0) return sum;
  const double dt = problem_.grid.dt();
  for (int j = 1; j < k; ++j) axpy(weights_(k, j) * dt, history[static_cast<std::size_t>(j)], sum);
  return sum;
}

std::vector<double> Stepper::load(int k) const {
  if (!problem_.forcing) return std::vector<double>(assembler_.n_dofs(), 0.0);
  return assembler_.load_vector(problem_.forcing, problem_.grid.t(k - 1), problem_.grid.t(k));
}

std::vector<double> Stepper::residual_impl(std::span<const double> u, std::span<const double> u_prev,
                                           std::span<const double> memory, std::span<const double> load) const {
  const auto& c = problem_.coeffs;
  const double dt = problem_.grid.dt();
  const std::size_t n = u.size();
  const double implicit_memory = (problem_.kernel.is_none() ? 0.0 : c.eta * dt * weights_.diagonal());

  std::vector<double> diff(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = (u[i] - u_prev[i]) / dt;
    z[i] = (c.nu + implicit_memory) * u[i] + c.eta * memory[i];
  }
  std::vector<double> r = spmv(mass_, diff);
  const std::vector<double> az = spmv(stiffness_, z);
  const std::vector<double> rc = assembler_.reaction_vector(u, c);
  for (std::size_t i = 0; i < n; ++i) r[i] += az[i] - c.beta * rc[i] - load[i];
  if (c.alpha != 0.0) axpy(c.alpha, assembler_.advection_vector(u, c), r);
  for (Index d : problem_.space->dirichlet_dofs()) r[static_cast<std::size_t>(d)] = 0.0;
  return r;
}

std::vector<double> Stepper::residual(std::span<const double> u_trial, const TimeHistory& history, int k,
                                      std::span<const double> load) const {
  if (k < 1 || k > problem_.grid.n_steps) throw std::invalid_argument("residual: step index out of range");
  if (history.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("residual: missing history (need u^0 ... u^{k-1})");
  if (u_trial.size() != assembler_.n_dofs() || load.size() != assembler_.n_dofs())
    throw std::invalid_argument("residual: vector length does not match n_dofs");
  const auto memory = memory_sum(history, k);
  return residual_impl(u_trial, history[static_cast<std::size_t>(k - 1)], memory, load);
}

NewtonResult Stepper::newton_impl(std::span<const double> u_prev, std::span<const double> memory,
                                  std::span<const double> load) {
  const auto& c = problem_.coeffs;
  const auto& cfg = problem_.newton;
  const double dt = problem_.grid.dt();
  const double stiff_scale = c.nu + (problem_.kernel.is_none() ? 0.0 : c.eta * dt * weights_.diagonal());
  const auto& dirichlet = problem_.space->dirichlet_dofs();

  NewtonResult out;
  out.u.assign(u_prev.begin(), u_prev.end());
  std::vector<double> r = residual_impl(out.u, u_prev, memory, load);
  double rnorm = norm2(r);
  out.residual_history.push_back(rnorm);

  SparseMatrix jac = mass_.zeros_like();
  while (rnorm > cfg.abs_tol) {
    if (out.iterations >= cfg.max_iter) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << cfg.max_iter << " iterations; residual norms:";
      for (double v : out.residual_history) msg << ' ' << v;
      throw NewtonError(msg.str(), out.residual_history);
    }
    const SparseMatrix jr = assembler_.reaction_jacobian(out.u, c);
    auto& jv = jac.values();
    const auto& mv = mass_.values();
    const auto& av = stiffness_.values();
    const auto& rv = jr.values();
    for (std::size_t p = 0; p < jv.size(); ++p) jv[p] = mv[p] / dt + stiff_scale * av[p] - c.beta * rv[p];
    if (c.alpha != 0.0) {
      const SparseMatrix jb = assembler_.advection_jacobian(out.u, c);
      const auto& bv = jb.values();
      for (std::size_t p = 0; p < jv.size(); ++p) jv[p] += c.alpha * bv[p];
    }
    jac.eliminate_rows_and_columns(dirichlet);

    std::vector<double> rhs(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
    const std::vector<double> du = solver_.solve(jac, rhs);

    double step = 1.0;
    std::vector<double> trial(out.u.size());
    for (int halvings = 0;; ++halvings) {
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = out.u[i] + step * du[i];
      r = residual_impl(trial, u_prev, memory, load);
      const double trial_norm = norm2(r);
      if (cfg.damping == NewtonDamping::None || trial_norm < rnorm || halvings >= 10) {
        rnorm = trial_norm;
        break;
      }
      step *= 0.5;
    }
    out.u = trial;
    ++out.iterations;
    out.residual_history.push_back(rnorm);
    if (!std::isfinite(rnorm)) throw NewtonError("Newton diverged (non-finite residual)", out.residual_history);
  }
  out.final_residual = rnorm;
  stats_.max_newton_iterations = std::max(stats_.max_newton_iterations, out.iterations);
  stats_.total_newton_iterations += out.iterations;
  ++stats_.steps;
  return out;
}

NewtonResult Stepper::newton_step_solve(const TimeHistory& history, int k, std::span<const double> load) {
  if (k < 1 || k > problem_.grid.n_steps) throw std::invalid_argument("newton_step_solve: step index out of range");
  if (history.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("newton_step_solve: missing history (need u^0 ... u^{k-1})");
  const auto memory = memory_sum(history, k);
  return newton_impl(history[static_cast<std::size_t>(k - 1)], memory, load);
}

TimeHistory Stepper::run(const StepCallback& callback) {
  TimeHistory history;
  history.push_back(initial_state());
  if (callback) callback(0, 0.0, history.back());
  for (int k = 1; k <= problem_.grid.n_steps; ++k) {
    try {
      const auto f = load(k);
      NewtonResult step = newton_step_solve(history, k, f);
      history.push_back(std::move(step.u));
    } catch (const StepError&) {
      throw;
    } catch (const std::exception& e) {
      throw StepError(k, e.what());
    }
    if (callback) callback(k, problem_.grid.t(k), history.back());
  }
  return history;
}

FhnHistory Stepper::run_fhn(const FhnCoefficients& fhn, const SpaceTimeFunction& v0, const FhnCallback& callback) {
  fhn.validate();
  if (problem_.space->bc_kind() != BoundaryKind::Neumann)
    throw std::invalid_argument("run_fhn: the recovery-variable system uses Neumann boundary conditions");
  const double dt = problem_.grid.dt();
  const std::size_t n = assembler_.n_dofs();

  FhnHistory out;
  out.u.push_back(initial_state());
  std::vector<double> v(n, 0.0);
  if (v0) v = interpolate(v0, 0.0, problem_.space).values();
  out.v.push_back(v);
  if (callback) callback(0, 0.0, out.u.back(), out.v.back());

  const double v_denominator = 1.0 + dt * fhn.epsilon * fhn.rho;
  for (int k = 1; k <= problem_.grid.n_steps; ++k) {
    try {
      std::vector<double> f = load(k);
      const auto mv = spmv(mass_, out.v.back());
      for (std::size_t i = 0; i < n; ++i) f[i] -= mv[i];
      NewtonResult step = newton_step_solve(out.u, k, f);
      const auto& v_prev = out.v.back();
      std::vector<double> v_next(n);
      for (std::size_t i = 0; i < n; ++i) v_next[i] = (v_prev[i] + dt * fhn.epsilon * step.u[i]) / v_denominator;
      out.u.push_back(std::move(step.u));
      out.v.push_back(std::move(v_next));
    } catch (const StepError&) {
      throw;
    } catch (const std::exception& e) {
      throw StepError(k, e.what());
    }
    if (callback) callback(k, problem_.grid.t(k), out.u.back(), out.v.back());
  }
  return out;
}

}  // namespace gbhe
