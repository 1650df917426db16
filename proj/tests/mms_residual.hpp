#pragma once
// PDE residual of a manufactured (exact, forcing) pair, with derivatives from
// the sympy-generated oracle and the memory convolution by adaptive
// Gauss-Kronrod quadrature.

#include "gbhe/assembly.hpp"
#include "gbhe/mms.hpp"
#include "oracles/mms_oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace oracle {

inline Derivs derivs(const std::string& name, const std::array<double, 3>& x, double t) {
  if (name == "smooth-exp-2d") return smooth_exp_2d(x, t);
  if (name == "smooth-exp-3d") return smooth_exp_3d(x, t);
  if (name == "singular-cubic-2d") return singular_cubic_2d(x, t);
  if (name == "singular-cubic-3d") return singular_cubic_3d(x, t);
  if (name == "singular-threehalves-2d") return singular_threehalves_2d(x, t);
  if (name == "singular-threehalves-3d") return singular_threehalves_3d(x, t);
  throw std::invalid_argument("oracle: unknown case " + name);
}

/// int_0^t K(t - s) Lap u(x, s) ds. For a power-law kernel t^(a-1) the
/// substitution s = t - w^(1/a) removes the endpoint singularity.
inline double memory_oracle(const gbhe::ManufacturedCase& c, const std::array<double, 3>& x, double t) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  if (t == 0.0 || c.kernel().is_none()) return 0.0;
  const auto& v = c.kernel().variant();
  if (const auto* p = std::get_if<gbhe::PowerLawKernel>(&v)) {
    const double a = p->alpha;
    const double scale = p->normalized ? 1.0 / std::tgamma(a) : 1.0;
    // tau = w^(1/a): K(tau) dtau = tau^(a-1) (1/a) w^(1/a - 1) dw = dw / a.
    return scale / a *
           GK::integrate([&](double w) { return derivs(c.name(), x, t - std::pow(w, 1.0 / a)).lap; }, 0.0,
                         std::pow(t, a), 15, 1e-12);
  }
  return GK::integrate([&](double s) { return c.kernel()(t - s) * derivs(c.name(), x, s).lap; }, 0.0, t, 15, 1e-12);
}

/// u_t + alpha u^delta sum_i d_i u - nu Lap u - eta (K * Lap u) - beta c(u) - f.
inline double pde_residual(const gbhe::ManufacturedCase& c, const std::array<double, 3>& x, double t) {
  const auto& k = c.coeffs();
  const Derivs d = derivs(c.name(), x, t);
  double div = 0.0;
  for (int i = 0; i < c.dim(); ++i) div += d.grad[static_cast<std::size_t>(i)];
  return d.u_t + k.alpha * std::pow(d.u, k.delta) * div - k.nu * d.lap - k.eta * memory_oracle(c, x, t) -
         k.beta * gbhe::reaction_term(d.u, k.gamma, k.delta) - c.forcing(x, t);
}

}  // namespace oracle
