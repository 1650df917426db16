#pragma once
// Direct evaluation of the memory weights from their double-integral
// definition, by nested adaptive tanh-sinh quadrature:
//   omega_kj = dt^-2 int_{t_{k-1}}^{t_k} int_{t_{j-1}}^{min(t, t_j)} K(t - s) ds dt.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <functional>

namespace oracle {

inline double weight_by_definition(const std::function<double(double)>& kernel, double dt, int k, int j) {
  boost::math::quadrature::tanh_sinh<double> outer, inner;
  const double tk0 = (k - 1) * dt, tk1 = k * dt;
  const double tj0 = (j - 1) * dt, tj1 = j * dt;
  auto inner_integral = [&](double t) {
    const double hi = std::min(t, tj1);
    if (hi <= tj0) return 0.0;
    // Lag variable tau = t - s so any kernel singularity sits at an endpoint.
    return inner.integrate([&](double tau) { return kernel(tau); }, t - hi, t - tj0, 1e-14);
  };
  return outer.integrate(inner_integral, tk0, tk1, 1e-13) / (dt * dt);
}

}  // namespace oracle
