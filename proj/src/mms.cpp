#include "gbhe/mms.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace gbhe {

namespace {

TimeProfile profile_for(TemporalFactor temporal) {
  switch (temporal) {
    case TemporalFactor::ExpDecay: return ExpTime{1.0};
    case TemporalFactor::CubicPoly: return PolyTime{{1.0, 0.0, -1.0, 1.0}};
    case TemporalFactor::ThreeHalves: return PowerTime{1.5};
  }
  throw std::logic_error("unknown temporal factor");
}

}  // namespace

ManufacturedCase::ManufacturedCase(std::string name, int dim, int frequency, TemporalFactor temporal,
                                   KernelSpec kernel, ProblemCoefficients coeffs)
    : name_(std::move(name)),
      dim_(dim),
      frequency_(frequency),
      temporal_(temporal),
      kernel_(std::move(kernel)),
      coeffs_(coeffs),
      profile_(profile_for(temporal)) {
  if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("manufactured case: dimension must be 2 or 3");
  if (frequency_ < 1) throw std::invalid_argument("manufactured case: frequency must be >= 1");
  coeffs_.validate();
  numeric_memory_ = !has_exact_convolution(kernel_, profile_);
  if (numeric_memory_)
    std::clog << "[mms] " << name_ << ": no closed-form convolution for kernel " << kernel_.to_string()
              << ", using adaptive quadrature\n";
}

ManufacturedCase ManufacturedCase::with_coeffs(const ProblemCoefficients& coeffs) const {
  return ManufacturedCase(name_, dim_, frequency_, temporal_, kernel_, coeffs);
}

double ManufacturedCase::time_factor(double t) const { return evaluate_profile(profile_, t); }

double ManufacturedCase::time_derivative(double t) const {
  switch (temporal_) {
    case TemporalFactor::ExpDecay: return -std::exp(-t);
    case TemporalFactor::CubicPoly: return 3.0 * t * t - 2.0 * t;
    case TemporalFactor::ThreeHalves: return 1.5 * std::sqrt(t);
  }
  return 0.0;
}

double ManufacturedCase::memory_factor(double t) const {
  if (!numeric_memory_) return convolve_exact(kernel_, profile_, t);
  return convolve_numeric(kernel_, [this](double s) { return time_factor(s); }, t, 1e-10);
}

double ManufacturedCase::spatial(const Vec3& x) const {
  const double w = frequency_ * std::numbers::pi;
  double p = 1.0;
  for (int i = 0; i < dim_; ++i) p *= std::sin(w * x[i]);
  return p;
}

Vec3 ManufacturedCase::spatial_gradient(const Vec3& x) const {
  const double w = frequency_ * std::numbers::pi;
  Vec3 g{0.0, 0.0, 0.0};
  for (int i = 0; i < dim_; ++i) {
    double p = w * std::cos(w * x[i]);
    for (int j = 0; j < dim_; ++j)
      if (j != i) p *= std::sin(w * x[j]);
    g[i] = p;
  }
  return g;
}

double ManufacturedCase::laplacian_factor() const {
  const double w = frequency_ * std::numbers::pi;
  return -dim_ * w * w;
}

double ManufacturedCase::exact(const Vec3& x, double t) const { return time_factor(t) * spatial(x); }

Vec3 ManufacturedCase::exact_gradient(const Vec3& x, double t) const {
  Vec3 g = spatial_gradient(x);
  const double gt = time_factor(t);
  for (double& v : g) v *= gt;
  return g;
}

double ManufacturedCase::memory_forcing(const Vec3& x, double t) const {
  if (coeffs_.eta == 0.0 || kernel_.is_none()) return 0.0;
  return -coeffs_.eta * memory_factor(t) * laplacian_factor() * spatial(x);
}

double ManufacturedCase::forcing(const Vec3& x, double t) const {
  const auto& c = coeffs_;
  const double phi = spatial(x);
  const double g = time_factor(t);
  const double u = g * phi;
  const Vec3 grad = exact_gradient(x, t);
  double div = 0.0;
  for (int i = 0; i < dim_; ++i) div += grad[i];
  const double lap = g * laplacian_factor() * phi;
  return time_derivative(t) * phi + c.alpha * std::pow(u, c.delta) * div - c.nu * lap + memory_forcing(x, t) -
         c.beta * reaction_term(u, c.gamma, c.delta);
}

std::vector<std::string> case_names() {
  return {"smooth-exp-2d",          "smooth-exp-3d",          "singular-cubic-2d",
          "singular-cubic-3d",      "singular-threehalves-2d", "singular-threehalves-3d"};
}

ManufacturedCase make_case(std::string_view name, const ProblemCoefficients& coeffs) {
  const std::string n(name);
  auto dim_of = [&](std::string_view stem) -> int {
    if (n == std::string(stem) + "-2d") return 2;
    if (n == std::string(stem) + "-3d") return 3;
    return 0;
  };
  if (int d = dim_of("smooth-exp"))
    return ManufacturedCase(n, d, 1, TemporalFactor::ExpDecay, KernelSpec::exponential(1.0), coeffs);
  if (int d = dim_of("singular-cubic"))
    return ManufacturedCase(n, d, 1, TemporalFactor::CubicPoly, KernelSpec::power_law(0.5, false), coeffs);
  if (int d = dim_of("singular-threehalves"))
    return ManufacturedCase(n, d, 2, TemporalFactor::ThreeHalves, KernelSpec::power_law(0.5, false), coeffs);
  std::string known;
  for (const auto& c : case_names()) known += " " + c;
  throw std::invalid_argument("unknown manufactured case '" + n + "'; known:" + known);
}

}  // namespace gbhe
