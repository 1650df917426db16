#pragma once

#include "gbhe/assembly.hpp"
#include "gbhe/kernel.hpp"
#include "gbhe/mesh.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace gbhe {

enum class TemporalFactor {
  ExpDecay,     // e^{-t}
  CubicPoly,    // t^3 - t^2 + 1
  ThreeHalves,  // t^{3/2}
};

/// Separable exact solution u(x, t) = g(t) prod_i sin(w pi x_i) on (0,1)^d
/// together with the forcing that makes it solve the equation with memory.
class ManufacturedCase {
 public:
  ManufacturedCase(std::string name, int dim, int frequency, TemporalFactor temporal, KernelSpec kernel,
                   ProblemCoefficients coeffs);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int frequency() const { return frequency_; }
  TemporalFactor temporal() const { return temporal_; }
  const KernelSpec& kernel() const { return kernel_; }
  const ProblemCoefficients& coeffs() const { return coeffs_; }

  /// Same case with different coefficients (e.g. another eta).
  ManufacturedCase with_coeffs(const ProblemCoefficients& coeffs) const;

  double time_factor(double t) const;
  double time_derivative(double t) const;
  /// (K * g)(t), closed form when available.
  double memory_factor(double t) const;
  /// True when memory_factor falls back to numerical convolution.
  bool numeric_memory() const { return numeric_memory_; }

  double spatial(const Vec3& x) const;
  Vec3 spatial_gradient(const Vec3& x) const;
  /// Lap of the spatial factor is -(d w^2 pi^2) times the factor.
  double laplacian_factor() const;

  double exact(const Vec3& x, double t) const;
  Vec3 exact_gradient(const Vec3& x, double t) const;
  double forcing(const Vec3& x, double t) const;

  /// Forcing split by term, for checking linearity in eta.
  double memory_forcing(const Vec3& x, double t) const;

 private:
  std::string name_;
  int dim_;
  int frequency_;
  TemporalFactor temporal_;
  KernelSpec kernel_;
  ProblemCoefficients coeffs_;
  TimeProfile profile_;
  bool numeric_memory_ = false;
};

/// Named cases: smooth-exp-{2d,3d}, singular-cubic-{2d,3d}, singular-threehalves-{2d,3d}.
ManufacturedCase make_case(std::string_view name, const ProblemCoefficients& coeffs = {});
std::vector<std::string> case_names();

}  // namespace gbhe
