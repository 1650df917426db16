#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gbhe {

/// K(t) = t^(alpha-1), divided by Gamma(alpha) when normalized.
struct PowerLawKernel {
  double alpha = 0.5;
  bool normalized = false;
  bool operator==(const PowerLawKernel&) const = default;
};

/// K(t) = exp(-rate t); rate 0 gives K = 1.
struct ExponentialKernel {
  double rate = 1.0;
  bool operator==(const ExponentialKernel&) const = default;
};

/// No memory term.
struct NoKernel {
  bool operator==(const NoKernel&) const = default;
};

/// Memory kernel. Only nonnegative, nonincreasing kernels are representable,
/// so the discrete memory form stays positive.
class KernelSpec {
 public:
  using Variant = std::variant<NoKernel, PowerLawKernel, ExponentialKernel>;

  KernelSpec() = default;
  explicit KernelSpec(Variant v);

  static KernelSpec none() { return KernelSpec(NoKernel{}); }
  static KernelSpec power_law(double alpha, bool normalized = false) {
    return KernelSpec(PowerLawKernel{alpha, normalized});
  }
  static KernelSpec exponential(double rate) { return KernelSpec(ExponentialKernel{rate}); }

  /// Parses "none", "exp:<rate>", "power:<alpha>" and "power-normalized:<alpha>".
  static KernelSpec parse(std::string_view text);
  /// Inverse of parse.
  std::string to_string() const;

  const Variant& variant() const { return v_; }
  bool is_none() const { return std::holds_alternative<NoKernel>(v_); }
  double operator()(double t) const;

  bool operator==(const KernelSpec&) const = default;

 private:
  Variant v_{NoKernel{}};
};

/// Lower-triangular quadrature weights omega_kj of the memory sum on a
/// uniform grid. On such a grid omega_kj depends on the lag m = k - j only,
/// so values are stored per lag.
class WeightTable {
 public:
  WeightTable(double dt, int n_steps, std::vector<double> by_lag);

  double dt() const { return dt_; }
  int n_steps() const { return n_steps_; }
  /// omega_kj for 1 <= j <= k <= n_steps.
  double operator()(int k, int j) const;
  double lag(int m) const { return by_lag_.at(static_cast<std::size_t>(m)); }
  double diagonal() const { return by_lag_.front(); }
  const std::vector<double>& by_lag() const { return by_lag_; }

 private:
  double dt_;
  int n_steps_;
  std::vector<double> by_lag_;
};

/// Closed-form weights for every supported kernel.
WeightTable build_weights(const KernelSpec& kernel, double dt, int n_steps);

/// Same weights by Gauss-Legendre quadrature in the lag variable t - s, with
/// the power-law singularity removed by substitution.
WeightTable build_weights_numeric(const KernelSpec& kernel, double dt, int n_steps);

/// sum_k ( sum_{j<=k} omega_kj dt a_j ) a_k.
double positivity_form(const WeightTable& w, std::span<const double> a);

/// Time profiles g(t) whose convolution with K has a closed form.
struct PowerTime {
  double exponent = 0.0;  // g(t) = t^exponent
};
struct ExpTime {
  double rate = 1.0;  // g(t) = exp(-rate t)
};
struct PolyTime {
  std::vector<double> coefficients;  // g(t) = sum_n c_n t^n
};
using TimeProfile = std::variant<PowerTime, ExpTime, PolyTime>;

double evaluate_profile(const TimeProfile& g, double t);

class UnsupportedConvolution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed-form (K * g)(t) = int_0^t K(t - s) g(s) ds. Throws
/// UnsupportedConvolution for kernel/profile pairs without one.
double convolve_exact(const KernelSpec& kernel, const TimeProfile& g, double t);
bool has_exact_convolution(const KernelSpec& kernel, const TimeProfile& g);

/// Adaptive (tanh-sinh) evaluation of (K * g)(t) for arbitrary g.
double convolve_numeric(const KernelSpec& kernel, const std::function<double(double)>& g, double t,
                        double tolerance = 1e-12);

}  // namespace gbhe
