#include "gbhe/kernel.hpp"

#include "gbhe/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace gbhe {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument("kernel: cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

double power_scale(const PowerLawKernel& k) { return k.normalized ? 1.0 / std::tgamma(k.alpha) : 1.0; }

/// (m+1)^p - 2 m^p + (m-1)^p for m >= 1; binomial series for large m avoids
/// the cancellation of the direct form.
double second_difference(double p, int m) {
  const double md = m;
  if (m < 8) return std::pow(md + 1.0, p) - 2.0 * std::pow(md, p) + std::pow(md - 1.0, p);
  const double x = 1.0 / md;
  double coeff = 1.0;  // binomial(p, n)
  double xn = 1.0;
  double sum = 0.0;
  for (int n = 0; n < 60; ++n) {
    if (n > 0) {
      coeff *= (p - (n - 1)) / n;
      xn *= x;
    }
    if (n >= 2 && n % 2 == 0) {
      const double term = 2.0 * coeff * xn;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
  }
  return std::pow(md, p) * sum;
}

/// Composite Gauss-Legendre integral of f over [a, b].
double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels, const LineRule& rule) {
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (std::size_t q = 0; q < rule.points.size(); ++q) sum += rule.weights[q] * f(lo + width * rule.points[q]);
  }
  return sum * width;
}

}  // namespace

KernelSpec::KernelSpec(Variant v) : v_(std::move(v)) {
  std::visit(Overloaded{[](const NoKernel&) {},
                        [](const PowerLawKernel& k) {
                          if (!(k.alpha > 0.0 && k.alpha <= 1.0))
                            throw std::invalid_argument("power-law kernel: alpha must lie in (0, 1]");
                        },
                        [](const ExponentialKernel& k) {
                          if (!(k.rate >= 0.0) || !std::isfinite(k.rate))
                            throw std::invalid_argument(
                                "exponential kernel: rate must be finite and >= 0 (K must be nonincreasing)");
                        }},
             v_);
}

KernelSpec KernelSpec::parse(std::string_view text) {
  if (text == "none") return none();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("kernel: unrecognised spec '" + std::string(text) + "'");
  const auto head = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  if (head == "exp") return exponential(parse_number(arg, "rate"));
  if (head == "power") return power_law(parse_number(arg, "alpha"), false);
  if (head == "power-normalized") return power_law(parse_number(arg, "alpha"), true);
  throw std::invalid_argument("kernel: unrecognised family '" + std::string(head) + "'");
}

std::string KernelSpec::to_string() const {
  std::ostringstream out;
  out.precision(17);
  std::visit(Overloaded{[&](const NoKernel&) { out << "none"; },
                        [&](const PowerLawKernel& k) {
                          out << (k.normalized ? "power-normalized:" : "power:") << k.alpha;
                        },
                        [&](const ExponentialKernel& k) { out << "exp:" << k.rate; }},
             v_);
  return out.str();
}

double KernelSpec::operator()(double t) const {
  return std::visit(Overloaded{[](const NoKernel&) { return 0.0; },
                               [t](const PowerLawKernel& k) { return power_scale(k) * std::pow(t, k.alpha - 1.0); },
                               [t](const ExponentialKernel& k) { return std::exp(-k.rate * t); }},
                    v_);
}

WeightTable::WeightTable(double dt, int n_steps, std::vector<double> by_lag)
    : dt_(dt), n_steps_(n_steps), by_lag_(std::move(by_lag)) {
  if (by_lag_.size() != static_cast<std::size_t>(n_steps_))
    throw std::invalid_argument("WeightTable: need one weight per lag");
}

double WeightTable::operator()(int k, int j) const {
  if (j < 1 || j > k || k > n_steps_) throw std::out_of_range("WeightTable: need 1 <= j <= k <= N");
  return by_lag_[static_cast<std::size_t>(k - j)];
}

WeightTable build_weights(const KernelSpec& kernel, double dt, int n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("build_weights: dt must be positive");
  if (n_steps < 1) throw std::invalid_argument("build_weights: need at least one step");
  std::vector<double> w(static_cast<std::size_t>(n_steps), 0.0);
  std::visit(Overloaded{[](const NoKernel&) {},
                        [&](const PowerLawKernel& k) {
                          const double a = k.alpha;
                          const double scale = power_scale(k) * std::pow(dt, a - 1.0) / (a * (a + 1.0));
                          w[0] = scale;
                          for (int m = 1; m < n_steps; ++m) w[static_cast<std::size_t>(m)] = scale * second_difference(a + 1.0, m);
                        },
                        [&](const ExponentialKernel& k) {
                          const double x = k.rate * dt;
                          if (x == 0.0) {
                            w[0] = 0.5;
                            for (int m = 1; m < n_steps; ++m) w[static_cast<std::size_t>(m)] = 1.0;
                            return;
                          }
                          // (x - (1 - e^{-x})) / x^2, by series when cancellation bites.
                          w[0] = x < 1e-3 ? 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0
                                          : (x + std::expm1(-x)) / (x * x);
                          const double cross = std::expm1(x) * -std::expm1(-x) / (x * x);
                          for (int m = 1; m < n_steps; ++m) w[static_cast<std::size_t>(m)] = cross * std::exp(-m * x);
                        }},
             kernel.variant());
  return WeightTable(dt, n_steps, std::move(w));
}

WeightTable build_weights_numeric(const KernelSpec& kernel, double dt, int n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("build_weights_numeric: dt must be positive");
  if (n_steps < 1) throw std::invalid_argument("build_weights_numeric: need at least one step");
  std::vector<double> w(static_cast<std::size_t>(n_steps), 0.0);
  if (kernel.is_none()) return WeightTable(dt, n_steps, std::move(w));

  // With t = t_{k-1} + dt x and s = t_{j-1} + dt y the double integral over the
  // step square collapses onto the lag z = m + x - y:
  //   omega_m = int K(dt z) (1 - |z - m|) dz over [m-1, m+1]   (m >= 1)
  //   omega_0 = int K(dt z) (1 - z) dz over [0, 1].
  // Near z = 0 a power-law kernel is smoothed by z = u^(1/alpha).
  double q = 1.0;
  if (const auto* p = std::get_if<PowerLawKernel>(&kernel.variant())) q = 1.0 / p->alpha;
  const LineRule rule = gauss_legendre_unit(20);
  auto from_zero = [&](const std::function<double(double)>& hat) {
    return composite_gauss(
        [&](double u) {
          if (u <= 0.0) return 0.0;
          const double z = std::pow(u, q);
          return kernel(dt * z) * hat(z) * q * std::pow(u, q - 1.0);
        },
        0.0, 1.0, 8, rule);
  };
  w[0] = from_zero([](double z) { return 1.0 - z; });
  for (int m = 1; m < n_steps; ++m) {
    const double md = m;
    const double left = (m == 1) ? from_zero([](double z) { return z; })
                                 : composite_gauss([&](double z) { return kernel(dt * z) * (1.0 - (md - z)); },
                                                   md - 1.0, md, 8, rule);
    const double right =
        composite_gauss([&](double z) { return kernel(dt * z) * (1.0 - (z - md)); }, md, md + 1.0, 8, rule);
    w[static_cast<std::size_t>(m)] = left + right;
  }
  return WeightTable(dt, n_steps, std::move(w));
}

double positivity_form(const WeightTable& w, std::span<const double> a) {
  if (a.size() != static_cast<std::size_t>(w.n_steps()))
    throw std::invalid_argument("positivity_form: sequence length must equal n_steps");
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double inner = 0.0;
    for (std::size_t j = 0; j <= k; ++j) inner += w.lag(static_cast<int>(k - j)) * w.dt() * a[j];
    total += inner * a[k];
  }
  return total;
}

double evaluate_profile(const TimeProfile& g, double t) {
  return std::visit(Overloaded{[t](const PowerTime& p) { return p.exponent == 0.0 ? 1.0 : std::pow(t, p.exponent); },
                               [t](const ExpTime& e) { return std::exp(-e.rate * t); },
                               [t](const PolyTime& p) {
                                 double v = 0.0;
                                 for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it)
                                   v = v * t + *it;
                                 return v;
                               }},
                    g);
}

namespace {

/// int_0^t e^{-lambda (t - s)} s^n ds.
double exp_times_monomial(double lambda, int n, double t) {
  if (lambda * t < 1.0) {
    // sum_k (-lambda)^k t^{n+k+1} n! / (n+k+1)!
    double term = std::pow(t, n + 1) / (n + 1);  // k = 0
    double sum = term;
    for (int k = 1; k < 200; ++k) {
      term *= -lambda * t / (n + k + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  double value = -std::expm1(-lambda * t) / lambda;  // n = 0
  for (int i = 1; i <= n; ++i) value = (std::pow(t, i) - i * value) / lambda;
  return value;
}

bool is_nonneg_integer(double x) { return x >= 0.0 && x == std::floor(x) && x < 64.0; }

}  // namespace

bool has_exact_convolution(const KernelSpec& kernel, const TimeProfile& g) {
  if (kernel.is_none()) return true;
  if (std::holds_alternative<PowerLawKernel>(kernel.variant()))
    return !std::holds_alternative<ExpTime>(g);
  if (const auto* p = std::get_if<PowerTime>(&g)) return is_nonneg_integer(p->exponent);
  return true;
}

double convolve_exact(const KernelSpec& kernel, const TimeProfile& g, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("convolve_exact: t must be >= 0");
  if (!has_exact_convolution(kernel, g))
    throw UnsupportedConvolution("convolve_exact: no closed form for kernel " + kernel.to_string() +
                                 " with this time profile");
  if (kernel.is_none() || t == 0.0) return 0.0;

  if (const auto* pk = std::get_if<PowerLawKernel>(&kernel.variant())) {
    const double a = pk->alpha;
    const double c = power_scale(*pk);
    // Beta identity: int_0^t (t-s)^{a-1} s^m ds = t^{m+a} Gamma(a) Gamma(m+1) / Gamma(m+a+1).
    auto monomial = [&](double m) {
      return std::exp(std::lgamma(a) + std::lgamma(m + 1.0) - std::lgamma(m + a + 1.0)) * std::pow(t, m + a);
    };
    if (const auto* p = std::get_if<PowerTime>(&g)) {
      if (p->exponent < 0.0) throw UnsupportedConvolution("convolve_exact: negative time exponent");
      return c * monomial(p->exponent);
    }
    const auto& poly = std::get<PolyTime>(g);
    double sum = 0.0;
    for (std::size_t n = 0; n < poly.coefficients.size(); ++n)
      if (poly.coefficients[n] != 0.0) sum += poly.coefficients[n] * monomial(static_cast<double>(n));
    return c * sum;
  }

  const double lambda = std::get<ExponentialKernel>(kernel.variant()).rate;
  if (const auto* e = std::get_if<ExpTime>(&g)) {
    const double d = lambda - e->rate;
    if (d == 0.0) return t * std::exp(-lambda * t);
    return std::exp(-e->rate * t) * -std::expm1(-d * t) / d;
  }
  if (const auto* p = std::get_if<PowerTime>(&g)) return exp_times_monomial(lambda, static_cast<int>(p->exponent), t);
  const auto& poly = std::get<PolyTime>(g);
  double sum = 0.0;
  for (std::size_t n = 0; n < poly.coefficients.size(); ++n)
    if (poly.coefficients[n] != 0.0) sum += poly.coefficients[n] * exp_times_monomial(lambda, static_cast<int>(n), t);
  return sum;
}

double convolve_numeric(const KernelSpec& kernel, const std::function<double(double)>& g, double t,
                        double tolerance) {
  if (!(t >= 0.0)) throw std::invalid_argument("convolve_numeric: t must be >= 0");
  if (kernel.is_none() || t == 0.0) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  // Integrate in the lag tau = t - s so the kernel singularity sits at the
  // left endpoint, where abscissae are resolved without cancellation.
  return integrator.integrate([&](double tau) { return kernel(tau) * g(t - tau); }, 0.0, t, tolerance);
}

}  // namespace gbhe
