#pragma once

// Spectral densities, thermal weights and the frequency quadrature shared by
// every rate and witness integral.
//
// Units: hbar = k_B = 1. Frequencies are measured in a reference frequency
// omega_ref (the cutoff omega_c for the continuum model, so omega_c = 1 there
// by default) and times are dimensionless omega_ref * t. The temperature is
// theta = k_B T / (hbar omega_ref).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "qdeph/errors.hpp"

namespace qdeph {

/// J(w) = kappa w^3 / w_c^2 for 0 <= w <= w_c, zero above the cutoff.
struct SuperOhmicSharp {
  double kappa = 0.01;
  double omega_c = 1.0;
};

/// A single environment oscillator with real coupling g and frequency omega.
struct Mode {
  double g = 0.0;
  double omega = 1.0;
};

/// J(w) = sum_k g_k^2 delta(w - w_k).
struct Discrete {
  std::vector<Mode> modes;
};

using SpectralModel = std::variant<SuperOhmicSharp, Discrete>;

inline void validate(const SpectralModel& model) {
  if (const auto* c = std::get_if<SuperOhmicSharp>(&model)) {
    if (!(c->kappa > 0.0) || !std::isfinite(c->kappa))
      throw std::invalid_argument("kappa must be positive and finite");
    if (!(c->omega_c > 0.0) || !std::isfinite(c->omega_c))
      throw std::invalid_argument("omega_c must be positive and finite");
    return;
  }
  const auto& d = std::get<Discrete>(model);
  if (d.modes.empty()) throw std::invalid_argument("discrete mode list is empty");
  for (const auto& m : d.modes) {
    if (!(m.omega > 0.0) || !std::isfinite(m.omega))
      throw std::invalid_argument("mode frequency must be positive and finite");
    if (!std::isfinite(m.g)) throw std::invalid_argument("mode coupling must be finite");
  }
}

struct BathSpec {
  SpectralModel model = SuperOhmicSharp{};
  double theta = 10.0;
  /// Replace the thermal weights by their leading high-temperature forms
  /// (coth(w/2T) -> 2T/w, tanh(w/2T) -> w/2T, exp(w/T) -> 1, sinh(w/T) -> w/T).
  /// This is the regime in which the super-ohmic closed forms are exact.
  bool high_temperature = true;

  bool continuum() const noexcept { return std::holds_alternative<SuperOhmicSharp>(model); }
};

inline void validate(const BathSpec& bath) {
  validate(bath.model);
  if (!(bath.theta >= 0.0) || !std::isfinite(bath.theta))
    throw std::invalid_argument("theta must be finite and >= 0");
  if (bath.high_temperature && bath.theta == 0.0)
    throw std::invalid_argument("high-temperature forms require theta > 0");
}

/// Strictly increasing, finite sample times starting at 0.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty() || times_.front() != 0.0)
      throw std::invalid_argument("time grid must start at 0");
    for (std::size_t k = 0; k < times_.size(); ++k) {
      if (!std::isfinite(times_[k])) throw std::invalid_argument("time grid must be finite");
      if (k > 0 && !(times_[k] > times_[k - 1]))
        throw std::invalid_argument("time grid must be strictly increasing");
    }
  }

  /// steps + 1 equally spaced points on [0, t_max].
  static TimeGrid uniform(double t_max, std::size_t steps) {
    if (!(t_max > 0.0) || steps == 0) throw std::invalid_argument("uniform grid needs t_max > 0, steps > 0");
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k)
      t[k] = t_max * static_cast<double>(k) / static_cast<double>(steps);
    return TimeGrid(std::move(t));
  }

  std::span<const double> times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }
  double operator[](std::size_t k) const { return times_[k]; }
  double back() const { return times_.back(); }

 private:
  std::vector<double> times_;
};

inline double spectral_density(const SpectralModel& model, double omega) {
  const auto* c = std::get_if<SuperOhmicSharp>(&model);
  if (c == nullptr) throw DiscreteModelHasNoDensity();
  if (omega < 0.0) throw std::invalid_argument("spectral density needs omega >= 0");
  if (omega > c->omega_c) return 0.0;
  return c->kappa * omega * omega * omega / (c->omega_c * c->omega_c);
}

/// Bose occupation 1/(exp(w/theta) - 1); zero at theta = 0.
inline double thermal_occupation(double omega, double theta) {
  if (theta == 0.0) return 0.0;
  return 1.0 / std::expm1(omega / theta);
}

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-9;
  std::size_t max_panels = std::size_t{1} << 20;
  /// Number of equal panels the interval is split into before refinement.
  std::size_t initial_panels = 1;
};

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error, l1;
};

template <class F>
Panel kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double l1 = std::abs(fc) * kKronrodWeights[7];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    l1 += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), l1 * std::abs(half)};
}

struct WorstFirst {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
///
/// The panel with the largest embedded error estimate is bisected until the
/// summed estimate drops below rel_tol * |value|, or below the round-off
/// floor 50 eps * int|f| when the integral cancels to (nearly) zero. The
/// result is deterministic: panels are summed in left-to-right order.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("integrate needs finite a <= b");
  if (a == b) return {0.0, 0.0};

  std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::WorstFirst> queue;
  double value = 0.0, error = 0.0, l1 = 0.0;
  const std::size_t n0 = std::max<std::size_t>(1, opt.initial_panels);
  for (std::size_t k = 0; k < n0; ++k) {
    const double lo = a + (b - a) * static_cast<double>(k) / static_cast<double>(n0);
    const double hi = k + 1 == n0 ? b : a + (b - a) * static_cast<double>(k + 1) / static_cast<double>(n0);
    const auto panel = detail::kronrod15(f, lo, hi);
    value += panel.value;
    error += panel.error;
    l1 += panel.l1;
    queue.push(panel);
  }

  // Final sums are taken left to right so they do not depend on refinement order.
  auto ordered_sum = [&queue] {
    std::vector<detail::Panel> panels;
    panels.reserve(queue.size());
    for (auto copy = queue; !copy.empty(); copy.pop()) panels.push_back(copy.top());
    std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    QuadratureResult r;
    for (const auto& p : panels) {
      r.value += p.value;
      r.error += p.error;
    }
    return r;
  };

  constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();
  auto converged = [&] {
    return error <= opt.rel_tol * std::abs(value) || error <= kRoundoff * l1;
  };

  while (!converged()) {
    if (queue.size() >= opt.max_panels) {
      const auto r = ordered_sum();
      throw QuadratureNotConverged(r.value, r.error);
    }
    const detail::Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const detail::Panel left = detail::kronrod15(f, worst.a, mid);
    const detail::Panel right = detail::kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    queue.push(left);
    queue.push(right);
  }
  return ordered_sum();
}

// ---------------------------------------------------------------------------
// Thermal weights and frequency integrals

enum class ThermalWeight {
  Coth,  ///< coth(w / 2 theta) = 2 nbar + 1
  Tanh,  ///< tanh(w / 2 theta)
  Exp,   ///< exp(w / theta)
  Sinh,  ///< sinh(w / theta)
};

inline double thermal_weight(ThermalWeight kind, double omega, double theta, bool high_temperature) {
  if (high_temperature) {
    switch (kind) {
      case ThermalWeight::Coth: return 2.0 * theta / omega;
      case ThermalWeight::Tanh: return omega / (2.0 * theta);
      case ThermalWeight::Exp: return 1.0;
      case ThermalWeight::Sinh: return omega / theta;
    }
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case ThermalWeight::Coth: return theta == 0.0 ? 1.0 : 1.0 / std::tanh(omega / (2.0 * theta));
    case ThermalWeight::Tanh: return theta == 0.0 ? 1.0 : std::tanh(omega / (2.0 * theta));
    case ThermalWeight::Exp: return theta == 0.0 ? inf : std::exp(omega / theta);
    case ThermalWeight::Sinh: return theta == 0.0 ? inf : std::sinh(omega / theta);
  }
  return 0.0;
}

/// Time kernels left after performing the time integrals analytically.
enum class TimeKernel {
  Sine,        ///< int_0^t cos(w s) ds = sin(w t) / w
  CosineGap,   ///< int_0^t ds int_0^s dtau cos(w (s - tau)) = (1 - cos(w t)) / w^2
};

inline double time_kernel(TimeKernel kernel, double omega, double t) {
  if (omega == 0.0) return kernel == TimeKernel::Sine ? t : 0.5 * t * t;
  if (kernel == TimeKernel::Sine) return std::sin(omega * t) / omega;
  const double s = std::sin(0.5 * omega * t) / omega;
  return 2.0 * s * s;
}

/// int J(w) f(w) dw for the continuum model, sum g_k^2 f(w_k) for modes.
/// `initial_panels` pre-splits the continuum range (use ~ omega_c t / pi for
/// integrands oscillating with frequency t).
template <class F>
double spectral_sum(const SpectralModel& model, F&& f, std::size_t initial_panels = 1,
                    double rel_tol = 1e-9) {
  if (const auto* d = std::get_if<Discrete>(&model)) {
    double sum = 0.0;
    for (const auto& m : d->modes) sum += m.g * m.g * f(m.omega);
    return sum;
  }
  const auto& c = std::get<SuperOhmicSharp>(model);
  auto integrand = [&](double w) { return spectral_density(model, w) * f(w); };
  QuadratureOptions opt;
  opt.rel_tol = rel_tol;
  opt.initial_panels = initial_panels;
  return integrate(integrand, 0.0, c.omega_c, opt).value;
}

/// int J(w) weight(w) kernel(w, t) dw (or the discrete sum).
inline double spectral_integral(const BathSpec& bath, ThermalWeight weight, TimeKernel kernel, double t) {
  std::size_t panels = 1;
  if (const auto* c = std::get_if<SuperOhmicSharp>(&bath.model))
    panels += static_cast<std::size_t>(std::ceil(c->omega_c * t / std::numbers::pi));
  return spectral_sum(
      bath.model,
      [&](double w) {
        return thermal_weight(weight, w, bath.theta, bath.high_temperature) * time_kernel(kernel, w, t);
      },
      panels);
}

// ---------------------------------------------------------------------------
// Moments of the sharp super-ohmic cutoff, used by the closed forms.

/// int_0^1 u^p sin(u x) du.
inline double sine_moment(int p, double x);
/// int_0^1 u^p (1 - cos(u x)) du.
inline double cosine_gap_moment(int p, double x);

namespace detail {

// Both moments together by upward recursion; stable for |x| >= 2.
inline std::pair<double, double> trig_moments(int p, double x) {
  double s = (1.0 - std::cos(x)) / x;  // int u^0 sin
  double c = std::sin(x) / x;          // int u^0 cos
  for (int k = 1; k <= p; ++k) {
    const double s_next = -std::cos(x) / x + k / x * c;
    const double c_next = std::sin(x) / x - k / x * s;
    s = s_next;
    c = c_next;
  }
  return {s, c};
}

}  // namespace detail

inline double sine_moment(int p, double x) {
  if (std::abs(x) >= 2.0) return detail::trig_moments(p, x).first;
  // sin(ux) = sum (-1)^n (ux)^(2n+1) / (2n+1)!
  double term = x;  // x^(2n+1) / (2n+1)!
  double sum = 0.0;
  for (int n = 0; n < 40; ++n) {
    const double add = term / (p + 2 * n + 2);
    sum += (n % 2 == 0) ? add : -add;
    if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
    term *= x * x / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
  }
  return sum;
}

inline double cosine_gap_moment(int p, double x) {
  if (std::abs(x) >= 2.0) return 1.0 / (p + 1) - detail::trig_moments(p, x).second;
  // 1 - cos(ux) = sum_{n>=1} (-1)^(n+1) (ux)^(2n) / (2n)!
  double term = 0.5 * x * x;  // x^(2n) / (2n)!
  double sum = 0.0;
  for (int n = 1; n < 40; ++n) {
    const double add = term / (p + 2 * n + 1);
    sum += (n % 2 == 1) ? add : -add;
    if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
    term *= x * x / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
  }
  return sum;
}

/// Midpoint discretisation of the sharp super-ohmic density into n modes,
/// g_k^2 = J(w_k) dw.
inline Discrete discretize(const SuperOhmicSharp& c, std::size_t n) {
  if (n == 0) throw std::invalid_argument("discretize needs n > 0");
  Discrete d;
  d.modes.reserve(n);
  const double dw = c.omega_c / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = (static_cast<double>(k) + 0.5) * dw;
    d.modes.push_back({std::sqrt(spectral_density(SpectralModel{c}, w) * dw), w});
  }
  return d;
}

}  // namespace qdeph
