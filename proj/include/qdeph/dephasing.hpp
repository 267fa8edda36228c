#pragma once

// Dephasing rate, decoherence factors, reduced-state evolution, two-time maps
// with their Choi matrices, and the non-Markovian intervals of the rate.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qdeph/bath.hpp"
#include "qdeph/errors.hpp"
#include "qdeph/parallel.hpp"

namespace qdeph {

using cplx = std::complex<double>;

/// Which route a rate-type quantity is evaluated by. `Auto` picks the
/// closed form when one exists (high-temperature super-ohmic bath).
enum class Path { Auto, Quadrature, ClosedForm };

inline bool has_closed_form(const BathSpec& bath) noexcept {
  return bath.high_temperature && bath.continuum();
}

namespace detail {

inline bool use_closed_form(const BathSpec& bath, Path path) {
  if (path == Path::ClosedForm && !has_closed_form(bath))
    throw std::invalid_argument("closed form needs a high-temperature super-ohmic bath");
  return path == Path::ClosedForm || (path == Path::Auto && has_closed_form(bath));
}

inline void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and >= 0");
}

}  // namespace detail

/// gamma(t) = 4 int dw J(w) coth(w/2 theta) sin(w t)/w.
/// High-temperature super-ohmic closed form: 8 kappa theta (sin x/x^2 - cos x/x), x = w_c t.
inline double dephasing_rate(const BathSpec& bath, double t, Path path = Path::Auto) {
  detail::require_time(t);
  if (t == 0.0) return 0.0;
  if (detail::use_closed_form(bath, path)) {
    const auto& c = std::get<SuperOhmicSharp>(bath.model);
    return 8.0 * c.kappa * bath.theta * sine_moment(1, c.omega_c * t);
  }
  return 4.0 * spectral_integral(bath, ThermalWeight::Coth, TimeKernel::Sine, t);
}

/// int_0^t gamma(s) ds, with the time integral done analytically.
/// Closed form: 8 kappa theta / w_c (1 - sin x / x).
inline double integrated_rate(const BathSpec& bath, double t, Path path = Path::Auto) {
  detail::require_time(t);
  if (t == 0.0) return 0.0;
  if (detail::use_closed_form(bath, path)) {
    const auto& c = std::get<SuperOhmicSharp>(bath.model);
    return 8.0 * c.kappa * bath.theta / c.omega_c * cosine_gap_moment(0, c.omega_c * t);
  }
  return 4.0 * spectral_integral(bath, ThermalWeight::Coth, TimeKernel::CosineGap, t);
}

/// Gamma(t): the rate with tanh(w/2 theta) in place of coth; it governs the
/// environment purity.
inline double dual_rate(const BathSpec& bath, double t, Path path = Path::Auto) {
  detail::require_time(t);
  if (t == 0.0) return 0.0;
  if (detail::use_closed_form(bath, path)) {
    const auto& c = std::get<SuperOhmicSharp>(bath.model);
    return 2.0 * c.kappa * c.omega_c * c.omega_c / bath.theta * sine_moment(3, c.omega_c * t);
  }
  return 4.0 * spectral_integral(bath, ThermalWeight::Tanh, TimeKernel::Sine, t);
}

inline double integrated_dual_rate(const BathSpec& bath, double t, Path path = Path::Auto) {
  detail::require_time(t);
  if (t == 0.0) return 0.0;
  if (detail::use_closed_form(bath, path)) {
    const auto& c = std::get<SuperOhmicSharp>(bath.model);
    return 2.0 * c.kappa * c.omega_c / bath.theta * cosine_gap_moment(2, c.omega_c * t);
  }
  return 4.0 * spectral_integral(bath, ThermalWeight::Tanh, TimeKernel::CosineGap, t);
}

/// D(t) = exp(-i Omega t - int_0^t gamma).
inline cplx decoherence_factor(const BathSpec& bath, double t, double omega_qubit) {
  return std::polar(std::exp(-integrated_rate(bath, t)), -omega_qubit * t);
}

/// |G(t)| = exp(-int_0^t Gamma).
inline double g_factor(const BathSpec& bath, double t) { return std::exp(-integrated_dual_rate(bath, t)); }

// ---------------------------------------------------------------------------
// Qubit states

struct BlochState {
  double x = 0.0, y = 0.0, z = 0.0;

  /// Phase-free state with x = sqrt(r^2 - z^2), y = 0.
  static BlochState from_radius(double r, double z) {
    if (!(std::abs(z) <= r)) throw std::invalid_argument("need |z| <= r");
    return BlochState{std::sqrt(r * r - z * z), 0.0, z}.validated();
  }

  double radius() const noexcept { return std::sqrt(x * x + y * y + z * z); }
  double transverse_sq() const noexcept { return x * x + y * y; }

  BlochState validated() const {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || radius() > 1.0 + 1e-12)
      throw std::invalid_argument("Bloch vector must be finite with radius <= 1");
    return *this;
  }
};

/// 2x2 density matrix in the sigma_z eigenbasis {|0>, |1>}, sigma_z|0> = |0>.
struct QubitDensity {
  Eigen::Matrix2cd rho;

  static QubitDensity from_bloch(const BlochState& b) {
    QubitDensity q;
    q.rho << cplx(0.5 * (1.0 + b.z), 0.0), cplx(0.5 * b.x, -0.5 * b.y),
             cplx(0.5 * b.x, 0.5 * b.y), cplx(0.5 * (1.0 - b.z), 0.0);
    return q;
  }

  BlochState bloch() const {
    return {2.0 * rho(1, 0).real(), 2.0 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
  }
};

/// Multiplies the coherence rho_01 by d (rho_10 by conj(d)).
inline QubitDensity apply_decoherence(QubitDensity q, cplx d) {
  q.rho(0, 1) *= d;
  q.rho(1, 0) *= std::conj(d);
  return q;
}

inline QubitDensity evolve_reduced(const BlochState& rho0, const BathSpec& bath, double omega_qubit, double t) {
  return apply_decoherence(QubitDensity::from_bloch(rho0.validated()), decoherence_factor(bath, t, omega_qubit));
}

// ---------------------------------------------------------------------------
// Two-time maps E(t, t')

struct TwoTimeMap {
  double t_prime = 0.0;
  double t = 0.0;
  double int_gamma = 0.0;  ///< int_{t'}^{t} gamma(s) ds
  double abs_d = 1.0;      ///< exp(-int_gamma); exceeds 1 when int_gamma < 0
  double rotation = 0.0;   ///< Omega (t - t')

  cplx factor() const { return std::polar(abs_d, -rotation); }
};

inline TwoTimeMap two_time_map(const BathSpec& bath, double t_prime, double t, double omega_qubit) {
  detail::require_time(t_prime);
  detail::require_time(t);
  if (t_prime > t) throw InvalidInterval(t_prime, t);
  TwoTimeMap m;
  m.t_prime = t_prime;
  m.t = t;
  m.int_gamma = t_prime == t ? 0.0 : integrated_rate(bath, t) - integrated_rate(bath, t_prime);
  m.abs_d = std::exp(-m.int_gamma);
  m.rotation = omega_qubit * (t - t_prime);
  return m;
}

/// Choi state (1/2) sum_ij |i><j| (x) E(|i><j|), normalised to unit trace so
/// that tracing out the output factor leaves I/2.
struct ChoiMatrix {
  Eigen::Matrix4cd m;

  /// Ascending, from a dense Hermitian eigensolver.
  Eigen::Vector4d eigenvalues() const {
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(m, Eigen::EigenvaluesOnly).eigenvalues();
  }
  double min_eigenvalue() const { return eigenvalues()(0); }
};

inline ChoiMatrix choi_matrix(const TwoTimeMap& map) {
  ChoiMatrix c;
  c.m.setZero();
  const cplx d = map.factor();
  c.m(0, 0) = 0.5;
  c.m(3, 3) = 0.5;
  c.m(0, 3) = 0.5 * d;
  c.m(3, 0) = 0.5 * std::conj(d);
  return c;
}

inline constexpr double kCpTolerance = 1e-12;

inline bool is_cp(const TwoTimeMap& map) { return choi_matrix(map).min_eigenvalue() >= -kCpTolerance; }

// ---------------------------------------------------------------------------
// Non-Markovian intervals

struct Interval {
  double begin = 0.0;
  double end = 0.0;
};

namespace detail {

// Shrinks [good, bad] onto the point where pred flips; pred(good) is false,
// pred(bad) is true. Terminates at ~1e-14 relative width or when the
// midpoint stops moving.
template <class Pred>
double bisect_flip(Pred&& pred, double good, double bad) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (good + bad);
    if (mid == good || mid == bad) break;
    if (std::abs(bad - good) <= 1e-14 * std::max(std::abs(good), std::abs(bad))) break;
    (pred(mid) ? bad : good) = mid;
  }
  return 0.5 * (good + bad);
}

}  // namespace detail

/// Maximal sub-intervals of the grid window on which gamma < 0, endpoints
/// refined by bisection on gamma itself. Values within 1e-12 max|gamma| of
/// zero count as zero. An interval still open at the last grid point ends
/// there.
inline std::vector<Interval> nonmarkov_intervals(const BathSpec& bath, const TimeGrid& grid,
                                                 std::size_t workers = 0) {
  std::vector<double> gamma(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { gamma[k] = dephasing_rate(bath, grid[k]); }, workers);

  double scale = 0.0;
  for (double g : gamma) scale = std::max(scale, std::abs(g));
  const double tol = 1e-12 * scale;
  auto negative = [&](double t) { return dephasing_rate(bath, t) < -tol; };

  std::vector<Interval> out;
  std::size_t k = 0;
  while (k < grid.size()) {
    if (!(gamma[k] < -tol)) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    while (k < grid.size() && gamma[k] < -tol) ++k;
    Interval iv;
    iv.begin = first == 0 ? grid[0] : detail::bisect_flip(negative, grid[first - 1], grid[first]);
    iv.end = k == grid.size() ? grid.back()
                              : detail::bisect_flip([&](double t) { return !negative(t); }, grid[k - 1], grid[k]);
    out.push_back(iv);
  }
  return out;
}

/// Total increase of |D| over the gamma < 0 intervals: the trace-distance
/// gain of an antipodal equatorial state pair.
inline double blp_measure(const BathSpec& bath, const TimeGrid& grid, std::size_t workers = 0) {
  double total = 0.0;
  for (const auto& iv : nonmarkov_intervals(bath, grid, workers))
    total += std::exp(-integrated_rate(bath, iv.end)) - std::exp(-integrated_rate(bath, iv.begin));
  return total;
}

// ---------------------------------------------------------------------------
// Rate traces

struct RateTrace {
  std::vector<double> times;
  std::vector<double> gamma;
  std::vector<double> int_gamma;
  std::vector<double> abs_d;
  std::vector<double> gamma_dual;
  std::vector<double> int_gamma_dual;
  std::vector<double> abs_g;

  std::size_t size() const noexcept { return times.size(); }
};

inline RateTrace rate_trace(const BathSpec& bath, const TimeGrid& grid, std::size_t workers = 0) {
  validate(bath);
  const std::size_t n = grid.size();
  RateTrace r;
  r.times.assign(grid.times().begin(), grid.times().end());
  r.gamma.resize(n);
  r.int_gamma.resize(n);
  r.abs_d.resize(n);
  r.gamma_dual.resize(n);
  r.int_gamma_dual.resize(n);
  r.abs_g.resize(n);
  parallel_for(
      n,
      [&](std::size_t k) {
        const double t = grid[k];
        r.gamma[k] = dephasing_rate(bath, t);
        r.int_gamma[k] = integrated_rate(bath, t);
        r.abs_d[k] = std::exp(-r.int_gamma[k]);
        r.gamma_dual[k] = dual_rate(bath, t);
        r.int_gamma_dual[k] = integrated_dual_rate(bath, t);
        r.abs_g[k] = std::exp(-r.int_gamma_dual[k]);
      },
      workers);
  return r;
}

}  // namespace qdeph
