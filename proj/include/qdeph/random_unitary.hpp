#pragma once

// Random-unitary representations of the reduced dephasing dynamics:
//  * the two-point mixture  p1 U1 rho U1^+ + p2 U2 rho U2^+,
//    U1 = exp(-i phase sigma_z / 2), U2 = U1 sigma_z, p_{1,2} = (1 +- |D|)/2;
//  * the random-field ensemble: each thermal Wigner sample alpha drives the
//    qubit with H_alpha(s) = sigma_z h_alpha(s), and D(t) is the ensemble
//    average of the unit-modulus factor exp(-i Phi_alpha(t)).

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qdeph/bath.hpp"
#include "qdeph/dephasing.hpp"
#include "qdeph/errors.hpp"
#include "qdeph/parallel.hpp"

namespace qdeph {

struct TwoPointMixture {
  double p1 = 1.0;     ///< weight of the pure rotation U1
  double p2 = 0.0;     ///< weight of the sigma_z-composed branch U2 = U1 sigma_z
  double phase = 0.0;  ///< rotation angle Omega t

  Eigen::Matrix2cd u1() const {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
    u(0, 0) = std::polar(1.0, -0.5 * phase);
    u(1, 1) = std::polar(1.0, 0.5 * phase);
    return u;
  }
  Eigen::Matrix2cd u2() const {
    Eigen::Matrix2cd u = u1();
    u(1, 1) = -u(1, 1);
    return u;
  }

  QubitDensity apply(const QubitDensity& q) const {
    const Eigen::Matrix2cd a = u1(), b = u2();
    return {p1 * a * q.rho * a.adjoint() + p2 * b * q.rho * b.adjoint()};
  }
};

inline TwoPointMixture kraus_two_point(double abs_d, double omega_qubit, double t) {
  if (!(abs_d >= 0.0 && abs_d <= 1.0)) throw InvalidModulus(abs_d);
  return {0.5 * (1.0 + abs_d), 0.5 * (1.0 - abs_d), omega_qubit * t};
}

/// Mixture for E(t, t'); throws NotRandomUnitary carrying (1 - |D(t,t')|)/2
/// when that weight is negative beyond the CP tolerance.
inline TwoPointMixture kraus_two_time(const BathSpec& bath, double t_prime, double t, double omega_qubit) {
  const TwoTimeMap map = two_time_map(bath, t_prime, t, omega_qubit);
  const double p2 = 0.5 * (1.0 - map.abs_d);
  if (p2 < -kCpTolerance) throw NotRandomUnitary(p2);
  const double w2 = std::max(p2, 0.0);
  return {1.0 - w2, w2, map.rotation};
}

// ---------------------------------------------------------------------------
// Wigner sampling

struct WignerSample {
  std::vector<cplx> alphas;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1], a pure function of (seed, index, slot).
inline double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t slot) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(index ^ splitmix64(slot + 0x632be59bd9b4e019ULL)));
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

}  // namespace detail

/// Thermal Wigner sample: each alpha_k is complex Gaussian with
/// E|alpha_k|^2 = nbar_k + 1/2. Sample `index` of stream `seed` is the same
/// regardless of which other samples are drawn or in which order.
inline WignerSample sample_wigner(const Discrete& model, double theta, std::uint64_t seed, std::uint64_t index) {
  WignerSample s;
  s.alphas.reserve(model.modes.size());
  for (std::size_t k = 0; k < model.modes.size(); ++k) {
    const double sigma = std::sqrt(0.5 * (thermal_occupation(model.modes[k].omega, theta) + 0.5));
    const double u1 = detail::counter_uniform(seed, index, 2 * k);
    const double u2 = detail::counter_uniform(seed, index, 2 * k + 1);
    const double rad = sigma * std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    s.alphas.emplace_back(rad * std::cos(ang), rad * std::sin(ang));
  }
  return s;
}

/// h_alpha(s) = Omega/2 - 2 sum_k g_k Re(alpha_k exp(-i w_k s)); the qubit
/// Hamiltonian of one ensemble member is sigma_z h_alpha(s).
inline double random_field(const WignerSample& sample, const Discrete& model, double omega_qubit, double s) {
  double f = 0.5 * omega_qubit;
  for (std::size_t k = 0; k < model.modes.size(); ++k)
    f -= 2.0 * model.modes[k].g * (sample.alphas[k] * std::polar(1.0, -model.modes[k].omega * s)).real();
  return f;
}

/// Phi_alpha(t) = 2 int_0^t h_alpha(s) ds
///              = Omega t - 4 sum_k g_k Re(alpha_k (1 - exp(-i w_k t)) / (i w_k)).
/// The coherence of one ensemble member evolves as exp(-i Phi) rho_01.
inline double trajectory_phase(const WignerSample& sample, const Discrete& model, double omega_qubit, double t) {
  double phi = omega_qubit * t;
  for (std::size_t k = 0; k < model.modes.size(); ++k) {
    const double w = model.modes[k].omega;
    const double half = std::sin(0.5 * w * t);
    const cplx mode_integral(std::sin(w * t) / w, -2.0 * half * half / w);
    phi -= 4.0 * model.modes[k].g * (sample.alphas[k] * mode_integral).real();
  }
  return phi;
}

struct McEstimate {
  cplx mean;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMcBatches = 32;

/// Ensemble average of exp(-i Phi) over n_samples Wigner samples. The
/// standard error comes from the spread of 32 batch means. Output is
/// bitwise identical for any worker count.
inline McEstimate mc_decoherence(const Discrete& model, double theta, double omega_qubit, double t,
                                 std::size_t n_samples, std::uint64_t seed, std::size_t workers = 0) {
  if (n_samples < 2) throw std::invalid_argument("mc_decoherence needs at least 2 samples");
  validate(SpectralModel{model});
  const std::size_t batches = std::min(kMcBatches, n_samples);
  std::vector<cplx> sums(batches);
  std::vector<std::size_t> counts(batches);
  parallel_for(
      batches,
      [&](std::size_t b) {
        const std::size_t lo = n_samples * b / batches;
        const std::size_t hi = n_samples * (b + 1) / batches;
        cplx acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
          acc += std::polar(1.0, -trajectory_phase(sample_wigner(model, theta, seed, i), model, omega_qubit, t));
        sums[b] = acc;
        counts[b] = hi - lo;
      },
      workers);

  McEstimate est;
  est.n_samples = n_samples;
  est.seed = seed;
  cplx total = 0.0;
  for (const auto& s : sums) total += s;
  est.mean = total / static_cast<double>(n_samples);
  double var = 0.0;
  for (std::size_t b = 0; b < batches; ++b)
    var += std::norm(sums[b] / static_cast<double>(counts[b]) - est.mean);
  est.std_error = std::sqrt(var / static_cast<double>(batches * (batches - 1)));
  return est;
}

/// Exact Gaussian average of exp(-i Phi) without the Omega phase:
/// prod_k exp(-16 g_k^2 (nbar_k + 1/2) sin^2(w_k t / 2) / w_k^2).
inline double gaussian_average_exact(const Discrete& model, double theta, double t) {
  double exponent = 0.0;
  for (const auto& m : model.modes) {
    const double s = std::sin(0.5 * m.omega * t) / m.omega;
    exponent += 16.0 * m.g * m.g * (thermal_occupation(m.omega, theta) + 0.5) * s * s;
  }
  return std::exp(-exponent);
}

}  // namespace qdeph
