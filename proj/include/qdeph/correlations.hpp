#pragma once

// Purity-based system-environment correlations
//   C = ln P_tot - ln P_sys - ln P_env = C_sys + C_env,
// with C_sys = ln(P_sys(0)/P_sys(t)) and C_env = ln(P_env(0)/P_env(t)).

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qdeph/bath.hpp"
#include "qdeph/dephasing.hpp"

namespace qdeph {

/// P_sys = (1 + z^2 + (x^2 + y^2)|D|^2) / 2.
inline double purity_system(const BlochState& b, double abs_d) {
  if (!(abs_d >= 0.0 && abs_d <= 1.0 + 1e-12)) throw std::invalid_argument("purity_system needs 0 <= |D| <= 1");
  return 0.5 * (1.0 + b.z * b.z + b.transverse_sq() * abs_d * abs_d);
}

/// P_env(t) / P_env(0) = (1 + z^2 + (1 - z^2)|G|^2) / 2.
inline double purity_env_relative(const BlochState& b, double abs_g) {
  if (!(abs_g >= 0.0 && abs_g <= 1.0 + 1e-12)) throw std::invalid_argument("purity_env_relative needs 0 <= |G| <= 1");
  return 0.5 * (1.0 + b.z * b.z + (1.0 - b.z * b.z) * abs_g * abs_g);
}

/// Initial environment purity.
///
/// Discrete modes: the exact thermal product prod_k tanh(w_k / 2 theta).
/// Continuum: exp(int J(w) ln tanh(w / theta) dw), the J-weighted mode-density
/// convention. The two are different normalisations; only the discrete
/// product is a literal Tr(rho_env^2).
inline double purity_env_initial(const BathSpec& bath) {
  if (bath.theta == 0.0) return 1.0;
  if (const auto* d = std::get_if<Discrete>(&bath.model)) {
    double p = 1.0;
    for (const auto& m : d->modes) p *= std::tanh(m.omega / (2.0 * bath.theta));
    return p;
  }
  const double theta = bath.theta;
  return std::exp(spectral_sum(bath.model, [theta](double w) { return std::log(std::tanh(w / theta)); }));
}

struct CorrelationTrace {
  std::vector<double> times;
  std::vector<double> p_sys;
  std::vector<double> p_env_rel;
  std::vector<double> c_sys;
  std::vector<double> c_env;
  std::vector<double> c_total;
  std::vector<double> cdot_sys;  ///< -d ln P_sys / dt
  std::vector<double> cdot_env;  ///< -d ln P_env / dt

  std::size_t size() const noexcept { return times.size(); }
};

/// Correlation measure along a rate trace. The rates of change are the exact
/// time derivatives of the purity expressions,
///   dC_sys/dt = 2 gamma (x^2+y^2)|D|^2 / (1 + z^2 + (x^2+y^2)|D|^2),
///   dC_env/dt = 2 Gamma (1-z^2)|G|^2 / (1 + z^2 + (1-z^2)|G|^2),
/// so sign(dC_sys/dt) = sign(gamma) and sign(dC_env/dt) = sign(Gamma).
inline CorrelationTrace correlation_trace(const BlochState& rho0, const RateTrace& rates) {
  const BlochState b = rho0.validated();
  const double xy = b.transverse_sq();
  const double z2 = b.z * b.z;
  const double p_sys0 = purity_system(b, 1.0);

  CorrelationTrace c;
  const std::size_t n = rates.size();
  c.times = rates.times;
  c.p_sys.resize(n);
  c.p_env_rel.resize(n);
  c.c_sys.resize(n);
  c.c_env.resize(n);
  c.c_total.resize(n);
  c.cdot_sys.resize(n);
  c.cdot_env.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double d2 = rates.abs_d[k] * rates.abs_d[k];
    const double g2 = rates.abs_g[k] * rates.abs_g[k];
    c.p_sys[k] = purity_system(b, rates.abs_d[k]);
    c.p_env_rel[k] = purity_env_relative(b, rates.abs_g[k]);
    c.c_sys[k] = std::log(p_sys0 / c.p_sys[k]);
    c.c_env[k] = 0.0 - std::log(c.p_env_rel[k]);
    c.c_total[k] = c.c_sys[k] + c.c_env[k];
    c.cdot_sys[k] = 2.0 * rates.gamma[k] * xy * d2 / (1.0 + z2 + xy * d2);
    c.cdot_env[k] = 2.0 * rates.gamma_dual[k] * (1.0 - z2) * g2 / (1.0 + z2 + (1.0 - z2) * g2);
  }
  return c;
}

}  // namespace qdeph
