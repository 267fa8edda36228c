#pragma once

// Brute-force ground truth on qubit (x) truncated Fock space.
//
// The total propagator is controlled-unitary, U_tot = sum_n |n><n| (x) U_n(t),
// with conditional environment Hamiltonians (sigma_z|0> = |0>)
//   H_0 = +Omega/2 + sum_k g_k (a_k^+ + a_k) + sum_k w_k a_k^+ a_k,
//   H_1 = -Omega/2 - sum_k g_k (a_k^+ + a_k) + sum_k w_k a_k^+ a_k.
// Each H_n is diagonalised once; U_n(t) = V exp(-i E t) V^T is then exact to
// machine precision for any t. Mode 0 is the most significant index of the
// environment basis, and the qubit is the most significant factor overall.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdeph/bath.hpp"
#include "qdeph/dephasing.hpp"
#include "qdeph/errors.hpp"

namespace qdeph {

/// Largest environment dimension d^n_modes the oracle accepts (total 2x this).
inline constexpr std::size_t kMaxEnvDimension = 1024;
/// Thermal weight allowed beyond the cutoff, per mode.
inline constexpr double kMaxTailWeight = 1e-8;

struct FockConfig {
  std::vector<Mode> modes;
  std::size_t cutoff = 40;
  double theta = 1.0;

  std::size_t env_dimension() const {
    std::size_t dim = 1;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      if (dim > kMaxEnvDimension / cutoff + 1) return std::numeric_limits<std::size_t>::max();
      dim *= cutoff;
    }
    return dim;
  }
};

/// Smallest cutoff whose thermal tail sum_{n>=d} p_n = q^d is below the limit.
inline std::size_t required_cutoff(double omega, double theta) {
  if (theta == 0.0) return 2;
  const double log_q = -omega / theta;
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(std::log(kMaxTailWeight) / log_q)) + 1);
}

inline void validate(const FockConfig& cfg) {
  validate(SpectralModel{Discrete{cfg.modes}});
  if (cfg.cutoff < 2) throw std::invalid_argument("Fock cutoff must be >= 2");
  if (!(cfg.theta >= 0.0) || !std::isfinite(cfg.theta)) throw std::invalid_argument("theta must be finite and >= 0");
  const std::size_t dim = cfg.env_dimension();
  if (dim > kMaxEnvDimension) throw DimensionTooLarge(dim, kMaxEnvDimension);
  for (const auto& m : cfg.modes) {
    if (cfg.theta == 0.0) continue;
    const double tail = std::exp(-m.omega / cfg.theta * static_cast<double>(cfg.cutoff));
    if (!(tail < kMaxTailWeight)) throw TruncationTooSmall(cfg.cutoff, required_cutoff(m.omega, cfg.theta));
  }
}

/// Diagonal of the truncated, renormalised thermal product state.
inline Eigen::VectorXd thermal_populations(const FockConfig& cfg) {
  validate(cfg);
  Eigen::VectorXd p = Eigen::VectorXd::Ones(1);
  for (const auto& m : cfg.modes) {
    Eigen::VectorXd mode(cfg.cutoff);
    const double q = cfg.theta == 0.0 ? 0.0 : std::exp(-m.omega / cfg.theta);
    double w = 1.0;
    for (std::size_t n = 0; n < cfg.cutoff; ++n, w *= q) mode(n) = w;
    mode /= mode.sum();
    Eigen::VectorXd next(p.size() * mode.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) next.segment(i * mode.size(), mode.size()) = p(i) * mode;
    p = std::move(next);
  }
  return p;
}

inline Eigen::MatrixXcd thermal_env_state(const FockConfig& cfg) {
  return thermal_populations(cfg).cast<cplx>().asDiagonal();
}

/// Caches the eigendecompositions of H_0 and H_1 for one configuration.
class ConditionalEvolution {
 public:
  ConditionalEvolution(FockConfig cfg, double omega_qubit) : cfg_(std::move(cfg)), omega_(omega_qubit) {
    populations_ = thermal_populations(cfg_);
    for (int branch = 0; branch < 2; ++branch) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian(branch));
      energies_[branch] = es.eigenvalues();
      vectors_[branch] = es.eigenvectors();
    }
  }

  const FockConfig& config() const noexcept { return cfg_; }
  std::size_t env_dimension() const noexcept { return static_cast<std::size_t>(populations_.size()); }
  const Eigen::VectorXd& populations() const noexcept { return populations_; }

  /// Real symmetric H_n on the truncated environment space.
  Eigen::MatrixXd hamiltonian(int branch) const {
    const std::size_t n_modes = cfg_.modes.size();
    const std::size_t dim = static_cast<std::size_t>(populations_.size());
    const double sign = branch == 0 ? 1.0 : -1.0;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<std::size_t> stride(n_modes, 1);
    for (std::size_t k = n_modes; k-- > 1;) stride[k - 1] = stride[k] * cfg_.cutoff;
    for (std::size_t i = 0; i < dim; ++i) {
      double diag = sign * 0.5 * omega_;
      for (std::size_t k = 0; k < n_modes; ++k) {
        const std::size_t occ = (i / stride[k]) % cfg_.cutoff;
        diag += cfg_.modes[k].omega * static_cast<double>(occ);
        if (occ + 1 < cfg_.cutoff) {
          const std::size_t j = i + stride[k];
          const double amp = sign * cfg_.modes[k].g * std::sqrt(static_cast<double>(occ + 1));
          h(i, j) = amp;
          h(j, i) = amp;
        }
      }
      h(i, i) = diag;
    }
    return h;
  }

  Eigen::MatrixXcd propagator(int branch, double t) const {
    const Eigen::VectorXcd phases =
        (energies_[branch] * (-t)).unaryExpr([](double a) { return std::polar(1.0, a); });
    const Eigen::MatrixXcd v = vectors_[branch].cast<cplx>();
    return v * phases.asDiagonal() * v.transpose();
  }

  std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> propagators(double t) const {
    return {propagator(0, t), propagator(1, t)};
  }

 private:
  FockConfig cfg_;
  double omega_;
  Eigen::VectorXd populations_;
  Eigen::VectorXd energies_[2];
  Eigen::MatrixXd vectors_[2];
};

inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> conditional_propagators(const FockConfig& cfg,
                                                                             double omega_qubit, double t) {
  return ConditionalEvolution(cfg, omega_qubit).propagators(t);
}

/// Dense density operator on qubit (x) environment; block (n, m) of size
/// env_dim holds <n| rho_tot |m>.
struct TotalState {
  Eigen::MatrixXcd rho;
  std::size_t env_dim = 0;

  auto block(Eigen::Index n, Eigen::Index m) const {
    const auto d = static_cast<Eigen::Index>(env_dim);
    return rho.block(n * d, m * d, d, d);
  }
};

/// rho_tot(t) = sum_nm rho_nm |n><m| (x) U_n rho_env U_m^+.
inline TotalState total_state(const BlochState& rho0, const ConditionalEvolution& evo, double t) {
  const Eigen::Matrix2cd q = QubitDensity::from_bloch(rho0.validated()).rho;
  const auto d = static_cast<Eigen::Index>(evo.env_dimension());
  const Eigen::MatrixXcd u[2] = {evo.propagator(0, t), evo.propagator(1, t)};
  Eigen::MatrixXcd u_rho[2];
  for (int n = 0; n < 2; ++n) u_rho[n] = u[n] * evo.populations().cast<cplx>().asDiagonal();

  TotalState s;
  s.env_dim = evo.env_dimension();
  s.rho.resize(2 * d, 2 * d);
  for (int n = 0; n < 2; ++n)
    for (int m = 0; m < 2; ++m) s.rho.block(n * d, m * d, d, d) = q(n, m) * u_rho[n] * u[m].adjoint();
  return s;
}

inline TotalState total_state(const BlochState& rho0, const FockConfig& cfg, double omega_qubit, double t) {
  return total_state(rho0, ConditionalEvolution(cfg, omega_qubit), t);
}

/// D(t) = Tr_env[U_0 rho_env U_1^+].
inline cplx brute_decoherence(const ConditionalEvolution& evo, double t) {
  const auto [u0, u1] = evo.propagators(t);
  const auto& p = evo.populations();
  cplx sum = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) sum += p(j) * u1.col(j).dot(u0.col(j));
  return sum;
}

inline cplx brute_decoherence(const FockConfig& cfg, double omega_qubit, double t) {
  return brute_decoherence(ConditionalEvolution(cfg, omega_qubit), t);
}

inline Eigen::Matrix2cd reduced_qubit(const TotalState& s) {
  Eigen::Matrix2cd r;
  for (int n = 0; n < 2; ++n)
    for (int m = 0; m < 2; ++m) r(n, m) = s.block(n, m).trace();
  return r;
}

inline Eigen::MatrixXcd reduced_env(const TotalState& s) { return s.block(0, 0) + s.block(1, 1); }

/// Tr(rho^2) of a Hermitian matrix.
inline double purity(const Eigen::MatrixXcd& rho) { return rho.cwiseAbs2().sum(); }

struct Negativity {
  double min_eig = 0.0;
  double negativity_sum = 0.0;  ///< sum of |negative eigenvalues| of rho^T_qubit
};

/// Peres test: spectrum of the partial transpose over the qubit factor.
inline Negativity negativity(const TotalState& s) {
  const auto d = static_cast<Eigen::Index>(s.env_dim);
  Eigen::MatrixXcd pt = s.rho;
  pt.block(0, d, d, d) = s.rho.block(d, 0, d, d);
  pt.block(d, 0, d, d) = s.rho.block(0, d, d, d);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(pt, Eigen::EigenvaluesOnly).eigenvalues();
  Negativity n;
  n.min_eig = ev(0);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) < 0.0) n.negativity_sum -= ev(i);
  return n;
}

}  // namespace qdeph
