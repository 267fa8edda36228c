// Acceptance checks. Each prints one PASS/FAIL line with the measured
// quantity; the exit status is nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qdeph/qdeph.hpp"
#include "support.hpp"

using namespace qdeph;
using qdeph_test::Gen;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kKappa = 0.01;
constexpr double kTheta = 10.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Root of x cos x - sin x near x0, by Newton.
double tan_root(double x0) {
  double x = x0;
  for (int i = 0; i < 50; ++i) x -= (x * std::cos(x) - std::sin(x)) / (-x * std::sin(x));
  return x;
}

double closed_rate(double x) { return 8 * kKappa * kTheta * (std::sin(x) / (x * x) - std::cos(x) / x); }
double closed_int_rate(double x) { return 8 * kKappa * kTheta * (1 - std::sin(x) / x); }

Outcome rate_closed_form_vs_quadrature() {
  const BathSpec bath;
  double worst = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double t = 30.0 * k / 200;
    const double q = dephasing_rate(bath, t, Path::Quadrature);
    const double c = closed_rate(t);
    worst = std::max(worst, std::abs(q - c) / std::abs(c));
  }
  return {worst < 1e-6, fmt("max relative deviation %.3g over 200 points (tol 1e-6)", worst)};
}

Outcome first_non_markov_window() {
  const auto iv = nonmarkov_intervals(BathSpec{}, TimeGrid::uniform(30.0, 3000));
  if (iv.empty()) return {false, "no negative-rate interval found"};
  const double a = tan_root(4.49), b = tan_root(7.72);
  const double ea = std::abs(iv[0].begin - a), eb = std::abs(iv[0].end - b);
  return {ea < 1e-8 && eb < 1e-8 && std::abs(a - 4.493409) < 1e-6 && std::abs(b - 7.725252) < 1e-6,
          fmt("window [%.10f, %.10f], endpoint errors %.2g, %.2g (tol 1e-8)", iv[0].begin, iv[0].end, ea, eb)};
}

Outcome cp_from_time_zero() {
  const BathSpec bath;
  const auto grid = TimeGrid::uniform(30.0, 3000);
  const RateTrace r = rate_trace(bath, grid);
  double min_int = 0.0, max_dev = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    min_int = std::min(min_int, r.int_gamma[k]);
    if (k > 0) max_dev = std::max(max_dev, std::abs(r.int_gamma[k] - closed_int_rate(grid[k])));
  }
  double min_eig = 1.0;
  for (int k = 1; k <= 100; ++k) min_eig = std::min(min_eig, choi_matrix(two_time_map(bath, 0.0, 0.3 * k, 0.0)).min_eigenvalue());
  return {min_int >= 0.0 && max_dev < 1e-12 && min_eig >= -1e-12,
          fmt("min int_gamma %.3g on 3001 points, min Choi eigenvalue %.3g over 100 maps", min_int, min_eig)};
}

Outcome non_cp_two_time_maps() {
  const BathSpec bath;
  const double a = tan_root(4.49), b = tan_root(7.72);
  Gen g(2024);
  double worst = 0.0;
  int mismatched = 0;
  for (int i = 0; i < 50; ++i) {
    const double tp = a + (b - a) * g.uniform(0.0, 0.9);
    const double t = tp + (b - tp) * g.uniform(0.05, 1.0);
    const TwoTimeMap m = two_time_map(bath, tp, t, 0.0);
    const double ig = closed_int_rate(t) - closed_int_rate(tp);
    if (!(ig < 0.0)) ++mismatched;
    const double expect = 0.5 * (1 - std::exp(std::abs(ig)));
    worst = std::max(worst, std::abs(choi_matrix(m).min_eigenvalue() - expect));
    bool threw = false;
    try {
      kraus_two_time(bath, tp, t, 0.0);
    } catch (const NotRandomUnitary&) {
      threw = true;
    }
    if (is_cp(m) || !threw) ++mismatched;
  }
  // Control pairs with a non-negative integral must stay random unitary.
  for (int i = 0; i < 50; ++i) {
    const double t = g.uniform(0.1, 30.0);
    const double tp = g.uniform() < 0.5 ? 0.0 : g.uniform(0.0, std::min(t, a));
    bool threw = false;
    try {
      kraus_two_time(bath, tp, t, 0.0);
    } catch (const NotRandomUnitary&) {
      threw = true;
    }
    const bool negative = closed_int_rate(t) - closed_int_rate(tp) < -1e-12;
    if (threw != negative) ++mismatched;
  }
  return {worst < 1e-10 && mismatched == 0,
          fmt("max |min eig - (1-e^|I|)/2| %.3g (tol 1e-10), %d classification mismatches", worst, mismatched)};
}

Outcome correlation_sign_lock() {
  const BathSpec bath;
  const auto grid = TimeGrid::uniform(30.0, 3000);
  const RateTrace r = rate_trace(bath, grid);
  const auto c = correlation_trace(BlochState::from_radius(0.98, std::sqrt(0.5)), r);
  int checked = 0, bad = 0;
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    if (std::abs(r.gamma[k]) <= 1e-3) continue;
    const double dc = (c.c_total[k + 1] - c.c_total[k - 1]) / (grid[k + 1] - grid[k - 1]);
    ++checked;
    if ((dc > 0) != (r.gamma[k] > 0) || dc == 0.0) ++bad;
  }
  return {bad == 0 && checked > 0, fmt("%d sign mismatches over %d points with |gamma| > 1e-3", bad, checked)};
}

Outcome separability_certificate() {
  const BlochState b = BlochState::from_radius(0.98, std::sqrt(0.5));
  const double thr = separability_threshold(b);
  const auto grid = TimeGrid::uniform(30.0, 3000);
  const auto w = witness_trace(b, BathSpec{}, grid);
  std::size_t certified = 0;
  for (std::size_t k = 0; k < w.size(); ++k) certified += w.separable_certified[k];
  // S approaches 2 kappa for large t; its supremum is the first maximum.
  double sup = 0.0;
  for (int i = 1; i <= 400000; ++i) sup = std::max(sup, s_function(BathSpec{}, 200.0 * i / 400000));
  return {certified == w.size() && sup < thr,
          fmt("sup S = %.6f < threshold %.6f; certified at %zu/%zu points", sup, thr, certified, w.size())};
}

Outcome entanglement_windows() {
  const BathSpec bath;
  const BlochState b = BlochState::from_radius(0.997, 0.0);
  const double thr = entanglement_threshold(b);
  const double e_pi = e_function(bath, kPi);
  const auto grid = TimeGrid::uniform(30.0, 3000);
  const auto w = witness_trace(b, bath, grid);
  std::size_t certified = 0, inconsistent = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    certified += w.entangled_certified[k];
    if (w.entangled_certified[k] != (w.e_val[k] > thr)) ++inconsistent;
  }
  const bool at_pi = verdicts(b, s_function(bath, kPi), e_pi).entangled;
  double worst = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double t = 30.0 * k / 200;
    const double c = 8 * kKappa / kTheta * (1.0 / 3 - std::sin(t) / t - 2 * std::cos(t) / (t * t) + 2 * std::sin(t) / (t * t * t));
    worst = std::max(worst, std::abs(e_function(bath, t, Path::Quadrature) - c) / c);
  }
  // The quoted 0.0042877 is truncated, not rounded; hold it to one unit in its last digit and the
  // exact value to round-off.
  const double e_exact = 8 * kKappa / kTheta * (1.0 / 3 + 2 / (kPi * kPi));
  const bool ok = std::abs(thr - std::log(0.997 / 0.994009)) < 1e-15 && std::abs(e_pi - e_exact) < 1e-15 &&
                  std::abs(e_pi - 0.0042877) < 1e-7 * 1.5 &&
                  e_pi > thr && at_pi && certified > 0 && inconsistent == 0 && worst < 1e-6;
  return {ok, fmt("E(pi) = %.10f > %.7f, certified at %zu grid points, quadrature rel dev %.3g", e_pi, thr, certified,
                  worst)};
}

Outcome small_e_identity() {
  const BathSpec bath;
  const BlochState b = figure_preset(3).qubit;
  const auto grid = TimeGrid::uniform(30.0, 3000);
  const auto c = correlation_trace(b, rate_trace(bath, grid));
  const auto w = witness_trace(b, bath, grid);
  const auto rep = cenv_energy_consistency(b, w.times, w.e_val, c.c_env);
  return {rep.small_e_residual < 5e-6, fmt("max |C_env - E/(2(b+1))| = %.3g where E <= 0.01 (tol 5e-6)", rep.small_e_residual)};
}

Outcome monte_carlo() {
  const Discrete model{{{0.1, 1.0}}};
  const double theta = 1.0 / std::log(2.0);
  const std::uint64_t seed = 20120501;
  const auto at_pi = mc_decoherence(model, theta, 0.0, kPi, 100000, seed);
  const double dev = std::abs(std::abs(at_pi.mean) - std::exp(-0.24));
  int inside = 0;
  for (int k = 1; k <= 20; ++k) {
    const double t = 0.5 * k;
    const auto est = mc_decoherence(model, theta, 0.0, t, 100000, seed);
    if (std::abs(std::abs(est.mean) - gaussian_average_exact(model, theta, t)) <= 3 * est.std_error) ++inside;
  }
  return {dev <= 3 * at_pi.std_error && inside >= 19,
          fmt("|D_mc(pi)| = %.6f vs %.6f (3 sigma = %.2g); %d/20 grid times inside 3 sigma", std::abs(at_pi.mean),
              std::exp(-0.24), 3 * at_pi.std_error, inside)};
}

struct OracleDeviation {
  double d = 0.0, p_sys = 0.0, p_tot = 0.0;
};

OracleDeviation oracle_sweep(const FockConfig& cfg, const BlochState& b) {
  const ConditionalEvolution evo(cfg, 0.0);
  BathSpec bath;
  bath.model = Discrete{cfg.modes};
  bath.theta = cfg.theta;
  bath.high_temperature = false;
  OracleDeviation dev;
  const double p0 = purity(total_state(b, evo, 0.0).rho);
  for (int k = 1; k <= 50; ++k) {
    const double t = 0.2 * k;
    const TotalState s = total_state(b, evo, t);
    const double abs_d = std::exp(-integrated_rate(bath, t));
    dev.d = std::max(dev.d, std::abs(std::abs(brute_decoherence(evo, t)) - abs_d));
    dev.p_sys = std::max(dev.p_sys, std::abs(purity(reduced_qubit(s)) - purity_system(b, abs_d)));
    dev.p_tot = std::max(dev.p_tot, std::abs(purity(s.rho) - p0));
  }
  return dev;
}

Outcome brute_force_oracle() {
  const BlochState b = BlochState::from_radius(0.98, 0.3);
  const auto one = oracle_sweep({{{0.1, 1.0}}, 40, 1.0 / std::log(2.0)}, b);
  const auto two = oracle_sweep({{{0.1, 1.0}, {0.05, 2.0}}, 20, 1.0 / std::log(4.0)}, b);
  const bool ok = one.d < 1e-8 && one.p_sys < 1e-8 && one.p_tot < 1e-9 && two.d < 1e-7 && two.p_sys < 1e-7 &&
                  two.p_tot < 1e-9;
  return {ok, fmt("single mode: |D| %.2g, P_sys %.2g, P_tot drift %.2g; two modes: %.2g, %.2g, %.2g", one.d, one.p_sys,
                  one.p_tot, two.d, two.p_sys, two.p_tot)};
}

Outcome witness_soundness() {
  Gen g(77);
  int certified = 0, unsound = 0, attempts = 0;
  double min_neg = 1.0;
  while (certified < 20 && attempts < 2000) {
    ++attempts;
    FockConfig cfg{{{g.uniform(0.02, 0.3), 1.0}}, 40, g.uniform(0.2, 2.0)};
    BathSpec bath;
    bath.model = Discrete{cfg.modes};
    bath.theta = cfg.theta;
    bath.high_temperature = false;
    const double r = g.uniform(0.9, 1.0);
    const BlochState b = BlochState::from_radius(r, g.uniform(-0.3 * r, 0.3 * r));
    const double t = g.uniform(0.1, 6.0);
    if (!verdicts(b, s_function(bath, t), e_function(bath, t)).entangled) continue;
    ++certified;
    const double n = negativity(total_state(b, cfg, 0.0, t)).negativity_sum;
    min_neg = std::min(min_neg, n);
    if (!(n > 1e-10)) ++unsound;
  }
  int false_diagonal = 0;
  for (int i = 0; i < 20; ++i) {
    FockConfig cfg{{{g.uniform(0.02, 0.3), 1.0}}, 40, g.uniform(0.2, 2.0)};
    BathSpec bath;
    bath.model = Discrete{cfg.modes};
    bath.theta = cfg.theta;
    bath.high_temperature = false;
    const BlochState b{0.0, 0.0, g.uniform(-1.0, 1.0)};
    const double t = g.uniform(0.1, 6.0);
    if (verdicts(b, s_function(bath, t), e_function(bath, t)).entangled) ++false_diagonal;
    if (negativity(total_state(b, cfg, 0.0, t)).negativity_sum > 1e-10) ++false_diagonal;
  }
  return {certified == 20 && unsound == 0 && false_diagonal == 0,
          fmt("%d certified configurations, min negativity %.3g, %d unsound, %d false on diagonal states", certified,
              min_neg, unsound, false_diagonal)};
}

Outcome blp_consistency() {
  const BathSpec bath;
  const auto grid = TimeGrid::uniform(30.0, 3000);
  double expect = 0.0;
  for (const auto& iv : nonmarkov_intervals(bath, grid))
    expect += std::exp(-closed_int_rate(iv.end)) - std::exp(-closed_int_rate(iv.begin));
  const double blp = blp_measure(bath, grid);

  Discrete ohmic;
  const double dw = 0.05;
  for (double w = 0.5 * dw; w < 20.0; w += dw) ohmic.modes.push_back({std::sqrt(kKappa * w * std::exp(-w) * dw), w});
  BathSpec positive;
  positive.model = ohmic;
  const double blp_pos = blp_measure(positive, grid);
  return {std::abs(blp - expect) < 1e-10 && blp > 0.0 && blp_pos == 0.0,
          fmt("BLP %.10f vs interval sum %.10f; always-positive bath %.3g", blp, expect, blp_pos)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks = {
      {"rate closed form vs quadrature", rate_closed_form_vs_quadrature},
      {"first non-Markovian window", first_non_markov_window},
      {"complete positivity from t = 0", cp_from_time_zero},
      {"non-CP two-time maps", non_cp_two_time_maps},
      {"correlation and rate signs", correlation_sign_lock},
      {"separability certificate", separability_certificate},
      {"entanglement windows", entanglement_windows},
      {"small-E environment correlation", small_e_identity},
      {"Monte Carlo vs exact average", monte_carlo},
      {"brute-force oracle", brute_force_oracle},
      {"witness soundness", witness_soundness},
      {"BLP measure", blp_consistency},
  };
  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first, o.detail.c_str(), secs);
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(checks.size()) - failures, checks.size());
  return failures == 0 ? 0 : 1;
}
