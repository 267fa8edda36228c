#pragma once

// Scenario configuration and the CSV-producing runs behind the command-line
// tool.
//
// Config files are flat `key = value` lines; `#` starts a comment. Keys:
//
//   bath.kind          superohmic_sharp | discrete      (superohmic_sharp)
//   bath.kappa         coupling of the continuum model  (0.01)
//   bath.omega_c       cutoff frequency                 (1)
//   bath.modes         discrete modes, `g@omega, g@omega, ...`
//   theta              k_B T / (hbar omega_ref)         (10)
//   high_temperature   true | false                     (true)
//   qubit.r, qubit.z   Bloch radius and z; x = sqrt(r^2 - z^2), y = 0  (0.98, 0)
//   qubit.x, qubit.y   explicit transverse components (instead of qubit.r)
//   omega              qubit splitting Omega            (0)
//   grid.t_max         last time                        (30)
//   grid.steps         intervals of the trace grid      (3000)
//   mc.samples         Wigner samples per time          (100000)
//   mc.seed            64-bit stream seed               (20120501)
//   mc.steps           intervals of the Monte Carlo grid (20)
//   mc.modes           modes used to discretise a continuum bath (64)
//   oracle.cutoff      Fock cutoff per mode             (40)
//   oracle.steps       intervals of the oracle grid     (20)
//   cp.steps           intervals of the (t', t) scan grid (60)
//   output             output path, `-` for stdout      (-)
//
// The integrated rate is the time integral of gamma itself, so at high
// temperature it is 8 kappa theta (1 - sin x / x) and carries kappa.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qdeph/bath.hpp"
#include "qdeph/correlations.hpp"
#include "qdeph/dephasing.hpp"
#include "qdeph/errors.hpp"
#include "qdeph/oracle.hpp"
#include "qdeph/random_unitary.hpp"
#include "qdeph/witnesses.hpp"

namespace qdeph {

enum class BathKind { SuperOhmicSharp, Discrete };

struct ScenarioConfig {
  BathKind bath_kind = BathKind::SuperOhmicSharp;
  double kappa = 0.01;
  double omega_c = 1.0;
  std::vector<Mode> modes;
  double theta = 10.0;
  bool high_temperature = true;
  BlochState qubit = BlochState::from_radius(0.98, 0.0);
  double omega = 0.0;
  double t_max = 30.0;
  std::size_t steps = 3000;
  std::size_t mc_samples = 100000;
  std::uint64_t mc_seed = 20120501;
  std::size_t mc_steps = 20;
  std::size_t mc_modes = 64;
  std::size_t oracle_cutoff = 40;
  std::size_t oracle_steps = 20;
  std::size_t cp_steps = 60;
  std::string output = "-";

  BathSpec bath() const {
    BathSpec b;
    if (bath_kind == BathKind::SuperOhmicSharp)
      b.model = SuperOhmicSharp{kappa, omega_c};
    else
      b.model = Discrete{modes};
    b.theta = theta;
    b.high_temperature = high_temperature;
    return b;
  }

  /// Mode list used by the Monte Carlo and oracle runs.
  Discrete discrete_modes() const {
    if (bath_kind == BathKind::Discrete) return Discrete{modes};
    return discretize(SuperOhmicSharp{kappa, omega_c}, mc_modes);
  }

  TimeGrid grid() const { return TimeGrid::uniform(t_max, steps); }
};

/// Presets for the three reference figures: 1 rates (defaults), 2 r = 0.98
/// with z^2 = 1/2, 3 r = 0.997 with z = 0.
inline ScenarioConfig figure_preset(int n) {
  ScenarioConfig cfg;
  switch (n) {
    case 1: break;
    case 2: cfg.qubit = BlochState::from_radius(0.98, std::sqrt(0.5)); break;
    case 3: cfg.qubit = BlochState::from_radius(0.997, 0.0); break;
    default: throw ConfigError(0, "figure", "preset must be 1, 2 or 3");
  }
  return cfg;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, std::size_t line, const std::string& key) {
  T v{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty())
    throw ConfigError(line, key, "cannot parse '" + std::string(text) + "' as a number");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw ConfigError(line, key, "value must be finite");
  }
  return v;
}

inline bool parse_bool(std::string_view text, std::size_t line, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(line, key, "expected true or false");
}

inline std::vector<Mode> parse_modes(std::string_view text, std::size_t line, const std::string& key) {
  std::vector<Mode> modes;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto at = item.find('@');
    if (at == std::string_view::npos) throw ConfigError(line, key, "mode '" + std::string(item) + "' is not g@omega");
    Mode m;
    m.g = parse_number<double>(trim(item.substr(0, at)), line, key);
    m.omega = parse_number<double>(trim(item.substr(at + 1)), line, key);
    if (!(m.omega > 0.0)) throw ConfigError(line, key, "mode frequency must be > 0");
    modes.push_back(m);
  }
  if (modes.empty()) throw ConfigError(line, key, "mode list is empty");
  return modes;
}

}  // namespace detail

/// Parses config text on top of `base` (defaults, or a figure preset).
inline ScenarioConfig parse_config(std::string_view text, ScenarioConfig base = {}) {
  ScenarioConfig cfg = std::move(base);
  std::map<std::string, std::size_t> seen;  // key -> line
  std::optional<double> r, x, y, z;
  bool kind_discrete = cfg.bath_kind == BathKind::Discrete;

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "", "missing key");
    if (!seen.emplace(key, line_no).second) throw ConfigError(line_no, key, "duplicate key");

    auto positive = [&](double v) {
      if (!(v > 0.0)) throw ConfigError(line_no, key, "must be > 0");
      return v;
    };
    auto count = [&](std::size_t minimum) {
      const auto v = detail::parse_number<std::size_t>(value, line_no, key);
      if (v < minimum) throw ConfigError(line_no, key, "must be >= " + std::to_string(minimum));
      return v;
    };
    auto real = [&] { return detail::parse_number<double>(value, line_no, key); };

    if (key == "bath.kind") {
      if (value == "superohmic_sharp")
        kind_discrete = false;
      else if (value == "discrete")
        kind_discrete = true;
      else
        throw ConfigError(line_no, key, "expected superohmic_sharp or discrete");
    } else if (key == "bath.kappa") {
      cfg.kappa = positive(real());
    } else if (key == "bath.omega_c") {
      cfg.omega_c = positive(real());
    } else if (key == "bath.modes") {
      cfg.modes = detail::parse_modes(value, line_no, key);
    } else if (key == "theta") {
      cfg.theta = real();
      if (!(cfg.theta >= 0.0)) throw ConfigError(line_no, key, "must be >= 0");
    } else if (key == "high_temperature") {
      cfg.high_temperature = detail::parse_bool(value, line_no, key);
    } else if (key == "qubit.r") {
      r = real();
      if (!(*r >= 0.0 && *r <= 1.0)) throw ConfigError(line_no, key, "Bloch radius must be in [0, 1]");
    } else if (key == "qubit.x") {
      x = real();
    } else if (key == "qubit.y") {
      y = real();
    } else if (key == "qubit.z") {
      z = real();
      if (!(std::abs(*z) <= 1.0)) throw ConfigError(line_no, key, "must be in [-1, 1]");
    } else if (key == "omega") {
      cfg.omega = real();
    } else if (key == "grid.t_max") {
      cfg.t_max = positive(real());
    } else if (key == "grid.steps") {
      cfg.steps = count(1);
    } else if (key == "mc.samples") {
      cfg.mc_samples = count(2);
    } else if (key == "mc.seed") {
      cfg.mc_seed = detail::parse_number<std::uint64_t>(value, line_no, key);
    } else if (key == "mc.steps") {
      cfg.mc_steps = count(1);
    } else if (key == "mc.modes") {
      cfg.mc_modes = count(1);
    } else if (key == "oracle.cutoff") {
      cfg.oracle_cutoff = count(2);
    } else if (key == "oracle.steps") {
      cfg.oracle_steps = count(1);
    } else if (key == "cp.steps") {
      cfg.cp_steps = count(1);
    } else if (key == "output") {
      if (value.empty()) throw ConfigError(line_no, key, "empty path");
      cfg.output = std::string(value);
    } else {
      throw ConfigError(line_no, key, "unknown key");
    }
  }

  auto line_of = [&](const std::string& key) {
    const auto it = seen.find(key);
    return it == seen.end() ? std::size_t{0} : it->second;
  };

  cfg.bath_kind = kind_discrete ? BathKind::Discrete : BathKind::SuperOhmicSharp;
  if (kind_discrete && cfg.modes.empty())
    throw ConfigError(line_of("bath.kind"), "bath.modes", "discrete bath needs bath.modes");
  if (!kind_discrete && seen.count("bath.modes"))
    throw ConfigError(line_of("bath.modes"), "bath.modes", "bath.modes requires bath.kind = discrete");
  if (cfg.high_temperature && cfg.theta == 0.0)
    throw ConfigError(line_of("theta"), "theta", "high_temperature needs theta > 0");

  if (r || x || y || z) {
    if (r && (x || y)) throw ConfigError(line_of("qubit.r"), "qubit.r", "give either qubit.r or qubit.x/qubit.y");
    const double zz = z.value_or(r || !(x || y) ? 0.0 : 0.0);
    BlochState b;
    if (x || y) {
      b = {x.value_or(0.0), y.value_or(0.0), zz};
    } else {
      const double rr = r.value_or(0.98);
      if (std::abs(zz) > rr) throw ConfigError(line_of("qubit.z"), "qubit.z", "|z| must not exceed qubit.r");
      b = BlochState{std::sqrt(rr * rr - zz * zz), 0.0, zz};
    }
    if (b.radius() > 1.0 + 1e-12) {
      const std::string k = x ? "qubit.x" : (y ? "qubit.y" : "qubit.z");
      throw ConfigError(line_of(k), k, "Bloch vector radius exceeds 1");
    }
    cfg.qubit = b;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// CSV output

namespace detail {

/// Shortest decimal that round-trips to the same double.
inline void put(std::ostream& os, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

template <class... Ts>
void row(std::ostream& os, const Ts&... values) {
  bool first = true;
  auto one = [&](const auto& v) {
    if (!first) os << ',';
    first = false;
    using V = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<V, bool>)
      os << (v ? '1' : '0');
    else
      put(os, static_cast<double>(v));
  };
  (one(values), ...);
  os << '\n';
}

}  // namespace detail

inline constexpr std::string_view kTraceHeader =
    "t,gamma,int_gamma,abs_D,Gamma,int_Gamma,abs_G,P_sys,P_env_rel,C_sys,C_env,C,S,sep_threshold,separable,E,"
    "ent_threshold,entangled,cenv_threshold";
inline constexpr std::string_view kMcHeader = "t,re_D_mc,im_D_mc,std_err,abs_D_exact";
inline constexpr std::string_view kOracleHeader =
    "t,abs_D_brute,abs_D_formula,P_sys_brute,P_sys_formula,P_tot,negativity,ent_certified_discrete";
inline constexpr std::string_view kCpScanHeader = "t_prime,t,int_gamma_tt,min_choi_eig,is_cp";

/// Rates, correlations and witnesses on the trace grid.
inline void run_trace(const ScenarioConfig& cfg, std::ostream& os) {
  const BathSpec bath = cfg.bath();
  const TimeGrid grid = cfg.grid();
  const RateTrace rates = rate_trace(bath, grid);
  const CorrelationTrace corr = correlation_trace(cfg.qubit, rates);
  const WitnessTrace wit = witness_trace(cfg.qubit, bath, grid);

  os << kTraceHeader << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    detail::row(os, grid[k], rates.gamma[k], rates.int_gamma[k], rates.abs_d[k], rates.gamma_dual[k],
                rates.int_gamma_dual[k], rates.abs_g[k], corr.p_sys[k], corr.p_env_rel[k], corr.c_sys[k],
                corr.c_env[k], corr.c_total[k], wit.s_val[k], wit.sep_threshold,
                static_cast<bool>(wit.separable_certified[k]), wit.e_val[k], wit.ent_threshold,
                static_cast<bool>(wit.entangled_certified[k]), wit.cenv_threshold);
  }
}

/// Random-field Monte Carlo estimate of D(t) against the exact Gaussian
/// average (thermal weights are always exact here). A continuum bath is
/// discretised into mc.modes modes.
inline void run_mc(const ScenarioConfig& cfg, std::ostream& os) {
  const Discrete model = cfg.discrete_modes();
  const TimeGrid grid = TimeGrid::uniform(cfg.t_max, cfg.mc_steps);
  os << kMcHeader << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const McEstimate est = mc_decoherence(model, cfg.theta, cfg.omega, grid[k], cfg.mc_samples, cfg.mc_seed);
    detail::row(os, grid[k], est.mean.real(), est.mean.imag(), est.std_error,
                gaussian_average_exact(model, cfg.theta, grid[k]));
  }
}

/// Brute-force total state against the closed-form reduced quantities.
/// Formula columns use the exact (not high-temperature) thermal weights.
inline void run_oracle(const ScenarioConfig& cfg, std::ostream& os) {
  if (cfg.bath_kind != BathKind::Discrete)
    throw ConfigError(0, "bath.kind", "the oracle run needs bath.kind = discrete");
  BathSpec exact = cfg.bath();
  exact.high_temperature = false;
  const FockConfig fock{cfg.modes, cfg.oracle_cutoff, cfg.theta};
  const ConditionalEvolution evo(fock, cfg.omega);
  const TimeGrid grid = TimeGrid::uniform(cfg.t_max, cfg.oracle_steps);

  os << kOracleHeader << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const TotalState s = total_state(cfg.qubit, evo, t);
    const double abs_d = std::exp(-integrated_rate(exact, t));
    const bool certified = verdicts(cfg.qubit, s_function(exact, t), e_function(exact, t)).entangled;
    detail::row(os, t, std::abs(brute_decoherence(evo, t)), abs_d, purity(reduced_qubit(s)),
                purity_system(cfg.qubit, abs_d), purity(s.rho), negativity(s).negativity_sum, certified);
  }
}

/// Complete-positivity scan of E(t, t') over grid pairs t' <= t.
inline void run_cp_scan(const ScenarioConfig& cfg, std::ostream& os) {
  const BathSpec bath = cfg.bath();
  validate(bath);
  const TimeGrid grid = TimeGrid::uniform(cfg.t_max, cfg.cp_steps);
  os << kCpScanHeader << '\n';
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const TwoTimeMap map = two_time_map(bath, grid[i], grid[j], cfg.omega);
      const double min_eig = choi_matrix(map).min_eigenvalue();
      detail::row(os, grid[i], grid[j], map.int_gamma, min_eig, min_eig >= -kCpTolerance);
    }
  }
}

}  // namespace qdeph
