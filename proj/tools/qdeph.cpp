// Command-line front end: qdeph trace|mc|oracle|cp-scan [--config FILE] [--figure N] [--out FILE]
//
// Exit status: 0 on success, 1 for usage or configuration errors, 2 when a
// numerical step fails.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qdeph/qdeph.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qdeph::ConfigError(0, "", "cannot open config file '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pure-dephasing qubit dynamics: rates, correlations, witnesses and cross-checks"};
  app.require_subcommand(1);

  std::string config_path;
  int figure = 0;
  std::string out_path;
  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--figure", figure, "start from a figure preset")->check(CLI::IsMember({1, 2, 3}));
  app.add_option("--out", out_path, "output CSV path, - for stdout");

  auto* trace = app.add_subcommand("trace", "rates, correlations and witnesses on the time grid");
  auto* mc = app.add_subcommand("mc", "random-field Monte Carlo estimate of D(t)");
  auto* oracle = app.add_subcommand("oracle", "brute-force Fock-space cross-check (discrete bath)");
  auto* cp = app.add_subcommand("cp-scan", "complete positivity of two-time maps");
  for (auto* sub : {trace, mc, oracle, cp}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  qdeph::ScenarioConfig cfg;
  try {
    if (figure != 0) cfg = qdeph::figure_preset(figure);
    if (!config_path.empty()) cfg = qdeph::parse_config(read_file(config_path), cfg);
    if (!out_path.empty()) cfg.output = out_path;
  } catch (const qdeph::ConfigError& e) {
    std::cerr << "qdeph: " << e.what() << '\n';
    return 1;
  }

  std::ostringstream csv;
  try {
    if (*trace) qdeph::run_trace(cfg, csv);
    if (*mc) qdeph::run_mc(cfg, csv);
    if (*oracle) qdeph::run_oracle(cfg, csv);
    if (*cp) qdeph::run_cp_scan(cfg, csv);
  } catch (const qdeph::ConfigError& e) {
    std::cerr << "qdeph: " << e.what() << '\n';
    return 1;
  } catch (const qdeph::TruncationTooSmall& e) {
    std::cerr << "qdeph: " << e.what() << "; set oracle.cutoff = " << e.required_cutoff() << " or more\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qdeph: numerical failure: " << e.what() << '\n';
    return 2;
  }

  if (cfg.output == "-") {
    std::cout << csv.str();
    std::cout.flush();
    return std::cout ? 0 : 2;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  out << csv.str();
  if (!out) {
    std::cerr << "qdeph: cannot write '" << cfg.output << "'\n";
    return 2;
  }
  return 0;
}
