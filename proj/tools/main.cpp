#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using forest::cli::ConfigError;
using forest::cli::RunConfig;

// Buffers the artifact and writes it in one piece so a failed command never
// leaves a truncated file behind.
int emit(const std::string& out_path, const std::ostringstream& body) {
  if (out_path.empty()) {
    std::cout << body.str();
    return 0;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + out_path + "'");
  f << body.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forestsim: equilibria, spectra and simulations of a size-structured forest model"};
  app.require_subcommand(1);
  app.fallthrough();  // allow the global flags after the subcommand name

  std::string config_path, preset, out_path;
  int workers = 1;
  app.add_option("--config", config_path, "sectioned key = value configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--preset", preset, "built-in parameter set (paper-fig1a .. paper-fig4b)");
  app.add_option("--out", out_path, "output path (stdout when omitted)");
  app.add_option("--workers", workers, "worker threads for sweep cells")->check(CLI::PositiveNumber);

  auto* cmd_eq = app.add_subcommand("equilibria", "equilibrium table with stability verdicts");
  auto* cmd_curve = app.add_subcommand("curve", "sample the F or R curve");
  std::string which;
  cmd_curve->add_option("--which", which, "F or R (overrides the [curve] section)");
  auto* cmd_spec = app.add_subcommand("spectrum", "characteristic-root report at an equilibrium");
  double spectrum_b = 0.0;
  auto* b_opt = cmd_spec->add_option("--b", spectrum_b, "equilibrium birth rate to linearize at");
  auto* cmd_sim = app.add_subcommand("simulate", "time-step the renewal equation");
  auto* cmd_sweep = app.add_subcommand("sweep", "equilibrium count/stability over an (alpha, p) grid");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!preset.empty()) forest::cli::apply_preset(cfg, preset);
    if (!config_path.empty()) forest::cli::apply_file(cfg, config_path);
    if (*b_opt) {
      cfg.spectrum.b = spectrum_b;
      cfg.spectrum.has_b = true;
    }
    if (!which.empty()) cfg.curve.which = which;

    std::ostringstream body;
    int code = 0;
    if (*cmd_eq) {
      code = forest::cli::run_equilibria(cfg, body);
      emit(out_path, body);
    } else if (*cmd_curve) {
      code = forest::cli::run_curve(cfg, body);
      emit(out_path, body);
    } else if (*cmd_spec) {
      code = forest::cli::run_spectrum(cfg, body);
      emit(out_path, body);
    } else if (*cmd_sim) {
      std::ostringstream summary;
      code = forest::cli::run_simulate(cfg, body, summary);
      emit(out_path, body);
      if (out_path.empty()) std::cout << summary.str();
      else emit(out_path + ".summary.json", summary);
    } else if (*cmd_sweep) {
      code = forest::cli::run_sweep(cfg, body, workers);
      emit(out_path, body);
    }
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}
