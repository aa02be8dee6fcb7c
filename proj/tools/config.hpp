#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "forest/model.hpp"
#include "forest/simulate.hpp"

namespace forest::cli {

// Raised on malformed or invalid configuration; mapped to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelSection {
  double mu = 1.0;
  double x_m = 0.0;
  std::string beta = "nicholson";  // nicholson | saturating | table
  double alpha = 6.0;              // nicholson / saturating amplitude
  double k = 1.0;                  // saturating rate
  double x0 = 0.0;                 // saturating onset height
  std::string beta_table;          // two-column file for beta = table
  std::string g = "exp_decay";     // exp_decay | table
  double p = 5.0;                  // exp_decay amplitude
  std::string g_table;             // two-column file for g = table
};

struct NumericsSection {
  double h = 0.05;
  double a_max = 30.0;
  double t_end = 200.0;
  double tol_eq = 1e-8;
  double tol_tail = 1e-10;
  double conv_tol = 1e-6;
  double b_max = 0.0;  // 0 = automatic scan bound
  int n_scan = 400;
};

struct CurveSection {
  std::string which = "F";  // F | R
  double b_min = 0.0;
  double b_max = 6.0;
  int n = 400;
};

struct SpectrumSection {
  double b = 0.0;
  bool has_b = false;
};

struct SimulateSection {
  std::string init = "constant";  // constant | periodic | table
  double value = 0.5;             // constant level
  double b_star = 0.475;          // periodic mean
  double eps = 0.2;               // periodic amplitude
  double omega = 1.0;             // periodic frequency
  std::string table;              // two-column file, abscissae in [-a_max, 0]
};

struct SweepSection {
  double alpha_min = 1.0;
  double alpha_max = 8.0;
  int alpha_steps = 8;
  double p_min = 1.0;
  double p_max = 5.0;
  int p_steps = 5;
};

struct RunConfig {
  ModelSection model;
  NumericsSection numerics;
  CurveSection curve;
  SpectrumSection spectrum;
  SimulateSection simulate;
  SweepSection sweep;
};

// Built-in parameter sets reproducing the published figure panels.
std::vector<std::string> preset_names();
void apply_preset(RunConfig& cfg, const std::string& name);

// Sectioned key-value file: [section] headers, key = value lines, '#'
// comments. Unknown sections or keys are rejected. A pre-section
// `preset = NAME` line seeds the config before the remaining keys apply.
void apply_file(RunConfig& cfg, const std::string& path);

// Two-column (x, y) table: comma or whitespace separated, '#' comments.
std::vector<TableSample> load_table(const std::string& path);
void save_table(const std::string& path, const std::vector<TableSample>& samples);

ModelParams build_model(const RunConfig& cfg);
InitialData build_initial(const RunConfig& cfg);
Grid build_grid(const RunConfig& cfg);

}  // namespace forest::cli
