#include "commands.hpp"

#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>

#include "forest/equilibria.hpp"
#include "forest/simulate.hpp"
#include "forest/spectrum.hpp"
#include "json.hpp"

namespace forest::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

EquilibriaOptions equilibria_options(const RunConfig& cfg) {
  EquilibriaOptions opts;
  opts.tol_eq = cfg.numerics.tol_eq;
  opts.quad.tol_tail = cfg.numerics.tol_tail;
  return opts;
}

EquilibriaResult scan_equilibria(const ModelParams& m, const RunConfig& cfg) {
  const double b_max = cfg.numerics.b_max > 0.0 ? cfg.numerics.b_max : default_scan_bound(m);
  return find_equilibria(m, b_max, cfg.numerics.n_scan, equilibria_options(cfg));
}

char verdict_letter(Stability s) {
  switch (s) {
    case Stability::stable: return 'S';
    case Stability::unstable: return 'U';
    default: return 'C';
  }
}

}  // namespace

int run_equilibria(const RunConfig& cfg, std::ostream& out) {
  const ModelParams m = build_model(cfg);
  const EquilibriaResult res = scan_equilibria(m, cfg);
  out << "# equilibrium table\n"
         "# b: equilibrium birth rate [individuals/time]\n"
         "# R: expected lifetime reproduction at b [dimensionless]; 1 at positive equilibria\n"
         "# F_prime: slope of the map F(b) = b R(b) [dimensionless]\n"
         "# lambda0: dominant real characteristic root [1/time]\n"
         "# verdict: stable | unstable | critical\n"
         "b,R,F_prime,lambda0,verdict\n";
  for (const auto& r : res.records) {
    const double l0 = dominant_real_root(m, r.b);
    out << fmt(r.b) << ',' << fmt(r.r_value) << ',' << fmt(r.f_prime) << ',' << fmt(l0) << ','
        << to_string(r.verdict) << '\n';
  }
  if (res.boundary_warning)
    out << "# warning: R > 1 at the scan bound; equilibria beyond it were not searched\n";
  return 0;
}

int run_curve(const RunConfig& cfg, std::ostream& out) {
  const auto& c = cfg.curve;
  if (c.which != "F" && c.which != "R")
    throw ConfigError("curve: 'which' must be F or R, got '" + c.which + "'");
  if (!(c.b_min >= 0.0) || !(c.b_max > c.b_min))
    throw ConfigError("curve: need 0 <= b_min < b_max");
  if (c.n < 1) throw ConfigError("curve: n must be at least 1");
  const ModelParams m = build_model(cfg);
  QuadratureOptions quad;
  quad.tol_tail = cfg.numerics.tol_tail;

  out << "# " << (c.which == "F" ? "map F(b) = b R(b)" : "expected lifetime reproduction R(b)")
      << " sampled on [" << fmt(c.b_min) << ", " << fmt(c.b_max) << "]\n"
      << "# b: constant birth rate [individuals/time]\n";
  if (c.which == "F") {
    out << "# F: map value [individuals/time]\n"
           "# y: identity line y = b, for fixed-point plots [individuals/time]\n"
           "b,F,y\n";
    for (int i = 0; i <= c.n; ++i) {
      const double b = c.b_min + (c.b_max - c.b_min) * i / c.n;
      out << fmt(b) << ',' << fmt(map_F(m, b, quad)) << ',' << fmt(b) << '\n';
    }
  } else {
    out << "# R: expected lifetime reproduction [dimensionless]\n"
           "b,R\n";
    for (int i = 0; i <= c.n; ++i) {
      const double b = c.b_min + (c.b_max - c.b_min) * i / c.n;
      out << fmt(b) << ',' << fmt(reproduction_R(m, b, quad)) << '\n';
    }
  }
  return 0;
}

int run_spectrum(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.spectrum.has_b) throw ConfigError("spectrum: no b given ([spectrum] b or --b)");
  const double b = cfg.spectrum.b;
  if (!(b >= 0.0)) throw ConfigError("spectrum: b must be nonnegative");
  const ModelParams m = build_model(cfg);
  QuadratureOptions quad;
  quad.tol_tail = cfg.numerics.tol_tail;

  SpectrumOptions sopts;
  sopts.tol_tail = cfg.numerics.tol_tail;

  ordered_json j;
  j["b"] = b;
  // b = 0 is always an equilibrium; positive b is checked through |R(b) - 1|.
  const double residual = b == 0.0 ? 0.0 : std::fabs(reproduction_R(m, b, quad) - 1.0);
  j["r_residual"] = residual;
  if (residual > 1e-6)
    j["warning"] = "b is not an equilibrium to within 1e-6; report describes the linearization at b anyway";
  j["tolerances"] = {{"delta_frac", sopts.delta_frac},
                     {"root_tol", sopts.root_tol},
                     {"tol_crit", sopts.tol_crit},
                     {"tol_tail", sopts.tol_tail}};
  int code = 0;
  try {
    const SpectrumReport rep = stability_report(m, b, sopts);
    j["lambda0"] = rep.lambda0;
    j["xi_at_zero"] = rep.xi_at_zero;
    j["unstable_count"] = rep.unstable_count;
    j["rectangle"] = {{"re_min", rep.rectangle.re_min},
                      {"re_max", rep.rectangle.re_max},
                      {"im_max", rep.rectangle.im_max}};
    j["verdict"] = to_string(rep.verdict);
    j["inconclusive"] = false;
  } catch (const InconclusiveCount& e) {
    j["inconclusive"] = true;
    j["error"] = e.what();
    code = 3;
  }
  out << j.dump(2) << '\n';
  return code;
}

int run_simulate(const RunConfig& cfg, std::ostream& csv, std::ostream& summary) {
  const ModelParams m = build_model(cfg);
  const Grid grid = build_grid(cfg);
  const InitialData init = build_initial(cfg);
  SimOptions opts;
  opts.conv_tol = cfg.numerics.conv_tol;

  const Trajectory traj = run(m, grid, init, opts);
  const EquilibriaResult eq = scan_equilibria(m, cfg);
  const AsymptoteResult conv =
      detect_asymptote(traj, opts.conv_window / m.mu, opts.conv_tol, eq.records);

  csv << "# simulated birth rate trajectory\n"
         "# t: time [time]\n"
         "# b: birth rate b(t) [individuals/time]\n"
         "t,b\n";
  for (size_t i = 0; i < traj.times.size(); ++i)
    csv << fmt(traj.times[i]) << ',' << fmt(traj.values[i]) << '\n';

  ordered_json j;
  j["init"] = cfg.simulate.init;
  j["h"] = grid.h;
  j["a_max"] = grid.a_max;
  j["t_end"] = grid.t_end;
  j["grid_adjusted"] = grid.adjusted;
  j["converged"] = conv.converged;
  j["limit"] = conv.limit;
  j["matched_equilibrium"] = conv.matched_b;
  j["distance"] = conv.distance;
  summary << j.dump(2) << '\n';
  return 0;
}

int run_sweep(const RunConfig& cfg, std::ostream& out, int workers) {
  const auto& s = cfg.sweep;
  if (cfg.model.beta != "nicholson" || cfg.model.g != "exp_decay")
    throw ConfigError("sweep: only the nicholson beta / exp_decay g family is sweepable");
  if (s.alpha_steps < 1 || s.p_steps < 1) throw ConfigError("sweep: steps must be >= 1");
  if (!(s.alpha_min > 0.0) || !(s.p_min > 0.0) || s.alpha_max < s.alpha_min || s.p_max < s.p_min)
    throw ConfigError("sweep: ranges must be positive with max >= min");
  if (workers < 1) throw ConfigError("sweep: workers must be >= 1");

  struct Cell {
    double alpha, p;
    int n = 0;
    std::string signature;
    std::string error;
  };
  std::vector<Cell> cells;
  for (int i = 0; i < s.alpha_steps; ++i) {
    const double alpha =
        s.alpha_steps == 1 ? s.alpha_min
                           : s.alpha_min + (s.alpha_max - s.alpha_min) * i / (s.alpha_steps - 1);
    for (int k = 0; k < s.p_steps; ++k) {
      const double p =
          s.p_steps == 1 ? s.p_min : s.p_min + (s.p_max - s.p_min) * k / (s.p_steps - 1);
      cells.push_back({alpha, p});
    }
  }

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t idx; (idx = next.fetch_add(1)) < cells.size();) {
      Cell& cell = cells[idx];
      try {
        RunConfig cell_cfg = cfg;
        cell_cfg.model.alpha = cell.alpha;
        cell_cfg.model.p = cell.p;
        const ModelParams m = build_model(cell_cfg);
        const EquilibriaResult res = scan_equilibria(m, cell_cfg);
        cell.n = static_cast<int>(res.records.size());
        for (size_t r = 0; r < res.records.size(); ++r) {
          if (r) cell.signature += ',';
          cell.signature += verdict_letter(res.records[r].verdict);
        }
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min<int>(workers, static_cast<int>(cells.size()));
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  out << "# (alpha, p) stability sweep for beta(x) = alpha x e^{-x}, g(x) = p e^{-x}\n"
         "# alpha: fertility amplitude [1/height]\n"
         "# p: growth amplitude [height/time]\n"
         "# n_equilibria: number of equilibria found (including b = 0)\n"
         "# signature: verdicts in ascending b; S stable, U unstable, C critical\n"
         "# error: per-cell failure message, empty on success\n"
         "alpha,p,n_equilibria,signature,error\n";
  for (const auto& cell : cells) {
    out << fmt(cell.alpha) << ',' << fmt(cell.p) << ',';
    if (cell.error.empty()) {
      out << cell.n << ",\"" << cell.signature << "\",\n";
    } else {
      std::string msg = cell.error;
      for (auto& ch : msg)
        if (ch == '"' || ch == '\n') ch = ' ';
      out << "0,\"\",\"" << msg << "\"\n";
    }
  }
  return 0;
}

}  // namespace forest::cli
