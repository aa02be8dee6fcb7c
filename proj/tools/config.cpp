#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace forest::cli {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "': not a number: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError("config: key '" + key + "': trailing junk in '" + v + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  const int i = static_cast<int>(x);
  if (x != i) throw ConfigError("config: key '" + key + "': expected an integer, got '" + v + "'");
  return i;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"paper-fig1a", "paper-fig1b", "paper-fig2a", "paper-fig2b",
          "paper-fig3a", "paper-fig3b", "paper-fig4a", "paper-fig4b"};
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  cfg = RunConfig{};  // presets are complete parameter sets, not overlays
  cfg.model.mu = 1.0;
  cfg.model.x_m = 0.0;
  cfg.model.beta = "nicholson";
  cfg.model.alpha = 6.0;
  cfg.model.g = "exp_decay";
  if (name == "paper-fig1a") {
    cfg.model.p = 1.0;
    cfg.curve = {"F", 0.0, 6.0, 400};
  } else if (name == "paper-fig1b") {
    cfg.model.p = 5.0;
    cfg.curve = {"F", 0.0, 6.0, 400};
  } else if (name == "paper-fig2a") {
    cfg.model.p = 1.0;
    cfg.curve = {"R", 0.0, 6.0, 400};
  } else if (name == "paper-fig2b") {
    cfg.model.p = 5.0;
    cfg.curve = {"R", 0.0, 6.0, 400};
  } else if (name == "paper-fig3a") {
    cfg.model.p = 5.0;
    cfg.simulate.init = "constant";
    cfg.simulate.value = 0.45;
  } else if (name == "paper-fig3b") {
    cfg.model.p = 5.0;
    cfg.simulate.init = "constant";
    cfg.simulate.value = 0.5;
  } else if (name == "paper-fig4a") {
    cfg.model.p = 5.0;
    cfg.simulate = {"periodic", 0.5, 0.475, 0.2, 1.0, ""};
  } else if (name == "paper-fig4b") {
    cfg.model.p = 5.0;
    cfg.simulate = {"periodic", 0.5, 0.475, 0.2, 30.0, ""};
  } else {
    throw ConfigError("config: unknown preset '" + name + "'");
  }
}

namespace {

void set_key(RunConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value) {
  auto bad_key = [&]() -> ConfigError {
    return ConfigError("config: unknown key '" + key + "' in section [" + section + "]");
  };
  if (section.empty()) {
    if (key == "preset") {
      apply_preset(cfg, value);
      return;
    }
    throw bad_key();
  }
  if (section == "model") {
    auto& m = cfg.model;
    if (key == "mu") m.mu = parse_double(key, value);
    else if (key == "x_m") m.x_m = parse_double(key, value);
    else if (key == "beta") m.beta = value;
    else if (key == "alpha") m.alpha = parse_double(key, value);
    else if (key == "k") m.k = parse_double(key, value);
    else if (key == "x0") m.x0 = parse_double(key, value);
    else if (key == "beta_table") m.beta_table = value;
    else if (key == "g") m.g = value;
    else if (key == "p") m.p = parse_double(key, value);
    else if (key == "g_table") m.g_table = value;
    else throw bad_key();
  } else if (section == "numerics") {
    auto& n = cfg.numerics;
    if (key == "h") n.h = parse_double(key, value);
    else if (key == "a_max") n.a_max = parse_double(key, value);
    else if (key == "t_end") n.t_end = parse_double(key, value);
    else if (key == "tol_eq") n.tol_eq = parse_double(key, value);
    else if (key == "tol_tail") n.tol_tail = parse_double(key, value);
    else if (key == "conv_tol") n.conv_tol = parse_double(key, value);
    else if (key == "b_max") n.b_max = parse_double(key, value);
    else if (key == "n_scan") n.n_scan = parse_int(key, value);
    else throw bad_key();
  } else if (section == "curve") {
    auto& c = cfg.curve;
    if (key == "which") c.which = value;
    else if (key == "b_min") c.b_min = parse_double(key, value);
    else if (key == "b_max") c.b_max = parse_double(key, value);
    else if (key == "n") c.n = parse_int(key, value);
    else throw bad_key();
  } else if (section == "spectrum") {
    auto& s = cfg.spectrum;
    if (key == "b") {
      s.b = parse_double(key, value);
      s.has_b = true;
    } else {
      throw bad_key();
    }
  } else if (section == "simulate") {
    auto& s = cfg.simulate;
    if (key == "init") s.init = value;
    else if (key == "value") s.value = parse_double(key, value);
    else if (key == "b_star") s.b_star = parse_double(key, value);
    else if (key == "eps") s.eps = parse_double(key, value);
    else if (key == "omega") s.omega = parse_double(key, value);
    else if (key == "table") s.table = value;
    else throw bad_key();
  } else if (section == "sweep") {
    auto& s = cfg.sweep;
    if (key == "alpha_min") s.alpha_min = parse_double(key, value);
    else if (key == "alpha_max") s.alpha_max = parse_double(key, value);
    else if (key == "alpha_steps") s.alpha_steps = parse_int(key, value);
    else if (key == "p_min") s.p_min = parse_double(key, value);
    else if (key == "p_max") s.p_max = parse_double(key, value);
    else if (key == "p_steps") s.p_steps = parse_int(key, value);
    else throw bad_key();
  } else {
    throw ConfigError("config: unknown section [" + section + "]");
  }
}

}  // namespace

void apply_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: " + path + ":" + std::to_string(line_no) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config: " + path + ":" + std::to_string(line_no) +
                        ": empty key or value");
    set_key(cfg, section, key, value);
  }
}

std::vector<TableSample> load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("table: cannot open '" + path + "'");
  std::vector<TableSample> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, y;
    if (!(row >> x)) continue;  // blank line
    if (!(row >> y))
      throw ConfigError("table: " + path + ":" + std::to_string(line_no) +
                        ": expected two columns");
    out.push_back({x, y});
  }
  if (out.size() < 2) throw ConfigError("table: '" + path + "' needs at least two rows");
  return out;
}

void save_table(const std::string& path, const std::vector<TableSample>& samples) {
  std::ofstream out(path);
  if (!out) throw ConfigError("table: cannot write '" + path + "'");
  out << "# x, y\n";
  char buf[80];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", s.x, s.y);
    out << buf;
  }
}

ModelParams build_model(const RunConfig& cfg) {
  const auto& m = cfg.model;
  BetaFunction beta = [&] {
    if (m.beta == "nicholson") return BetaFunction::nicholson(m.alpha);
    if (m.beta == "saturating") return BetaFunction::nondecreasing_saturating(m.alpha, m.k, m.x0);
    if (m.beta == "table") {
      if (m.beta_table.empty()) throw ConfigError("config: beta = table requires beta_table");
      return BetaFunction::table(load_table(m.beta_table));
    }
    throw ConfigError("config: unknown beta kind '" + m.beta + "'");
  }();
  GrowthFunction g = [&] {
    if (m.g == "exp_decay") return GrowthFunction::exp_decay(m.p);
    if (m.g == "table") {
      if (m.g_table.empty()) throw ConfigError("config: g = table requires g_table");
      return GrowthFunction::table(load_table(m.g_table));
    }
    throw ConfigError("config: unknown g kind '" + m.g + "'");
  }();
  try {
    return ModelParams(m.mu, m.x_m, std::move(beta), std::move(g));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid model: ") + e.what());
  }
}

InitialData build_initial(const RunConfig& cfg) {
  const auto& s = cfg.simulate;
  try {
    if (s.init == "constant") return InitialData::constant(s.value);
    if (s.init == "periodic") return InitialData::periodic(s.b_star, s.eps, s.omega);
    if (s.init == "table") {
      if (s.table.empty()) throw ConfigError("config: init = table requires table");
      return InitialData::tabulated(load_table(s.table));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid initial data: ") + e.what());
  }
  throw ConfigError("config: unknown init kind '" + s.init + "'");
}

Grid build_grid(const RunConfig& cfg) {
  try {
    return Grid::create(cfg.numerics.h, cfg.numerics.a_max, cfg.numerics.t_end);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid grid: ") + e.what());
  }
}

}  // namespace forest::cli
