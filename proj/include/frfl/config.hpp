#pragma once

// Run configuration: INI file with one section per module, overridden by
// `section.key=value` pairs. Every key has a default, so the resolved tree
// always lists the full configuration of a run.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nonlocal.hpp"
#include "random_fields.hpp"
#include "snapshot.hpp"

namespace frfl {

using ConfigTree = boost::property_tree::ptree;

struct ConfigKey {
  const char* path;
  const char* fallback;
};

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"grid.d", "1"},
      {"grid.n", "256"},
      {"grid.length", "6.283185307179586"},
      {"model.alpha", "1.5"},
      {"run.t_final", "1"},
      {"run.t_start", "0"},
      {"run.dt", "0.01"},
      {"run.scheme", "direct"},
      {"run.duhamel_rule", "2"},
      {"run.rk_order", "3"},
      {"run.cfl_max", "0.5"},
      {"run.record_stride", "1"},
      {"run.snapshot_stride", "0"},
      {"run.n_max", "20"},
      {"run.iterate_stride", "1"},
      {"run.n0", "auto"},
      {"run.stop_tol", "1e-8"},
      {"gates.epsilon", "1e-2"},
      {"gates.eta", "1e-2"},
      {"initial.sigma", ""},
      {"initial.u1", ""},
      {"initial.u2", ""},
      {"initial.sigma_file", ""},
      {"initial.u1_file", ""},
      {"initial.u2_file", ""},
      {"particles.count", "64"},
      {"particles.dt", "1e-3"},
      {"particles.steps", "1000"},
      {"particles.amplitude", "1"},
      {"particles.delta_reg", "auto"},
      {"particles.kernel_width", "auto"},
      {"particles.record_stride", "1"},
      {"particles.deposit_stride", "0"},
      {"besov.input", ""},
      {"besov.s", "1"},
      {"besov.p", "auto"},
      {"besov.q", "1"},
      {"scaling.lambda", "2"},
      {"scaling.compare_stride", "10"},
      {"verify.samples", "100"},
      {"verify.grids", "64,128,256"},
      {"verify.oracle_pairs", "20"},
  };
  return keys;
}

struct RunConfig {
  int dim = 1;
  int n = 256;
  double length = 2.0 * std::numbers::pi;
  double alpha = 1.5;

  double t_final = 1.0;
  double t_start = 0.0;
  double dt = 0.01;
  std::string scheme = "direct";
  int duhamel_rule = 2;
  int rk_order = 3;
  double cfl_max = 0.5;
  int record_stride = 1;
  int snapshot_stride = 0;
  int n_max = 20;
  int iterate_stride = 1;
  int n0 = -1;  // auto
  double stop_tol = 1e-8;

  double epsilon = 1e-2;
  double eta = 1e-2;

  std::string sigma, u1, u2;
  std::string sigma_file, u1_file, u2_file;

  int particle_count = 64;
  double particle_dt = 1e-3;
  int particle_steps = 1000;
  double particle_amplitude = 1.0;
  double delta_reg = 0.0;      // auto: half the grid spacing
  double kernel_width = 0.0;   // auto: twice the grid spacing
  int particle_record_stride = 1;
  int deposit_stride = 0;

  std::string besov_input;
  double besov_s = 1.0;
  double besov_p = 0.0;  // auto: d
  double besov_q = 1.0;

  double lambda = 2.0;
  int compare_stride = 10;

  int verify_samples = 100;
  std::vector<int> verify_grids{64, 128, 256};
  int oracle_pairs = 20;

  Grid grid() const { return Grid(dim, n, length); }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline bool known(const std::string& path) {
  for (const auto& k : config_keys())
    if (path == k.path) return true;
  return false;
}

inline double to_double(const ConfigTree& t, const std::string& path) {
  const auto raw = trim(t.get<std::string>(path));
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size() || !std::isfinite(v)) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(path + ": expected a number, got '" + raw + "'");
  }
}

inline int to_int(const ConfigTree& t, const std::string& path) {
  const auto raw = trim(t.get<std::string>(path));
  try {
    std::size_t used = 0;
    const long v = std::stol(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError(path + ": expected an integer, got '" + raw + "'");
  }
}

inline bool is_auto(const ConfigTree& t, const std::string& path) { return trim(t.get<std::string>(path)) == "auto"; }

}  // namespace config_detail

/// Tree holding every key at its default value.
inline ConfigTree default_config_tree() {
  ConfigTree t;
  for (const auto& k : config_keys()) t.put(k.path, k.fallback);
  return t;
}

/// Applies `section.key=value`; unknown keys are configuration errors.
inline void apply_override(ConfigTree& t, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  const auto path = config_detail::trim(assignment.substr(0, eq));
  if (!config_detail::known(path)) throw ConfigError("unknown configuration key '" + path + "'");
  t.put(path, config_detail::trim(assignment.substr(eq + 1)));
}

/// Defaults, then the INI text, then the overrides.
inline ConfigTree resolve_config_text(const std::string& ini_text, const std::vector<std::string>& overrides) {
  ConfigTree t = default_config_tree();
  if (!ini_text.empty()) {
    ConfigTree file;
    std::istringstream in(ini_text);
    try {
      boost::property_tree::read_ini(in, file);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(std::string("cannot parse configuration: ") + e.message() + " (line " +
                        std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : file) {
      if (body.empty()) throw ConfigError("configuration entry '" + section + "' lies outside a section");
      for (const auto& [key, value] : body) {
        const auto path = section + "." + key;
        if (!config_detail::known(path)) throw ConfigError("unknown configuration key '" + path + "'");
        t.put(path, value.data());
      }
    }
  }
  for (const auto& o : overrides) apply_override(t, o);
  return t;
}

inline ConfigTree resolve_config_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return resolve_config_text(text, overrides);
}

/// Typed view with validation.
inline RunConfig parse_config(const ConfigTree& t) {
  using namespace config_detail;
  RunConfig c;
  c.dim = to_int(t, "grid.d");
  c.n = to_int(t, "grid.n");
  c.length = to_double(t, "grid.length");
  (void)c.grid();  // validates the grid
  c.alpha = to_double(t, "model.alpha");
  (void)AlignmentParams::make(c.dim, c.alpha);

  c.t_final = to_double(t, "run.t_final");
  c.t_start = to_double(t, "run.t_start");
  c.dt = to_double(t, "run.dt");
  c.scheme = trim(t.get<std::string>("run.scheme"));
  c.duhamel_rule = to_int(t, "run.duhamel_rule");
  c.rk_order = to_int(t, "run.rk_order");
  c.cfl_max = to_double(t, "run.cfl_max");
  c.record_stride = to_int(t, "run.record_stride");
  c.snapshot_stride = to_int(t, "run.snapshot_stride");
  c.n_max = to_int(t, "run.n_max");
  c.iterate_stride = to_int(t, "run.iterate_stride");
  c.n0 = is_auto(t, "run.n0") ? -1 : to_int(t, "run.n0");
  c.stop_tol = to_double(t, "run.stop_tol");
  if (!(c.t_final > 0.0)) throw ConfigError("run.t_final must be positive");
  if (c.t_start < 0.0 || c.t_start > c.t_final) throw ConfigError("run.t_start must lie in [0, t_final]");
  if (!(c.dt > 0.0)) throw ConfigError("run.dt must be positive");
  if (c.scheme != "direct" && c.scheme != "iterate") throw ConfigError("run.scheme must be direct or iterate");
  if (c.duhamel_rule != 1 && c.duhamel_rule != 2) throw ConfigError("run.duhamel_rule must be 1 or 2");
  if (c.rk_order < 2 || c.rk_order > 4) throw ConfigError("run.rk_order must be 2, 3 or 4");
  if (!(c.cfl_max > 0.0)) throw ConfigError("run.cfl_max must be positive");
  if (c.record_stride < 1) throw ConfigError("run.record_stride must be >= 1");
  if (c.snapshot_stride < 0) throw ConfigError("run.snapshot_stride must be >= 0");
  if (c.n_max < 0) throw ConfigError("run.n_max must be >= 0");
  if (c.iterate_stride < 1) throw ConfigError("run.iterate_stride must be >= 1");
  if (c.n0 < -1) throw ConfigError("run.n0 must be >= 0 or auto");
  if (c.stop_tol < 0.0) throw ConfigError("run.stop_tol must be >= 0");
  for (double v : {c.t_final, c.t_start}) {
    const double r = v / c.dt;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
      throw ConfigError("run.t_final and run.t_start must be multiples of run.dt");
  }

  c.epsilon = to_double(t, "gates.epsilon");
  c.eta = to_double(t, "gates.eta");
  if (!(c.epsilon > 0.0) || !(c.eta > 0.0)) throw ConfigError("gates.epsilon and gates.eta must be positive");

  c.sigma = trim(t.get<std::string>("initial.sigma"));
  c.u1 = trim(t.get<std::string>("initial.u1"));
  c.u2 = trim(t.get<std::string>("initial.u2"));
  c.sigma_file = trim(t.get<std::string>("initial.sigma_file"));
  c.u1_file = trim(t.get<std::string>("initial.u1_file"));
  c.u2_file = trim(t.get<std::string>("initial.u2_file"));
  if (c.dim == 1 && (!c.u2.empty() || !c.u2_file.empty())) throw ConfigError("initial.u2 needs grid.d = 2");

  c.particle_count = to_int(t, "particles.count");
  c.particle_dt = to_double(t, "particles.dt");
  c.particle_steps = to_int(t, "particles.steps");
  c.particle_amplitude = to_double(t, "particles.amplitude");
  c.delta_reg = is_auto(t, "particles.delta_reg") ? 0.5 * c.grid().spacing() : to_double(t, "particles.delta_reg");
  c.kernel_width =
      is_auto(t, "particles.kernel_width") ? 2.0 * c.grid().spacing() : to_double(t, "particles.kernel_width");
  c.particle_record_stride = to_int(t, "particles.record_stride");
  c.deposit_stride = to_int(t, "particles.deposit_stride");
  if (c.particle_count < 2) throw ConfigError("particles.count must be >= 2");
  if (!(c.particle_dt > 0.0)) throw ConfigError("particles.dt must be positive");
  if (c.particle_steps < 0) throw ConfigError("particles.steps must be >= 0");
  if (!(c.delta_reg > 0.0)) throw ConfigError("particles.delta_reg must be positive");
  if (c.particle_record_stride < 1) throw ConfigError("particles.record_stride must be >= 1");
  if (c.deposit_stride < 0) throw ConfigError("particles.deposit_stride must be >= 0");

  c.besov_input = trim(t.get<std::string>("besov.input"));
  c.besov_s = to_double(t, "besov.s");
  c.besov_p = is_auto(t, "besov.p") ? c.dim : to_double(t, "besov.p");
  c.besov_q = trim(t.get<std::string>("besov.q")) == "inf" ? INFINITY : to_double(t, "besov.q");
  if (!(c.besov_p >= 1.0) || !(c.besov_q >= 1.0)) throw ConfigError("besov.p and besov.q must be >= 1");

  c.lambda = to_double(t, "scaling.lambda");
  c.compare_stride = to_int(t, "scaling.compare_stride");
  if (c.compare_stride < 1) throw ConfigError("scaling.compare_stride must be >= 1");

  c.verify_samples = to_int(t, "verify.samples");
  c.oracle_pairs = to_int(t, "verify.oracle_pairs");
  c.verify_grids.clear();
  {
    std::stringstream ss(t.get<std::string>("verify.grids"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      ConfigTree one;
      one.put("v", item);
      try {
        c.verify_grids.push_back(to_int(one, "v"));
      } catch (const ConfigError&) {
        throw ConfigError("verify.grids: expected a comma-separated list of integers");
      }
    }
  }
  if (c.verify_samples < 1 || c.oracle_pairs < 0 || c.verify_grids.empty())
    throw ConfigError("verify settings out of range");
  return c;
}

/// Field from a recipe: entries separated by ';', each one of
///   cos m amp | sin m amp            (1D; 2D takes m1 m2)
///   const amp
///   random kmax amp decay            (band-limited draw from the seed)
/// Modes are integers: cos m x means cos(2 pi m x / L).
inline ScalarField field_from_recipe(const Grid& g, const std::string& recipe, std::uint64_t seed,
                                     std::uint64_t stream, const std::string& what) {
  ScalarField f(g);
  std::stringstream all(recipe);
  std::string entry;
  const double k0 = g.base_wavenumber();
  while (std::getline(all, entry, ';')) {
    std::istringstream in(entry);
    std::string kind;
    if (!(in >> kind)) continue;
    auto fail = [&] { return ConfigError(what + ": cannot read entry '" + config_detail::trim(entry) + "'"); };
    if (kind == "cos" || kind == "sin") {
      int m[2] = {0, 0};
      double amp = 0.0;
      for (int a = 0; a < g.dim(); ++a)
        if (!(in >> m[a])) throw fail();
      if (!(in >> amp)) throw fail();
      if (2 * std::max(std::abs(m[0]), std::abs(m[1])) >= g.n())
        throw ConfigError(what + ": mode in '" + config_detail::trim(entry) + "' is not resolved by the grid");
      const bool sine = kind == "sin";
      f += ScalarField::from_function(g, [&](double x, double y) {
        const double ph = k0 * (m[0] * x + m[1] * y);
        return amp * (sine ? std::sin(ph) : std::cos(ph));
      });
    } else if (kind == "const") {
      double amp = 0.0;
      if (!(in >> amp)) throw fail();
      f += ScalarField::constant(g, amp);
    } else if (kind == "random") {
      int kmax = 0;
      double amp = 0.0, decay = 0.0;
      if (!(in >> kmax >> amp >> decay) || kmax < 1) throw fail();
      Rng rng(seed, stream);
      f += random_band_limited(g, kmax, amp, decay, rng);
    } else {
      throw ConfigError(what + ": unknown entry kind '" + kind + "'");
    }
    std::string extra;
    if (in >> extra) throw fail();
  }
  return f;
}

inline ScalarField load_field_file(const Grid& g, const std::string& path) {
  auto nf = read_snapshot(path);
  if (!(nf.field.grid() == g)) throw ConfigError("snapshot " + path + " does not match the configured grid");
  return std::move(nf.field);
}

/// (sigma0, u0) from the [initial] section; files take precedence.
inline std::pair<ScalarField, VectorField> initial_data(const RunConfig& c, std::uint64_t seed) {
  const Grid g = c.grid();
  auto make = [&](const std::string& file, const std::string& recipe, std::uint64_t stream, const char* what) {
    if (!file.empty()) return load_field_file(g, file);
    return field_from_recipe(g, recipe, seed, stream, what);
  };
  auto sigma = make(c.sigma_file, c.sigma, 0, "initial.sigma");
  std::vector<ScalarField> u;
  u.push_back(make(c.u1_file, c.u1, 1, "initial.u1"));
  if (c.dim == 2) u.push_back(make(c.u2_file, c.u2, 2, "initial.u2"));
  return {std::move(sigma), VectorField(std::move(u))};
}

}  // namespace frfl
