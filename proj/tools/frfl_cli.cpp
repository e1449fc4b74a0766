// frfl: command-line driver.
//   frfl <simulate|iterate|particles|verify|besov-norm|scaling-check>
//        [--config file.ini] [--out dir] [--seed n] [--force] [--set k=v]... [--strict-gates]
// Exit status: 0 success, 1 domain error, 2 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/property_tree/ini_parser.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frfl/config.hpp"
#include "frfl/gates.hpp"
#include "frfl/harness.hpp"
#include "frfl/iterate.hpp"
#include "frfl/particles.hpp"
#include "frfl/scaling.hpp"
#include "frfl/simulate.hpp"
#include "frfl/snapshot.hpp"
#include "frfl/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace frfl;

namespace {

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::string out;
  std::uint64_t seed = 1;
  bool force = false;
  bool strict_gates = false;
  std::vector<std::string> overrides;
};

/// Gate failure under --strict-gates.
class GateFailure : public DomainError {
 public:
  using DomainError::DomainError;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(const fs::path& path) : os_(path) {
    if (!os_) throw ConfigError("cannot write " + path.string());
  }
  Csv& raw(const std::string& line) {
    os_ << line << '\n';
    return *this;
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    auto put = [&](const auto& c) {
      if (!first) os_ << ',';
      first = false;
      if constexpr (std::is_arithmetic_v<std::decay_t<decltype(c)>>)
        os_ << (std::is_floating_point_v<std::decay_t<decltype(c)>> ? num(static_cast<double>(c))
                                                                    : std::to_string(c));
      else
        os_ << c;
    };
    (put(cells), ...);
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

json tree_to_json(const ConfigTree& t) {
  json j = json::object();
  for (const auto& [section, body] : t) {
    json s = json::object();
    for (const auto& [key, value] : body) s[key] = value.data();
    j[section] = s;
  }
  return j;
}

void prepare_out_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw ConfigError("output path " + dir.string() + " is not a directory");
    if (!fs::is_empty(dir)) {
      if (!force) throw ConfigError("output directory " + dir.string() + " is not empty; pass --force to reuse it");
      for (const auto& e : fs::directory_iterator(dir)) fs::remove_all(e.path());
    }
  }
  fs::create_directories(dir);
}

json gate_json(const GateReport& g) {
  json j;
  j["epsilon"] = g.epsilon;
  j["eta"] = g.eta;
  j["u_norm"] = g.u_norm;
  j["sigma_norm"] = g.sigma_norm;
  j["grad_u_norm"] = g.grad_u_norm;
  j["grad_sigma_norm"] = g.grad_sigma_norm;
  j["global_pass"] = g.global_pass;
  j["sigma_small"] = g.sigma_small;
  j["local_T"] = g.local_T ? json(*g.local_T) : json(nullptr);
  return j;
}

/// Reports the gates; under --strict-gates a failed global gate stops the run.
GateReport check_gates(const RunConfig& c, const Invocation& inv, const ScalarField& s0, const VectorField& u0,
                       json& summary) {
  auto g = smallness_gates(s0, u0, c.epsilon, c.eta, c.alpha);
  summary["gates"] = gate_json(g);
  if (!g.global_pass) {
    std::ostringstream msg;
    msg << "smallness gate failed: ||u0||_{B^{2-alpha}} + ||sigma0||_{B^1} = " << g.u_norm + g.sigma_norm
        << " >= epsilon = " << g.epsilon;
    if (inv.strict_gates) throw GateFailure(msg.str());
    std::cerr << "warning: " << msg.str() << "; running without the small-data guarantee\n";
  }
  return g;
}

void write_state(const fs::path& dir, const std::string& prefix, const SolverState& s) {
  write_snapshot((dir / (prefix + "sigma.frfl")).string(), "sigma", s.sigma);
  for (int a = 0; a < s.u.dim(); ++a) {
    const std::string name = "u" + std::to_string(a + 1);
    write_snapshot((dir / (prefix + name + ".frfl")).string(), name, s.u[a]);
  }
}

void write_diagnostics(const fs::path& path, const std::vector<DiagnosticRecord>& recs) {
  Csv csv(path);
  csv.raw(diagnostics_csv_header());
  for (const auto& r : recs)
    csv.row(r.t, r.kinetic, r.dissipation, r.residual, r.linf_u, r.crit_sigma, r.crit_u, r.high_sigma, r.high_u,
            r.mean_sigma);
}

json trajectory_summary(const std::vector<DiagnosticRecord>& recs) {
  json j;
  j["records"] = recs.size();
  if (recs.empty()) return j;
  double ms = 0.0, mu = 0.0, dmin = INFINITY, drift = 0.0;
  for (const auto& r : recs) {
    ms = std::max(ms, r.crit_sigma);
    mu = std::max(mu, r.crit_u);
    dmin = std::min(dmin, r.dissipation);
    drift = std::max(drift, std::abs(r.mean_sigma - recs.front().mean_sigma));
  }
  const auto& a = recs.front();
  j["initial_crit_sigma"] = a.crit_sigma;
  j["initial_crit_u"] = a.crit_u;
  j["max_crit_sigma"] = ms;
  j["max_crit_u"] = mu;
  j["mean_sigma_drift"] = drift;
  j["min_dissipation"] = dmin;
  if (recs.size() >= 2) {
    auto f = flocking_report(recs);
    j["linf_u_initial"] = f.linf_u.front();
    j["linf_u_final"] = f.linf_u.back();
    j["linf_u_ratio"] = f.final_ratio;
    j["flocking_decayed"] = f.decayed;
  }
  return j;
}

SimulateConfig simulate_config(const RunConfig& c) {
  SimulateConfig s;
  s.t_final = c.t_final;
  s.t_start = c.t_start;
  s.step = {c.dt, c.duhamel_rule, c.rk_order, c.cfl_max};
  s.record_stride = c.record_stride;
  s.snapshot_stride = c.snapshot_stride;
  return s;
}

int run_direct(const RunConfig& c, const Invocation& inv, const fs::path& out, json& summary) {
  auto [s0, u0] = initial_data(c, inv.seed);
  check_gates(c, inv, s0, u0, summary);
  const auto p = AlignmentParams::make(c.dim, c.alpha);
  fs::path snaps = out / "snapshots";
  if (c.snapshot_stride > 0) fs::create_directories(snaps);
  auto sink = [&](long k, const SolverState& s) {
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "step_%08ld_", k);
    write_state(snaps, prefix, s);
  };
  auto tr = simulate(SolverState(c.t_start, std::move(s0), std::move(u0), p), simulate_config(c), sink);
  write_diagnostics(out / "diagnostics.csv", tr.records);
  json r = trajectory_summary(tr.records);
  r["steps"] = tr.steps;
  r["t_reached"] = tr.final_state.t;
  r["status"] = tr.status == RunStatus::completed ? "completed" : "aborted";
  summary["result"] = r;
  if (tr.status == RunStatus::aborted) {
    write_state(out, "abort_", tr.final_state);
    std::string msg = tr.message;
    if (tr.suggested_dt > 0.0) {
      msg += "; suggested dt " + num(tr.suggested_dt);
      summary["result"]["suggested_dt"] = tr.suggested_dt;
    }
    throw DomainError(msg);
  }
  return 0;
}

int run_iterate(const RunConfig& c, const Invocation& inv, const fs::path& out, json& summary) {
  if (c.t_start != 0.0) throw ConfigError("the iterate scheme starts at t = 0; set run.t_start = 0");
  auto [s0, u0] = initial_data(c, inv.seed);
  check_gates(c, inv, s0, u0, summary);
  const auto p = AlignmentParams::make(c.dim, c.alpha);
  IterateConfig ic;
  ic.t_final = c.t_final;
  ic.step = {c.dt, c.duhamel_rule, c.rk_order, c.cfl_max};
  ic.stride = c.iterate_stride;
  ic.n_max = c.n_max;
  ic.n0 = c.n0;
  ic.stop_tol = c.stop_tol;
  auto res = iterate_scheme(s0, u0, p, ic);

  {
    Csv csv(out / "iterates.csv");
    csv.raw(iterate_csv_header());
    for (const auto& r : res.records)
      csv.row(r.n, r.norm_sigma_crit, r.norm_u_crit, r.norm_u_l1, r.norm_grad_sigma, r.norm_grad_u, r.delta_u,
              r.delta_sigma);
  }
  const DyadicDecomposition dec(c.grid());
  std::vector<DiagnosticRecord> recs;
  for (std::size_t k = 0; k < res.last.t.size(); ++k)
    recs.push_back(diagnose(SolverState(res.last.t[k], res.last.sigma[k], res.last.u[k], p), dec));
  fill_residuals(recs);
  write_diagnostics(out / "diagnostics.csv", recs);

  json r = trajectory_summary(recs);
  r["iterations"] = res.records.empty() ? 0 : res.records.back().n;
  r["status"] = to_string(res.status);
  r["message"] = res.message;
  if (res.records.size() >= 3) {
    const double floor = roundoff_floor(res.records);
    auto cm = cauchy_monitor(res.records, floor);
    json m;
    m["roundoff_floor"] = floor;
    m["ratios_u"] = cm.ratios_u;
    m["raw_ratios_u"] = cm.raw_ratios_u;
    m["ratios_sigma"] = cm.ratios_sigma;
    m["fitted_rate"] = cm.fitted_rate ? json(*cm.fitted_rate) : json(nullptr);
    m["contraction"] = cm.contraction;
    m["converged"] = cm.converged;
    r["cauchy"] = m;
  }
  summary["result"] = r;
  if (res.status == IterateStatus::diverged || res.status == IterateStatus::aborted)
    throw DomainError("iterate scheme " + std::string(to_string(res.status)) + ": " + res.message);
  return 0;
}

int run_particles(const RunConfig& c, const Invocation& inv, const fs::path& out, json& summary) {
  const auto p0 = AlignmentParams::make(c.dim, c.alpha);  // validates alpha
  (void)p0;
  auto e = random_ensemble(c.dim, c.length, static_cast<std::size_t>(c.particle_count), c.particle_amplitude,
                           inv.seed);
  const CsParams cp{c.alpha, c.delta_reg};
  const Grid g = c.grid();
  const double mass = g.volume() / static_cast<double>(e.size());
  if (c.deposit_stride > 0) fs::create_directories(out / "deposits");

  Csv csv(out / "particles.csv");
  csv.raw(c.dim == 1 ? "t,diameter,fluctuation,momentum_x" : "t,diameter,fluctuation,momentum_x,momentum_y");
  auto record = [&](long k) {
    const double t = static_cast<double>(k) * c.particle_dt;
    const auto m = momentum(e);
    if (c.dim == 1)
      csv.row(t, velocity_diameter(e), fluctuation_energy(e), m[0]);
    else
      csv.row(t, velocity_diameter(e), fluctuation_energy(e), m[0], m[1]);
  };
  auto deposit = [&](long k) {
    auto f = deposit_fields(e, g, c.kernel_width, mass);
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "step_%08ld_", k);
    const fs::path dir = out / "deposits";
    write_snapshot((dir / (std::string(prefix) + "rho.frfl")).string(), "rho", f.rho);
    for (int a = 0; a < c.dim; ++a) {
      const std::string name = "u" + std::to_string(a + 1);
      write_snapshot((dir / (std::string(prefix) + name + ".frfl")).string(), name, f.u[a]);
    }
  };

  const double d0 = velocity_diameter(e);
  double prev = d0, drift = 0.0;
  long increases = 0;
  record(0);
  if (c.deposit_stride > 0) deposit(0);
  for (long k = 1; k <= c.particle_steps; ++k) {
    const auto mb = momentum(e);
    e = cs_step(e, c.particle_dt, cp);
    const auto ma = momentum(e);
    for (std::size_t a = 0; a < ma.size(); ++a) drift = std::max(drift, std::abs(ma[a] - mb[a]));
    const double dn = velocity_diameter(e);
    if (dn > prev) ++increases;
    prev = dn;
    if (k % c.particle_record_stride == 0 || k == c.particle_steps) record(k);
    if (c.deposit_stride > 0 && (k % c.deposit_stride == 0 || k == c.particle_steps)) deposit(k);
  }
  json r;
  r["particles"] = e.size();
  r["steps"] = c.particle_steps;
  r["particle_mass"] = mass;
  r["delta_reg"] = c.delta_reg;
  r["diameter_initial"] = d0;
  r["diameter_final"] = prev;
  r["diameter_increases"] = increases;
  r["max_momentum_change_per_step"] = drift;
  summary["result"] = r;
  return 0;
}

int run_verify(const RunConfig& c, const Invocation& inv, const fs::path& out, json& summary) {
  Csv csv(out / "verify.csv");
  csv.raw("check,id,grid,sample,value");
  auto id = identity_vs_oracle(inv.seed, c.oracle_pairs, 64, c.alpha, c.length);
  for (std::size_t i = 0; i < id.rel.size(); ++i) csv.row("identity", "i_alpha_vs_oracle", 64, i, id.rel[i]);
  csv.row("identity", "i_alpha_constant_sigma", 64, -1, id.constant_sigma);

  HarnessConfig hc;
  hc.seed = inv.seed;
  hc.samples = c.verify_samples;
  hc.dim = c.dim;
  hc.length = c.length;
  hc.grid_sizes = c.verify_grids;
  hc.alpha = c.alpha;
  auto reports = inequality_harness(hc);
  json hj = json::array();
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.constants.size(); ++k) csv.row("harness", r.id, r.grid_sizes[k], -1, r.constants[k]);
    for (std::size_t k = 0; k < r.growth.size(); ++k)
      csv.row("growth", r.id, r.grid_sizes[k + 1], -1, r.growth[k]);
    json x;
    x["id"] = r.id;
    x["constant"] = r.constant;
    x["constants"] = r.constants;
    x["growth"] = r.growth;
    x["growth_flag"] = r.growth_flag;
    x["worst_sample"] = r.worst_sample;
    x["worst_grid"] = r.worst_grid;
    hj.push_back(x);
  }
  json r;
  r["identity_max_rel"] = id.max_rel;
  r["identity_constant_sigma"] = id.constant_sigma;
  r["harness"] = hj;
  summary["result"] = r;
  return 0;
}

int run_besov(const RunConfig& c, const Invocation& inv, const std::optional<fs::path>& out, json& summary) {
  const Grid g = c.grid();
  ScalarField f = c.besov_input.empty() ? field_from_recipe(g, c.sigma, inv.seed, 0, "initial.sigma")
                                        : load_field_file(g, c.besov_input);
  const DyadicDecomposition dec(g);
  const BesovSpec spec{c.besov_s, c.besov_p, c.besov_q};
  const double total = besov_norm(dec, f, spec);
  std::ostringstream text;
  text << "j,block_norm,weighted\n";
  for (const auto& t : dec.breakdown(f, c.besov_s, c.besov_p))
    text << t.j << ',' << num(t.block_norm) << ',' << num(t.weighted) << '\n';
  text << "total,," << num(total) << '\n';
  std::cout << text.str();
  if (out) {
    std::ofstream os(*out / "besov.csv");
    os << text.str();
  }
  summary["result"] = {{"total", total}, {"mean", f.mean()}};
  return 0;
}

int run_scaling(const RunConfig& c, const Invocation& inv, const fs::path& out, json& summary) {
  auto [s0, u0] = initial_data(c, inv.seed);
  check_gates(c, inv, s0, u0, summary);
  const auto p = AlignmentParams::make(c.dim, c.alpha);
  auto rep = scaling_check(s0, u0, p, simulate_config(c), c.lambda, c.compare_stride);
  {
    Csv csv(out / "scaling.csv");
    csv.raw("t,mismatch");
    for (std::size_t k = 0; k < rep.times.size(); ++k) csv.row(rep.times[k], rep.mismatch[k]);
  }
  json r;
  r["lambda"] = rep.lambda;
  r["amplitude_factor"] = rep.amplitude_factor;
  r["time_factor"] = rep.time_factor;
  r["max_mismatch"] = rep.max_mismatch;
  r["completed"] = rep.completed;
  summary["result"] = r;
  if (!rep.completed) throw DomainError("a scaling run aborted before t_final");
  return 0;
}

void write_summary(const fs::path& path, const json& j) {
  std::ofstream os(path);
  os << j.dump(2) << '\n';
}

int dispatch(const Invocation& inv) {
  std::optional<fs::path> out;
  json summary;
  try {
    const auto tree = resolve_config_file(inv.config_path, inv.overrides);
    const auto c = parse_config(tree);
    std::string sub = inv.subcommand;
    if (sub == "simulate" && c.scheme == "iterate") sub = "iterate";
    if (!inv.out.empty()) out = fs::path(inv.out);
    if (!out && inv.subcommand != "besov-norm") throw ConfigError(inv.subcommand + " needs --out");
    if (out) prepare_out_dir(*out, inv.force);

    summary["subcommand"] = inv.subcommand;
    summary["seed"] = inv.seed;
    summary["config"] = tree_to_json(tree);
    if (out) boost::property_tree::write_ini((*out / "resolved.ini").string(), tree);

    try {
      if (sub == "simulate") run_direct(c, inv, *out, summary);
      else if (sub == "iterate") run_iterate(c, inv, *out, summary);
      else if (sub == "particles") run_particles(c, inv, *out, summary);
      else if (sub == "verify") run_verify(c, inv, *out, summary);
      else if (sub == "besov-norm") run_besov(c, inv, out, summary);
      else if (sub == "scaling-check") run_scaling(c, inv, *out, summary);
      summary["status"] = "ok";
      summary["exit_code"] = 0;
      if (out) write_summary(*out / "summary.json", summary);
      return 0;
    } catch (const DomainError& e) {
      summary["status"] = dynamic_cast<const GateFailure*>(&e) ? "gate_failure" : "domain_error";
      summary["message"] = e.what();
      summary["exit_code"] = 1;
      if (out) write_summary(*out / "summary.json", summary);
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  } catch (const std::invalid_argument& e) {  // ConfigError, GridMismatch
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Euler alignment simulator"};
  app.require_subcommand(1);
  Invocation inv;
  for (const char* name : {"simulate", "iterate", "particles", "verify", "besov-norm", "scaling-check"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", inv.config_path, "INI configuration file");
    sub->add_option("--out", inv.out, "output directory");
    sub->add_option("--seed", inv.seed, "seed for random recipes and samples");
    sub->add_flag("--force", inv.force, "reuse a non-empty output directory (its contents are removed)");
    sub->add_option("--set", inv.overrides, "section.key=value override (repeatable)")->take_all();
    sub->add_flag("--strict-gates", inv.strict_gates, "stop with exit 1 when the smallness gate fails");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();
  return dispatch(inv);
}
