#pragma once

// The decoupled iterative scheme: sigma^0 = sigma_0^0, u^0 = 0, and for n >= 1
//   u^n_t + mu L u^n = F(u^{n-1}, sigma^{n-1}),       u^n(0) = u_0^n,
//   sigma^n_t + div(sigma^n u^n) = -div u^n,           sigma^n(0) = sigma_0^n,
// each solved on the whole horizon [0, T].

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "euler.hpp"

namespace frfl {

struct IterateRecord {
  int n = 0;
  double norm_sigma_crit = 0.0;     // ||sigma^n||_{L^infty_T B^1_{d,1}}
  double norm_u_crit = 0.0;         // ||u^n||_{L^infty_T B^{2-alpha}_{d,1}}
  double norm_u_l1 = 0.0;           // ||u^n||_{L^1_T B^2_{d,1}}
  double norm_grad_sigma = 0.0;     // ||grad sigma^n||_{L^infty_T B^1_{d,1}}
  double norm_grad_u = 0.0;         // ||grad u^n||_{L^infty_T B^{2-alpha}_{d,1}} + ||grad u^n||_{L^1_T B^2_{d,1}}
  double delta_u = std::numeric_limits<double>::quiet_NaN();      // dU^n_T
  double delta_sigma = std::numeric_limits<double>::quiet_NaN();  // ||d sigma^n||_{L^infty_T B^1_{d,1}}
};

inline const char* iterate_csv_header() {
  return "n,norm_sigma_crit,norm_u_crit,norm_u_l1,norm_grad_sigma,norm_grad_u,delta_u,delta_sigma";
}

struct IterateConfig {
  double t_final = 1.0;
  DirectStepConfig step;
  /// Samples of (sigma^n, u^n) kept every `stride` steps; the frozen forcing
  /// is linear in time between samples.
  int stride = 1;
  int n_max = 20;
  /// Truncation offset; negative selects the level keeping every block.
  int n0 = -1;
  double stop_tol = 1e-8;
};

enum class IterateStatus { converged, max_iterations, diverged, aborted };

inline const char* to_string(IterateStatus s) {
  switch (s) {
    case IterateStatus::converged: return "converged";
    case IterateStatus::max_iterations: return "max_iterations";
    case IterateStatus::diverged: return "diverged";
    default: return "aborted";
  }
}

/// Time-sampled trajectory of one iterate.
struct SampledPath {
  std::vector<double> t;
  std::vector<ScalarField> sigma;
  std::vector<VectorField> u;
};

struct IterateResult {
  std::vector<IterateRecord> records;
  SampledPath last;
  IterateStatus status = IterateStatus::max_iterations;
  std::string message;
};

namespace iterate_detail {

inline long step_count(double t_final, double dt) {
  const double r = t_final / dt;
  const long n = std::lround(r);
  if (n < 0 || std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
    throw ConfigError("t_final must be a non-negative multiple of dt");
  return n;
}

struct PathNorms {
  double sigma_inf = 0.0, u_inf = 0.0, u_l1 = 0.0, grad_sigma_inf = 0.0, grad_u = 0.0;
};

inline PathNorms path_norms(const SampledPath& p, const DyadicDecomposition& dec, double alpha) {
  PathNorms r;
  const double s = 2.0 - alpha;
  double prev_l1 = 0.0, prev_gl1 = 0.0, grad_u_inf = 0.0, grad_u_l1 = 0.0;
  for (std::size_t k = 0; k < p.t.size(); ++k) {
    const auto gu = gradient_components(p.u[k]);
    r.sigma_inf = std::max(r.sigma_inf, besov_d1(dec, p.sigma[k], 1.0));
    r.grad_sigma_inf = std::max(r.grad_sigma_inf, besov_d1(dec, gradient(p.sigma[k]), 1.0));
    r.u_inf = std::max(r.u_inf, besov_d1(dec, p.u[k], s));
    grad_u_inf = std::max(grad_u_inf, besov_d1(dec, gu, s));
    const double l1 = besov_d1(dec, p.u[k], 2.0);
    const double gl1 = besov_d1(dec, gu, 2.0);
    if (k > 0) {
      const double h = p.t[k] - p.t[k - 1];
      r.u_l1 += 0.5 * h * (prev_l1 + l1);
      grad_u_l1 += 0.5 * h * (prev_gl1 + gl1);
    }
    prev_l1 = l1;
    prev_gl1 = gl1;
  }
  r.grad_u = grad_u_inf + grad_u_l1;
  return r;
}

/// (dU, d sigma) between two sampled paths on the same times.
inline std::pair<double, double> path_difference(const SampledPath& a, const SampledPath& b,
                                                 const DyadicDecomposition& dec, double alpha) {
  SampledPath d;
  d.t = a.t;
  for (std::size_t k = 0; k < a.t.size(); ++k) {
    d.sigma.push_back(a.sigma[k] - b.sigma[k]);
    d.u.push_back(a.u[k] - b.u[k]);
  }
  const double s = 2.0 - alpha;
  double du_inf = 0.0, du_l1 = 0.0, ds_inf = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    ds_inf = std::max(ds_inf, besov_d1(dec, d.sigma[k], 1.0));
    du_inf = std::max(du_inf, besov_d1(dec, d.u[k], s));
    const double l1 = besov_d1(dec, d.u[k], 2.0);
    if (k > 0) du_l1 += 0.5 * (d.t[k] - d.t[k - 1]) * (prev + l1);
    prev = l1;
  }
  return {du_l1 + du_inf, ds_inf};
}

}  // namespace iterate_detail

/// Runs the scheme from (sigma0, u0). Non-convergence (dU increasing three
/// times in a row, or non-finite values) and step failures are reported in
/// the status, not thrown.
inline IterateResult iterate_scheme(const ScalarField& sigma0, const VectorField& u0, const AlignmentParams& p,
                                    const IterateConfig& cfg) {
  require_same_grid(sigma0.grid(), u0.grid());
  if (cfg.stride < 1) throw ConfigError("stride must be >= 1");
  if (cfg.n_max < 0) throw ConfigError("n_max must be >= 0");
  const Grid& g = sigma0.grid();
  const DyadicDecomposition dec(g);
  const long steps = iterate_detail::step_count(cfg.t_final, cfg.step.dt);
  const int n0 = cfg.n0 < 0 ? full_truncation_level(dec) : cfg.n0;
  const int full = full_truncation_level(dec);
  auto data = [&](int n) -> std::pair<ScalarField, VectorField> {
    if (n + n0 >= full) return {sigma0, u0};
    return init_truncated_data(dec, sigma0, u0, n, n0);
  };

  HeatStepperConfig hc;
  hc.mu = p.mu;
  hc.alpha = p.alpha;
  hc.dt = cfg.step.dt;
  hc.duhamel_rule = cfg.step.duhamel_rule;
  HeatStepper heat(g, hc);
  TransportStepperConfig tc;
  tc.dt = cfg.step.dt;
  tc.rk_order = cfg.step.rk_order;
  tc.cfl_max = cfg.step.cfl_max;

  std::vector<long> sample_steps;
  for (long k = 0; k < steps; k += cfg.stride) sample_steps.push_back(k);
  sample_steps.push_back(steps);

  IterateResult res;
  // n = 0: constant-in-time sigma_0^0, zero velocity.
  SampledPath prev;
  {
    auto [s00, u00] = data(0);
    (void)u00;
    for (long k : sample_steps) {
      prev.t.push_back(static_cast<double>(k) * cfg.step.dt);
      prev.sigma.push_back(s00);
      prev.u.push_back(VectorField(g));
    }
    auto norms = iterate_detail::path_norms(prev, dec, p.alpha);
    IterateRecord r0;
    r0.norm_sigma_crit = norms.sigma_inf;
    r0.norm_u_crit = norms.u_inf;
    r0.norm_u_l1 = norms.u_l1;
    r0.norm_grad_sigma = norms.grad_sigma_inf;
    r0.norm_grad_u = norms.grad_u;
    res.records.push_back(r0);
  }

  int rises = 0;
  for (int n = 1; n <= cfg.n_max; ++n) {
    // Forcing of the previous iterate at its sample times.
    std::vector<VectorField> forcing;
    forcing.reserve(prev.t.size());
    for (std::size_t k = 0; k < prev.t.size(); ++k) forcing.push_back(assemble_F(prev.u[k], prev.sigma[k], p));
    auto forcing_at = [&](long step) {
      const std::size_t seg = std::min<std::size_t>(static_cast<std::size_t>(step / cfg.stride), forcing.size() - 1);
      const long k0 = sample_steps[seg];
      if (step == k0 || seg + 1 >= forcing.size()) return forcing[seg];
      const long k1 = sample_steps[seg + 1];
      const double th = static_cast<double>(step - k0) / static_cast<double>(k1 - k0);
      auto f = forcing[seg];
      f *= 1.0 - th;
      f.axpy(th, forcing[seg + 1]);
      return f;
    };

    auto [sn, un] = data(n);
    SampledPath cur;
    cur.t.push_back(0.0);
    cur.sigma.push_back(sn);
    cur.u.push_back(un);
    auto u = un;
    auto sigma = sn;
    try {
      auto f_now = forcing_at(0);
      for (long k = 0; k < steps; ++k) {
        auto f_next = forcing_at(k + 1);
        auto u_next = heat.step(u, f_now, f_next);
        auto src_now = DirectStepper::negated_divergence(u);
        auto src_next = DirectStepper::negated_divergence(u_next);
        sigma = transport_step(sigma, u, u_next, src_now, src_next, tc);
        u = std::move(u_next);
        u.canonicalize();
        sigma.canonicalize();
        f_now = std::move(f_next);
        if ((k + 1) % cfg.stride == 0 || k + 1 == steps) {
          if (!u.is_finite() || !sigma.is_finite()) throw DomainError("non-finite iterate");
          cur.t.push_back(static_cast<double>(k + 1) * cfg.step.dt);
          cur.sigma.push_back(sigma);
          cur.u.push_back(u);
        }
      }
    } catch (const DomainError& e) {
      res.status = IterateStatus::aborted;
      res.message = "iteration " + std::to_string(n) + ": " + e.what();
      res.last = std::move(prev);
      return res;
    }

    auto norms = iterate_detail::path_norms(cur, dec, p.alpha);
    auto [du, ds] = iterate_detail::path_difference(cur, prev, dec, p.alpha);
    IterateRecord r;
    r.n = n;
    r.norm_sigma_crit = norms.sigma_inf;
    r.norm_u_crit = norms.u_inf;
    r.norm_u_l1 = norms.u_l1;
    r.norm_grad_sigma = norms.grad_sigma_inf;
    r.norm_grad_u = norms.grad_u;
    r.delta_u = du;
    r.delta_sigma = ds;
    const double last_du = res.records.back().delta_u;
    res.records.push_back(r);
    prev = std::move(cur);

    if (!std::isfinite(du) || !std::isfinite(ds)) {
      res.status = IterateStatus::diverged;
      res.message = "non-finite difference norm at n = " + std::to_string(n);
      break;
    }
    rises = (n > 1 && du > last_du) ? rises + 1 : 0;
    if (rises >= 3) {
      res.status = IterateStatus::diverged;
      res.message = "dU increased three times in a row up to n = " + std::to_string(n);
      break;
    }
    if (du < cfg.stop_tol) {
      res.status = IterateStatus::converged;
      res.message = "dU below stop_tol at n = " + std::to_string(n);
      break;
    }
  }
  if (res.status == IterateStatus::max_iterations) res.message = "reached n_max";
  res.last = std::move(prev);
  return res;
}

struct CauchyReport {
  std::vector<double> ratios_u;      // dU^{n+1} / dU^n for n >= 1
  std::vector<double> ratios_sigma;
  std::vector<double> raw_ratios_u;  // same, ignoring the floor
  /// exp of the least-squares slope of log dU^n over entries above the floor.
  std::optional<double> fitted_rate;
  bool contraction = false;
  bool converged = false;
};

/// Roundoff level of a difference norm: differences of two iterates that
/// each carry about `steps` rounding errors of relative size eps cannot be
/// resolved below rel * scale, with scale the iterate size.
inline double roundoff_floor(const std::vector<IterateRecord>& recs, double rel = 1e-12) {
  double scale = 0.0;
  for (const auto& r : recs) scale = std::max(scale, r.norm_u_crit + r.norm_u_l1);
  return rel * scale;
}

/// Differences at or below `floor` count as zero, and a zero difference
/// after a zero difference gives ratio 0: identical consecutive iterates are
/// a fixed point.
inline CauchyReport cauchy_monitor(const std::vector<IterateRecord>& recs, double floor = 0.0) {
  if (recs.size() < 3) throw DomainError("cauchy monitor needs at least three iterates");
  CauchyReport c;
  auto clip = [floor](double v) { return v <= floor ? 0.0 : v; };
  auto ratio = [](double a, double b) {
    if (b == 0.0) return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return a / b;
  };
  std::vector<double> ns, logs;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto& r = recs[i];
    const double du = clip(r.delta_u);
    if (du > 0.0 && std::isfinite(du)) {
      ns.push_back(r.n);
      logs.push_back(std::log(du));
    }
    if (du == 0.0) c.converged = true;
    if (i + 1 < recs.size()) {
      c.ratios_u.push_back(ratio(clip(recs[i + 1].delta_u), du));
      c.ratios_sigma.push_back(ratio(clip(recs[i + 1].delta_sigma), clip(r.delta_sigma)));
      c.raw_ratios_u.push_back(ratio(recs[i + 1].delta_u, r.delta_u));
    }
  }
  if (ns.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      mx += ns[i];
      my += logs[i];
    }
    mx /= static_cast<double>(ns.size());
    my /= static_cast<double>(ns.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      sxy += (ns[i] - mx) * (logs[i] - my);
      sxx += (ns[i] - mx) * (ns[i] - mx);
    }
    c.fitted_rate = std::exp(sxy / sxx);
  }
  c.contraction = !c.ratios_u.empty() &&
                  std::all_of(c.ratios_u.begin(), c.ratios_u.end(), [](double r) { return r < 1.0; });
  return c;
}

}  // namespace frfl
