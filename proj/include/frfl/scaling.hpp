#pragma once

// Scaling check: if (rho, u) solves the system then so does
//   rho_l(t, x) = rho(l^a t, l x),  u_l(t, x) = l^{a-1} u(l^a t, l x).
// The rescaled run uses the same samples on a box of side L / l with step
// dt / l^a, so step k of both runs describes the same physical instant.

#include <cmath>
#include <vector>

#include "simulate.hpp"

namespace frfl {

struct ScalingReport {
  double lambda = 1.0;
  double amplitude_factor = 1.0;  // l^{a-1}
  double time_factor = 1.0;       // l^a
  std::vector<double> times;      // base-run times compared
  std::vector<double> mismatch;   // relative mismatch per compared time
  double max_mismatch = 0.0;
  bool completed = true;
};

inline bool is_power_of_two(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) return false;
  int e = 0;
  return std::frexp(lambda, &e) == 0.5;
}

/// Runs both problems and compares (sigma, u) against the rescaled base
/// solution every `compare_stride` steps. The mismatch at a time is
/// (||d sigma||_inf + ||d u||_inf) / (||sigma||_inf + l^{a-1} ||u||_inf).
inline ScalingReport scaling_check(const ScalarField& sigma0, const VectorField& u0, const AlignmentParams& p,
                                   const SimulateConfig& base, double lambda, int compare_stride = 1) {
  if (!is_power_of_two(lambda)) throw ConfigError("lambda must be a power of two");
  if (compare_stride < 1) throw ConfigError("compare_stride must be >= 1");
  if (base.t_start != 0.0) throw ConfigError("scaling check starts at t = 0");
  const Grid& g = sigma0.grid();
  const Grid gl(g.dim(), g.n(), g.length() / lambda);

  ScalingReport r;
  r.lambda = lambda;
  r.amplitude_factor = std::pow(lambda, p.alpha - 1.0);
  r.time_factor = std::pow(lambda, p.alpha);

  const auto rebase = [&](const ScalarField& f, double scale) {
    auto v = f.values();
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x *= scale;
    return ScalarField::from_values(gl, std::move(out));
  };
  std::vector<ScalarField> ul;
  for (const auto& c : u0.components()) ul.push_back(rebase(c, r.amplitude_factor));

  SimulateConfig b = base;
  b.snapshot_stride = compare_stride;
  SimulateConfig s = b;
  s.step.dt = base.step.dt / r.time_factor;
  s.t_final = static_cast<double>(iterate_detail::step_count(base.t_final, base.step.dt)) * s.step.dt;

  auto ta = simulate(SolverState(0.0, sigma0, u0, p), b);
  auto tb = simulate(SolverState(0.0, rebase(sigma0, 1.0), VectorField(std::move(ul)), p), s);
  r.completed = ta.status == RunStatus::completed && tb.status == RunStatus::completed;
  const std::size_t n = std::min(ta.snapshots.size(), tb.snapshots.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& A = ta.snapshots[k];
    const auto& B = tb.snapshots[k];
    double ds = 0.0, du = 0.0;
    auto sa = A.sigma.values();
    auto sb = B.sigma.values();
    for (std::size_t i = 0; i < sa.size(); ++i) ds = std::max(ds, std::abs(sa[i] - sb[i]));
    for (int c = 0; c < A.u.dim(); ++c) {
      auto ua = A.u[c].values();
      auto ub = B.u[c].values();
      for (std::size_t i = 0; i < ua.size(); ++i) du = std::max(du, std::abs(r.amplitude_factor * ua[i] - ub[i]));
    }
    const double scale = A.sigma.max_norm() + r.amplitude_factor * A.u.max_norm();
    const double m = scale > 0.0 ? (ds + du) / scale : ds + du;
    r.times.push_back(A.t);
    r.mismatch.push_back(m);
    r.max_mismatch = std::max(r.max_mismatch, m);
  }
  return r;
}

}  // namespace frfl
