#pragma once

// Linear transport / continuity equation sigma_t + div(u sigma) = f, solved
// spectrally with explicit Runge-Kutta stages.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "littlewood_paley.hpp"

namespace frfl {

struct TransportStepperConfig {
  double dt = 1e-2;
  /// 2: Heun, 3: Shu-Osher SSP, 4: classical.
  int rk_order = 3;
  bool dealias_products = true;
  double cfl_max = 0.5;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (rk_order < 2 || rk_order > 4)
      throw ConfigError("rk_order must be 2, 3 or 4, got " + std::to_string(rk_order));
    if (!(cfl_max > 0.0)) throw ConfigError("cfl_max must be positive");
  }
};

namespace transport_detail {

inline ScalarField rhs(const ScalarField& sigma, const VectorField& u, const ScalarField& f, bool dealiased) {
  ScalarField acc(sigma.grid());
  for (int a = 0; a < u.dim(); ++a) {
    auto flux = dealiased ? product(u[a], sigma) : pointwise_product(u[a], sigma);
    acc -= partial(flux, a);
  }
  acc += f;
  return acc;
}

inline VectorField lerp(const VectorField& a, const VectorField& b, double theta) {
  if (theta == 0.0) return a;
  if (theta == 1.0) return b;
  auto out = a;
  out *= 1.0 - theta;
  out.axpy(theta, b);
  return out;
}

inline ScalarField lerp(const ScalarField& a, const ScalarField& b, double theta) {
  if (theta == 0.0) return a;
  if (theta == 1.0) return b;
  auto out = a;
  out *= 1.0 - theta;
  out.axpy(theta, b);
  return out;
}

}  // namespace transport_detail

/// Rejects the step when max|u| dt / h exceeds cfl_max.
inline void check_cfl(double max_speed, const Grid& g, const TransportStepperConfig& cfg) {
  const double courant = max_speed * cfg.dt / g.spacing();
  if (courant > cfg.cfl_max) {
    const double suggested = cfg.cfl_max * g.spacing() / max_speed;
    std::ostringstream msg;
    msg << "CFL guard: max|u| dt / h = " << courant << " exceeds " << cfg.cfl_max << "; use dt <= "
        << suggested;
    throw CflViolation(msg.str(), suggested);
  }
}

/// One RK step of sigma' = -div(u sigma) + f with u and f linear in time
/// between their values at the two ends of the step.
inline ScalarField transport_step(const ScalarField& sigma, const VectorField& u_now, const VectorField& u_next,
                                  const ScalarField& f_now, const ScalarField& f_next,
                                  const TransportStepperConfig& cfg) {
  cfg.validate();
  require_same_grid(sigma.grid(), u_now.grid());
  require_same_grid(sigma.grid(), u_next.grid());
  check_cfl(std::max(u_now.max_norm(), u_next.max_norm()), sigma.grid(), cfg);
  using transport_detail::lerp;
  using transport_detail::rhs;
  const double dt = cfg.dt;
  const bool da = cfg.dealias_products;
  auto stage = [&](const ScalarField& s, double c) {
    return rhs(s, lerp(u_now, u_next, c), lerp(f_now, f_next, c), da);
  };
  switch (cfg.rk_order) {
    case 2: {
      auto k1 = stage(sigma, 0.0);
      auto s1 = sigma;
      s1.axpy(dt, k1);
      auto k2 = stage(s1, 1.0);
      auto out = sigma;
      out.axpy(0.5 * dt, k1);
      out.axpy(0.5 * dt, k2);
      return out;
    }
    case 3: {
      // Shu-Osher SSP3 in increment form: s1 = sigma + dt k1,
      // s2 = sigma + dt (k1 + k2) / 4, out = sigma + dt (k1 + k2 + 4 k3) / 6.
      auto k1 = stage(sigma, 0.0);
      auto s = sigma;
      s.axpy(dt, k1);
      auto k2 = stage(s, 1.0);
      s = sigma;
      s.axpy(0.25 * dt, k1);
      s.axpy(0.25 * dt, k2);
      auto k3 = stage(s, 0.5);
      auto out = sigma;
      out.axpy(dt / 6.0, k1);
      out.axpy(dt / 6.0, k2);
      out.axpy(2.0 * dt / 3.0, k3);
      return out;
    }
    default: {
      auto k1 = stage(sigma, 0.0);
      auto s = sigma;
      s.axpy(0.5 * dt, k1);
      auto k2 = stage(s, 0.5);
      s = sigma;
      s.axpy(0.5 * dt, k2);
      auto k3 = stage(s, 0.5);
      s = sigma;
      s.axpy(dt, k3);
      auto k4 = stage(s, 1.0);
      auto out = sigma;
      out.axpy(dt / 6.0, k1);
      out.axpy(dt / 3.0, k2);
      out.axpy(dt / 3.0, k3);
      out.axpy(dt / 6.0, k4);
      return out;
    }
  }
}

/// Frozen velocity and source over the step.
inline ScalarField transport_step(const ScalarField& sigma, const VectorField& u, const ScalarField& f,
                                  const TransportStepperConfig& cfg) {
  return transport_step(sigma, u, u, f, f, cfg);
}

/// Every first derivative d_j u_i as one list of components, so that Besov
/// norms of grad u use the pointwise Frobenius magnitude.
inline std::vector<ScalarField> gradient_components(const VectorField& u) {
  std::vector<ScalarField> out;
  for (int i = 0; i < u.dim(); ++i)
    for (int j = 0; j < u.dim(); ++j) out.push_back(partial(u[i], j));
  return out;
}

struct TransportSample {
  double t;
  ScalarField sigma;
  VectorField u;
  ScalarField f;
};

/// Smallest C with
///   ||sigma(t)||_{B^1_{d,1}} <= ||sigma_0|| + int_0^t ||f|| + C int_0^t ||grad u|| ||sigma||
/// at every sample time, time integrals by the trapezoid rule. Excesses below
/// `slack` relative to ||sigma_0|| count as zero; a positive excess with a
/// vanishing integral gives infinity.
inline double transport_estimate_check(const std::vector<TransportSample>& traj, double slack = 1e-10) {
  if (traj.empty()) return 0.0;
  const DyadicDecomposition dec(traj.front().sigma.grid());
  const double s0 = besov_d1(dec, traj.front().sigma, 1.0);
  double f_int = 0.0, g_int = 0.0, c = 0.0;
  double prev_f = besov_d1(dec, traj.front().f, 1.0);
  double prev_g = besov_d1(dec, gradient_components(traj.front().u), 1.0) * s0;
  for (std::size_t n = 1; n < traj.size(); ++n) {
    const auto& smp = traj[n];
    const double h = smp.t - traj[n - 1].t;
    const double sn = besov_d1(dec, smp.sigma, 1.0);
    const double fn = besov_d1(dec, smp.f, 1.0);
    const double gn = besov_d1(dec, gradient_components(smp.u), 1.0) * sn;
    f_int += 0.5 * h * (prev_f + fn);
    g_int += 0.5 * h * (prev_g + gn);
    prev_f = fn;
    prev_g = gn;
    const double excess = sn - s0 - f_int;
    if (excess <= slack * std::max(s0, 1e-300)) continue;
    if (g_int <= 0.0) return std::numeric_limits<double>::infinity();
    c = std::max(c, excess / g_int);
  }
  return c;
}

}  // namespace frfl
