#pragma once

// The renormalised system
//   sigma_t + div(sigma u) = -div u,
//   u_t + mu L u = F(u, sigma) = I_alpha(u, sigma) - mu sigma L u - (u . grad) u,
// with rho = 1 + sigma and L = (-Delta)^{alpha/2}.

#include <string>
#include <utility>

#include "heat.hpp"
#include "nonlocal.hpp"
#include "transport.hpp"

namespace frfl {

struct SolverState {
  double t = 0.0;
  ScalarField sigma;
  VectorField u;
  AlignmentParams params;

  SolverState(double t0, ScalarField s, VectorField v, AlignmentParams p)
      : t(t0), sigma(std::move(s)), u(std::move(v)), params(p) {
    require_same_grid(sigma.grid(), u.grid());
  }

  const Grid& grid() const noexcept { return sigma.grid(); }
  ScalarField density() const { return sigma + ScalarField::constant(sigma.grid(), 1.0); }
};

/// The three pieces of F, kept apart for diagnostics.
struct ForcingTerms {
  VectorField leibniz;   // I_alpha(u, sigma)
  VectorField weighted;  // -mu sigma L u
  VectorField inertia;   // -(u . grad) u

  VectorField total() const {
    auto f = leibniz;
    f += weighted;
    f += inertia;
    return f;
  }
};

inline ForcingTerms assemble_F_terms(const VectorField& u, const ScalarField& sigma, const AlignmentParams& p) {
  require_same_grid(u.grid(), sigma.grid());
  std::vector<ScalarField> weighted;
  for (const auto& c : u.components()) {
    auto w = product(sigma, fractional_laplacian(c, p.alpha));
    w *= -p.mu;
    weighted.push_back(std::move(w));
  }
  auto inertia = advection(u, u);
  inertia *= -1.0;
  return {i_alpha(u, sigma, p), VectorField(std::move(weighted)), std::move(inertia)};
}

inline VectorField assemble_F(const VectorField& u, const ScalarField& sigma, const AlignmentParams& p) {
  return assemble_F_terms(u, sigma, p).total();
}

struct DirectStepConfig {
  double dt = 1e-2;
  /// 1: u and sigma advance against the partner field frozen at the left end;
  /// 2: predictor-corrector with stage-consistent partner values.
  int duhamel_rule = 2;
  int rk_order = 3;
  double cfl_max = 0.5;
};

/// Raises DensityError when 1 + sigma is not positive somewhere.
inline void check_density(const ScalarField& sigma) {
  auto v = sigma.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(1.0 + v[i] > 0.0))
      throw DensityError("density 1 + sigma = " + std::to_string(1.0 + v[i]) + " at grid point " +
                         std::to_string(i));
}

/// Coupled exponential / Runge-Kutta stepper for the renormalised system.
class DirectStepper {
 public:
  DirectStepper(const Grid& grid, const AlignmentParams& p, const DirectStepConfig& cfg)
      : params_(p), cfg_(cfg), heat_(grid, heat_config(p, cfg)) {
    transport_.dt = cfg.dt;
    transport_.rk_order = cfg.rk_order;
    transport_.cfl_max = cfg.cfl_max;
    transport_.validate();
  }

  const DirectStepConfig& config() const noexcept { return cfg_; }

  SolverState step(const SolverState& s) const {
    const auto f_now = assemble_F(s.u, s.sigma, params_);
    const auto src_now = negated_divergence(s.u);
    // First-order stage: both fields see their partner at t_n.
    auto u1 = heat_.step(s.u, f_now, f_now);
    ScalarField sigma1(s.grid());
    if (cfg_.duhamel_rule == 1) {
      sigma1 = transport_step(s.sigma, s.u, s.u, src_now, src_now, transport_);
    } else {
      auto sigma_pred = transport_step(s.sigma, s.u, u1, src_now, negated_divergence(u1), transport_);
      const auto f_pred = assemble_F(u1, sigma_pred, params_);
      u1 = heat_.step(s.u, f_now, f_pred);
      sigma1 = transport_step(s.sigma, s.u, u1, src_now, negated_divergence(u1), transport_);
    }
    SolverState out(s.t + cfg_.dt, std::move(sigma1), std::move(u1), params_);
    out.sigma.canonicalize();
    out.u.canonicalize();
    if (!out.sigma.is_finite() || !out.u.is_finite())
      throw DomainError("non-finite values after step at t = " + std::to_string(out.t));
    check_density(out.sigma);
    return out;
  }

  static ScalarField negated_divergence(const VectorField& u) {
    auto d = divergence(u);
    d *= -1.0;
    return d;
  }

 private:
  static HeatStepperConfig heat_config(const AlignmentParams& p, const DirectStepConfig& cfg) {
    HeatStepperConfig h;
    h.mu = p.mu;
    h.alpha = p.alpha;
    h.dt = cfg.dt;
    h.duhamel_rule = cfg.duhamel_rule;
    return h;
  }

  AlignmentParams params_;
  DirectStepConfig cfg_;
  HeatStepper heat_;
  TransportStepperConfig transport_;
};

inline SolverState direct_step(const SolverState& s, const DirectStepConfig& cfg) {
  return DirectStepper(s.grid(), s.params, cfg).step(s);
}

/// Blocks |j| <= n + n0 of the data (mean of sigma kept).
inline std::pair<ScalarField, VectorField> init_truncated_data(const DyadicDecomposition& dec,
                                                               const ScalarField& sigma0, const VectorField& u0,
                                                               int n, int n0) {
  const int level = n + n0;
  std::vector<ScalarField> comps;
  for (const auto& c : u0.components()) comps.push_back(truncate_blocks(dec, c, level));
  return {truncate_blocks(dec, sigma0, level), VectorField(std::move(comps))};
}

/// Smallest truncation level that keeps every block of the grid.
inline int full_truncation_level(const DyadicDecomposition& dec) {
  return std::max(std::abs(dec.j_min()), std::abs(dec.j_max()));
}

}  // namespace frfl
