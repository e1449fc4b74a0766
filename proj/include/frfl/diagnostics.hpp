#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "euler.hpp"

namespace frfl {

struct DiagnosticRecord {
  double t = 0.0;
  double kinetic = 0.0;       // int rho |u|^2
  double dissipation = 0.0;   // int int |u(x)-u(y)|^2 rho(x) rho(y) / |x-y|^{d+alpha}
  double residual = 0.0;      // d/dt kinetic + dissipation
  double linf_u = 0.0;
  double crit_sigma = 0.0;    // ||sigma||_{B^1_{d,1}}
  double crit_u = 0.0;        // ||u||_{B^{2-alpha}_{d,1}}
  double high_sigma = 0.0;    // ||grad sigma||_{B^1_{d,1}}
  double high_u = 0.0;        // ||grad u||_{B^{2-alpha}_{d,1}}
  double mean_sigma = 0.0;
};

inline const char* diagnostics_csv_header() {
  return "t,kinetic,dissipation,residual,linf_u,crit_sigma,crit_u,high_sigma,high_u,mean_sigma";
}

struct EnergyBalance {
  double kinetic = 0.0;
  double dissipation = 0.0;
  /// d/dt kinetic from the right-hand side of the system, plus dissipation.
  double residual_rate = 0.0;
};

/// Dissipation through the alignment force A per unit mass:
///   D = -2 int rho u . A = 2 mu [<rho u, L(rho u)> - <rho |u|^2, L rho>].
inline double dissipation_rate(const ScalarField& rho, const VectorField& u, const AlignmentParams& p) {
  const auto a = alignment_force(rho, u, p);
  double s = 0.0;
  auto r = rho.values();
  for (int c = 0; c < u.dim(); ++c) {
    auto uc = u[c].values();
    auto ac = a[c].values();
    for (std::size_t i = 0; i < r.size(); ++i) s += r[i] * uc[i] * ac[i];
  }
  return -2.0 * s * rho.grid().cell_volume();
}

inline double kinetic_energy(const ScalarField& rho, const VectorField& u) {
  double s = 0.0;
  auto r = rho.values();
  for (int c = 0; c < u.dim(); ++c) {
    auto uc = u[c].values();
    for (std::size_t i = 0; i < r.size(); ++i) s += r[i] * uc[i] * uc[i];
  }
  return s * rho.grid().cell_volume();
}

inline EnergyBalance energy_balance(const SolverState& s) {
  const auto rho = s.density();
  require_positive_density(rho);
  EnergyBalance e;
  e.kinetic = kinetic_energy(rho, s.u);
  e.dissipation = dissipation_rate(rho, s.u, s.params);
  // d/dt int rho|u|^2 = int rho_t |u|^2 + 2 rho u . u_t with the semi-discrete
  // right-hand sides.
  const auto& p = s.params;
  std::vector<ScalarField> flux;
  for (const auto& c : s.u.components()) flux.push_back(product(rho, c));
  auto rho_t = divergence(VectorField(std::move(flux)));
  rho_t *= -1.0;
  auto u_t = assemble_F(s.u, s.sigma, p);
  u_t.axpy(-p.mu, fractional_laplacian(s.u, p.alpha));
  double rate = 0.0;
  auto r = rho.values();
  auto rt = rho_t.values();
  for (int c = 0; c < s.u.dim(); ++c) {
    auto uc = s.u[c].values();
    auto ut = u_t[c].values();
    for (std::size_t i = 0; i < r.size(); ++i) rate += rt[i] * uc[i] * uc[i] + 2.0 * r[i] * uc[i] * ut[i];
  }
  rate *= s.grid().cell_volume();
  e.residual_rate = rate + e.dissipation;
  return e;
}

/// Norm bundle of one state; `residual` is filled later from neighbours.
inline DiagnosticRecord diagnose(const SolverState& s, const DyadicDecomposition& dec) {
  DiagnosticRecord r;
  r.t = s.t;
  const auto rho = s.density();
  r.kinetic = kinetic_energy(rho, s.u);
  r.dissipation = dissipation_rate(rho, s.u, s.params);
  r.linf_u = s.u.max_norm();
  const double su = 2.0 - s.params.alpha;
  r.crit_sigma = besov_d1(dec, s.sigma, 1.0);
  r.crit_u = besov_d1(dec, s.u, su);
  r.high_sigma = besov_d1(dec, gradient(s.sigma), 1.0);
  r.high_u = besov_d1(dec, gradient_components(s.u), su);
  r.mean_sigma = s.sigma.mean();
  return r;
}

/// residual = dK/dt + D over the record times: centred differences inside,
/// and the trapezoid form (K1 - K0)/h + (D0 + D1)/2 at the two ends.
inline void fill_residuals(std::vector<DiagnosticRecord>& recs) {
  const std::size_t n = recs.size();
  if (n < 2) {
    for (auto& r : recs) r.residual = 0.0;
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i)
    recs[i].residual = (recs[i + 1].kinetic - recs[i - 1].kinetic) / (recs[i + 1].t - recs[i - 1].t) +
                       recs[i].dissipation;
  auto ends = [&](std::size_t a, std::size_t b) {
    return (recs[b].kinetic - recs[a].kinetic) / (recs[b].t - recs[a].t) +
           0.5 * (recs[a].dissipation + recs[b].dissipation);
  };
  recs.front().residual = ends(0, 1);
  recs.back().residual = ends(n - 2, n - 1);
}

struct FlockingReport {
  std::vector<double> t;
  std::vector<double> linf_u;
  double decay_fraction = 0.1;
  double final_ratio = 0.0;
  bool decayed = false;
};

/// Verdict: final sup-norm of u at most decay_fraction of the initial one.
/// A run whose initial velocity is already zero counts as decayed.
inline FlockingReport flocking_report(const std::vector<DiagnosticRecord>& recs, double decay_fraction = 0.1) {
  if (recs.size() < 2) throw DomainError("flocking report needs at least two records");
  FlockingReport f;
  f.decay_fraction = decay_fraction;
  for (const auto& r : recs) {
    f.t.push_back(r.t);
    f.linf_u.push_back(r.linf_u);
  }
  const double u0 = f.linf_u.front();
  const double u1 = f.linf_u.back();
  if (u0 == 0.0) {
    f.final_ratio = 0.0;
    f.decayed = true;
  } else {
    f.final_ratio = u1 / u0;
    f.decayed = u1 <= decay_fraction * u0;
  }
  return f;
}

/// sup over states of ||u - mean u||_infty / ||u||_{B^1_{d,1}}.
inline double embedding_constant(const std::vector<VectorField>& states) {
  double c = 0.0;
  for (const auto& u : states) {
    const DyadicDecomposition dec(u.grid());
    const double b = besov_d1(dec, u, 1.0);
    std::vector<ScalarField> fluct;
    for (const auto& comp : u.components()) fluct.push_back(mean_free(comp));
    if (b > 0.0) c = std::max(c, VectorField(std::move(fluct)).max_norm() / b);
  }
  return c;
}

}  // namespace frfl
