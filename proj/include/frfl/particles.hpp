#pragma once

// Cucker-Smale particles on the torus [0, L)^d:
//   x_i' = v_i,  v_i' = (1/N) sum_j (v_j - v_i) psi(|x_i - x_j|),  psi(s) = s^{-(d+alpha)}
// with psi capped below delta_reg.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "field.hpp"
#include "parallel.hpp"
#include "random_fields.hpp"

namespace frfl {

inline double singular_weight(double s, int d, double alpha, double delta_reg) {
  if (!(delta_reg > 0.0)) throw ConfigError("delta_reg must be positive");
  return std::pow(std::max(s, delta_reg), -(d + alpha));
}

struct ParticleEnsemble {
  int dim = 1;
  double length = 1.0;
  /// Row-major n x dim.
  std::vector<double> x;
  std::vector<double> v;

  ParticleEnsemble(int d, double l, std::vector<double> pos, std::vector<double> vel)
      : dim(d), length(l), x(std::move(pos)), v(std::move(vel)) {
    if (d != 1 && d != 2) throw ConfigError("particles live in one or two dimensions");
    if (!(l > 0.0)) throw ConfigError("box length must be positive");
    if (x.size() != v.size() || x.size() % static_cast<std::size_t>(d) != 0)
      throw ConfigError("position and velocity arrays do not match");
    if (size() < 2) throw ConfigError("an ensemble needs at least two particles");
    wrap();
  }

  std::size_t size() const noexcept { return x.size() / static_cast<std::size_t>(dim); }

  void wrap() {
    for (double& c : x) {
      c = std::fmod(c, length);
      if (c < 0.0) c += length;
      if (c >= length) c = 0.0;
    }
  }
};

struct CsParams {
  double alpha = 1.5;
  /// Cap radius of the weight. The CLI defaults it to half the spacing of
  /// the comparison grid.
  double delta_reg = 0.01;
};

/// Uniform positions and velocities in [-amp, amp]^d.
inline ParticleEnsemble random_ensemble(int d, double length, std::size_t n, double amp, std::uint64_t seed) {
  Rng rng(seed, 0);
  std::vector<double> x(n * static_cast<std::size_t>(d)), v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform(0.0, length);
    v[i] = rng.uniform(-amp, amp);
  }
  return ParticleEnsemble(d, length, std::move(x), std::move(v));
}

namespace particle_detail {

/// Periodic minimal-image distance; symmetric in its arguments.
inline double distance(const double* a, const double* b, int d, double length) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    double r = std::fmod(std::abs(a[k] - b[k]), length);
    r = std::min(r, length - r);
    s += r * r;
  }
  return std::sqrt(s);
}

/// dv_i/dt for positions x and velocities v; each row's sum runs in index
/// order so results do not depend on the worker count.
inline void acceleration(const std::vector<double>& x, const std::vector<double>& v, int d, double length,
                         const CsParams& p, std::vector<double>& out) {
  const std::size_t n = x.size() / static_cast<std::size_t>(d);
  out.assign(x.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  parallel_for(n, [&](std::size_t i) {
    double acc[2] = {0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = singular_weight(distance(&x[i * d], &x[j * d], d, length), d, p.alpha, p.delta_reg);
      for (int k = 0; k < d; ++k) acc[k] += w * (v[j * d + k] - v[i * d + k]);
    }
    for (int k = 0; k < d; ++k) out[i * d + k] = inv_n * acc[k];
  });
}

}  // namespace particle_detail

/// One classical RK4 step; positions wrapped afterwards.
inline ParticleEnsemble cs_step(const ParticleEnsemble& e, double dt, const CsParams& p) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  const int d = e.dim;
  const std::size_t m = e.x.size();
  std::vector<double> k1x = e.v, k1v, k2x(m), k2v, k3x(m), k3v, k4x(m), k4v;
  std::vector<double> xs(m), vs(m);
  auto acc = [&](const std::vector<double>& x, const std::vector<double>& v, std::vector<double>& out) {
    particle_detail::acceleration(x, v, d, e.length, p, out);
  };
  acc(e.x, e.v, k1v);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = e.x[i] + 0.5 * dt * k1x[i];
    vs[i] = e.v[i] + 0.5 * dt * k1v[i];
  }
  k2x = vs;
  acc(xs, vs, k2v);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = e.x[i] + 0.5 * dt * k2x[i];
    vs[i] = e.v[i] + 0.5 * dt * k2v[i];
  }
  k3x = vs;
  acc(xs, vs, k3v);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = e.x[i] + dt * k3x[i];
    vs[i] = e.v[i] + dt * k3v[i];
  }
  k4x = vs;
  acc(xs, vs, k4v);
  std::vector<double> x(m), v(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = e.x[i] + dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
    v[i] = e.v[i] + dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
  }
  return ParticleEnsemble(d, e.length, std::move(x), std::move(v));
}

inline std::vector<double> momentum(const ParticleEnsemble& e) {
  std::vector<double> m(static_cast<std::size_t>(e.dim), 0.0);
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e.dim; ++k) m[k] += e.v[i * e.dim + k];
  return m;
}

/// max_{i,j} |v_i - v_j|.
inline double velocity_diameter(const ParticleEnsemble& e) {
  const int d = e.dim;
  double m = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        const double w = e.v[i * d + k] - e.v[j * d + k];
        s += w * w;
      }
      m = std::max(m, s);
    }
  return std::sqrt(m);
}

/// (1/2N) sum |v_i - mean v|^2.
inline double fluctuation_energy(const ParticleEnsemble& e) {
  const auto p = momentum(e);
  const double n = static_cast<double>(e.size());
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e.dim; ++k) {
      const double w = e.v[i * e.dim + k] - p[k] / n;
      s += w * w;
    }
  return 0.5 * s / n;
}

struct DepositedFields {
  ScalarField rho;
  VectorField u;
};

/// Gaussian deposition of mass and momentum. Each particle's kernel is
/// normalised on the grid itself, so the deposited mass is exactly
/// n * particle_mass up to rounding. Where rho <= rho_floor, u = 0.
inline DepositedFields deposit_fields(const ParticleEnsemble& e, const Grid& g, double kernel_width,
                                      double particle_mass = 1.0, double rho_floor = 1e-12) {
  if (g.dim() != e.dim) throw GridMismatch();
  if (std::abs(g.length() - e.length) > 1e-12 * e.length) throw GridMismatch();
  if (kernel_width < g.spacing() * (1.0 - 1e-12))
    throw ConfigError("kernel width must be at least the grid spacing");
  const int d = e.dim;
  const std::size_t n = g.size();
  std::vector<double> rho(n, 0.0);
  std::vector<std::vector<double>> mom(static_cast<std::size_t>(d), std::vector<double>(n, 0.0));
  std::vector<double> w(n);
  const double inv2h2 = 0.5 / (kernel_width * kernel_width);
  for (std::size_t i = 0; i < e.size(); ++i) {
    double total = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      const auto pos = g.position(q);
      const double r = particle_detail::distance(pos.data(), &e.x[i * d], d, e.length);
      w[q] = std::exp(-r * r * inv2h2);
      total += w[q];
    }
    const double scale = particle_mass / (total * g.cell_volume());
    for (std::size_t q = 0; q < n; ++q) {
      const double m = scale * w[q];
      rho[q] += m;
      for (int k = 0; k < d; ++k) mom[k][q] += m * e.v[i * d + k];
    }
  }
  std::vector<ScalarField> comps;
  for (int k = 0; k < d; ++k) {
    std::vector<double> u(n, 0.0);
    for (std::size_t q = 0; q < n; ++q)
      if (rho[q] > rho_floor) u[q] = mom[k][q] / rho[q];
    comps.push_back(ScalarField::from_values(g, std::move(u)));
  }
  return {ScalarField::from_values(g, std::move(rho)), VectorField(std::move(comps))};
}

}  // namespace frfl
