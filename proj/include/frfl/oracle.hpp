#pragma once

// Brute-force real-space quadrature for the nonlocal integrals. Nothing here
// goes through the fractional-Laplacian multiplier; fields are only
// evaluated off-grid by exact trigonometric interpolation.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nonlocal.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace frfl {

struct OracleOptions {
  double pv_cutoff = 1e-2;
  /// 0 selects 16 L in 1D and 4 L in 2D.
  double tail_radius = 0.0;
  int gl_points = 12;
  /// Cost guard: grids beyond 128^d points are refused unless set.
  bool allow_large = false;

  static OracleOptions from(const AlignmentParams& p) {
    OracleOptions o;
    o.pv_cutoff = p.pv_cutoff;
    o.tail_radius = p.tail_radius;
    return o;
  }
};

namespace oracle_detail {

/// Samples of f(x + y) at the grid nodes.
inline std::vector<double> shifted(const ScalarField& f, const Vec2& y) {
  const Grid& g = f.grid();
  auto c = f.spectral();
  std::vector<cplx> phase(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto k = g.wavevector(i);
    const double arg = k[0] * y[0] + k[1] * y[1];
    phase[i] = g.is_nyquist(i) ? c[i] * std::cos(arg) : c[i] * cplx{std::cos(arg), std::sin(arg)};
  }
  std::vector<double> out(c.size());
  detail::inverse(g, phase, out);
  return out;
}

/// Largest |k| carrying a non-negligible coefficient in any field.
inline double content_wavenumber(std::span<const ScalarField* const> fields) {
  double kmax = 0.0;
  for (const auto* f : fields) {
    auto c = f->spectral();
    double peak = 0.0;
    for (const auto& z : c) peak = std::max(peak, std::abs(z));
    for (std::size_t i = 0; i < c.size(); ++i)
      if (std::abs(c[i]) > 1e-14 * peak) kmax = std::max(kmax, f->grid().wavevector_norm(i));
  }
  return kmax;
}

struct RadialNode {
  double r;
  double w;
};

/// Gauss-Legendre nodes for [r0, R]: doubling panels up to 2h, then panels
/// of width 2h.
inline std::vector<RadialNode> radial_nodes(double r0, double radius, double h, int gl) {
  auto rule = quad::gauss_legendre(gl);
  std::vector<RadialNode> nodes;
  auto panel = [&](double a, double b) {
    for (auto [x, w] : rule) nodes.push_back({0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w});
  };
  const double r_switch = std::max(2.0 * h, r0);
  double a = r0;
  while (a < r_switch) {
    const double b = std::min(2.0 * a, r_switch);
    panel(a, b);
    a = b;
  }
  const double width = 2.0 * h;
  while (a < radius) {
    const double b = std::min(a + width, radius);
    panel(a, b);
    a = b;
  }
  return nodes;
}

inline double default_tail_radius(const Grid& g) { return g.dim() == 1 ? 16.0 * g.length() : 4.0 * g.length(); }

/// Visits every quadrature node y with |y| in [cutoff, R]; `visit` receives
/// (y, weight, shifted samples) where weight already includes the kernel
/// |y|^{-d-alpha} and the polar Jacobian. Work is split over radial nodes and
/// reduced in a fixed order.
template <class Visit>
void sweep(const Grid& g, double alpha, const OracleOptions& opt, std::span<const ScalarField* const> fields,
           std::size_t out_size, std::vector<double>& out, Visit&& visit) {
  if (!opt.allow_large && g.size() > (g.dim() == 1 ? 128u : 128u * 128u))
    throw DomainError("oracle refused: grid exceeds 128^d points (set allow_large to override)");
  const double radius = opt.tail_radius > 0.0 ? opt.tail_radius : default_tail_radius(g);
  const auto nodes = radial_nodes(opt.pv_cutoff, radius, g.spacing(), opt.gl_points);
  const double kcontent = content_wavenumber(fields);
  std::vector<std::vector<double>> partial(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t n) {
    const auto [r, wr] = nodes[n];
    std::vector<double> acc(out_size, 0.0);
    std::vector<std::vector<double>> sh(fields.size());
    auto at = [&](const Vec2& y, double w) {
      for (std::size_t f = 0; f < fields.size(); ++f) sh[f] = shifted(*fields[f], y);
      visit(y, w, sh, acc);
    };
    const double radial = wr * std::pow(r, -1.0 - alpha);
    if (g.dim() == 1) {
      at({r, 0.0}, radial);
      at({-r, 0.0}, radial);
    } else {
      int m = static_cast<int>(std::ceil(2.0 * r * kcontent)) + 16;
      m += m % 2;
      const double dtheta = 2.0 * std::numbers::pi / m;
      for (int t = 0; t < m; ++t) {
        const double th = t * dtheta;
        at({r * std::cos(th), r * std::sin(th)}, radial * dtheta);
      }
    }
    partial[n] = std::move(acc);
  });
  out.assign(out_size, 0.0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < out_size; ++i) out[i] += p[i];
}

/// int_{|y|<delta} (a.y)(b.y)|y|^{-d-alpha} dy = (a.b) * this.
inline double near_factor(int d, double alpha, double delta) {
  const double sphere_over_d = d == 1 ? 2.0 : std::numbers::pi;
  return sphere_over_d * std::pow(delta, 2.0 - alpha) / (2.0 - alpha);
}

/// int_{|y|>R} |y|^{-d-alpha} dy.
inline double far_factor(int d, double alpha, double radius) {
  const double sphere = d == 1 ? 2.0 : 2.0 * std::numbers::pi;
  return sphere * std::pow(radius, -alpha) / alpha;
}

inline double resolved_radius(const Grid& g, const OracleOptions& opt) {
  return opt.tail_radius > 0.0 ? opt.tail_radius : default_tail_radius(g);
}

}  // namespace oracle_detail

/// Direct quadrature of
///   I_alpha(u, sigma)(x) = pv int (u(x+y) - u(x)) (sigma(x+y) - sigma(x)) / |y|^{d+alpha} dy
/// over the periodised offsets.
inline VectorField i_alpha_oracle(const VectorField& u, const ScalarField& sigma, const AlignmentParams& p,
                                  OracleOptions opt) {
  require_same_grid(u.grid(), sigma.grid());
  const Grid& g = u.grid();
  const int d = g.dim();
  const std::size_t n = g.size();
  std::vector<const ScalarField*> fields;
  for (const auto& c : u.components()) fields.push_back(&c);
  fields.push_back(&sigma);
  std::vector<std::vector<double>> base;
  for (const auto* f : fields) base.push_back(oracle_detail::shifted(*f, {0.0, 0.0}));

  std::vector<double> acc;
  oracle_detail::sweep(g, p.alpha, opt, fields, n * d, acc,
                       [&](const Vec2&, double w, const std::vector<std::vector<double>>& sh, std::vector<double>& out) {
                         const auto& s_sh = sh[static_cast<std::size_t>(d)];
                         const auto& s0 = base[static_cast<std::size_t>(d)];
                         for (int c = 0; c < d; ++c) {
                           const auto& u_sh = sh[static_cast<std::size_t>(c)];
                           const auto& u0 = base[static_cast<std::size_t>(c)];
                           for (std::size_t i = 0; i < n; ++i)
                             out[c * n + i] += w * (u_sh[i] - u0[i]) * (s_sh[i] - s0[i]);
                         }
                       });

  const double near = oracle_detail::near_factor(d, p.alpha, opt.pv_cutoff);
  const double far = oracle_detail::far_factor(d, p.alpha, oracle_detail::resolved_radius(g, opt));
  const auto grad_s = gradient(sigma);
  const auto& sb = base[static_cast<std::size_t>(d)];
  std::vector<ScalarField> comps;
  for (int c = 0; c < d; ++c) {
    const auto grad_u = gradient(u[c]);
    const auto& ub = base[static_cast<std::size_t>(c)];
    std::vector<double> v(n);
    parallel_for(n, [&](std::size_t i) {
      double dot = 0.0;
      for (int a = 0; a < d; ++a) dot += grad_u[a][i] * grad_s[a][i];
      // Mean over one period of (u(x+y) - u(x))(sigma(x+y) - sigma(x)).
      double tail_mean = 0.0;
      for (std::size_t j = 0; j < n; ++j) tail_mean += (ub[j] - ub[i]) * (sb[j] - sb[i]);
      tail_mean /= static_cast<double>(n);
      v[i] = acc[c * n + i] + near * dot + far * tail_mean;
    });
    comps.push_back(ScalarField::from_values(g, std::move(v)));
  }
  return VectorField(std::move(comps));
}

inline VectorField i_alpha_oracle(const VectorField& u, const ScalarField& sigma, const AlignmentParams& p) {
  return i_alpha_oracle(u, sigma, p, OracleOptions::from(p));
}

/// Direct quadrature of T sigma(x) = int y |y|^{-d-alpha} (sigma(x+y) - sigma(x)) dy.
inline VectorField t_operator_oracle(const ScalarField& sigma, const AlignmentParams& p, OracleOptions opt) {
  const Grid& g = sigma.grid();
  const int d = g.dim();
  const std::size_t n = g.size();
  std::vector<const ScalarField*> fields{&sigma};
  const auto s0 = oracle_detail::shifted(sigma, {0.0, 0.0});
  std::vector<double> acc;
  oracle_detail::sweep(g, p.alpha, opt, fields, n * d, acc,
                       [&](const Vec2& y, double w, const std::vector<std::vector<double>>& sh, std::vector<double>& out) {
                         for (int c = 0; c < d; ++c)
                           for (std::size_t i = 0; i < n; ++i)
                             out[c * n + i] += w * y[static_cast<std::size_t>(c)] * (sh[0][i] - s0[i]);
                       });
  const double near = oracle_detail::near_factor(d, p.alpha, opt.pv_cutoff);
  const auto grad_s = gradient(sigma);
  std::vector<ScalarField> comps;
  for (int c = 0; c < d; ++c) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = acc[c * n + i] + near * grad_s[c][i];
    comps.push_back(ScalarField::from_values(g, std::move(v)));
  }
  return VectorField(std::move(comps));
}

/// Double-integral dissipation
///   int int |u(x) - u(x+y)|^2 rho(x) rho(x+y) / |y|^{d+alpha} dy dx.
inline double dissipation_oracle(const ScalarField& rho, const VectorField& u, const AlignmentParams& p,
                                 OracleOptions opt) {
  require_same_grid(rho.grid(), u.grid());
  const Grid& g = u.grid();
  const int d = g.dim();
  const std::size_t n = g.size();
  std::vector<const ScalarField*> fields;
  for (const auto& c : u.components()) fields.push_back(&c);
  fields.push_back(&rho);
  std::vector<std::vector<double>> base;
  for (const auto* f : fields) base.push_back(oracle_detail::shifted(*f, {0.0, 0.0}));
  std::vector<double> acc;
  oracle_detail::sweep(g, p.alpha, opt, fields, n, acc,
                       [&](const Vec2&, double w, const std::vector<std::vector<double>>& sh, std::vector<double>& out) {
                         const auto& r_sh = sh[static_cast<std::size_t>(d)];
                         const auto& r0 = base[static_cast<std::size_t>(d)];
                         for (std::size_t i = 0; i < n; ++i) {
                           double du2 = 0.0;
                           for (int c = 0; c < d; ++c) {
                             const double du = sh[static_cast<std::size_t>(c)][i] - base[static_cast<std::size_t>(c)][i];
                             du2 += du * du;
                           }
                           out[i] += w * du2 * r0[i] * r_sh[i];
                         }
                       });
  const double near = oracle_detail::near_factor(d, p.alpha, opt.pv_cutoff);
  const double far = oracle_detail::far_factor(d, p.alpha, oracle_detail::resolved_radius(g, opt));
  double mean_rho = rho.mean();
  double mean_u2rho = 0.0;
  std::vector<double> mean_urho(static_cast<std::size_t>(d), 0.0);
  const auto& r0 = base[static_cast<std::size_t>(d)];
  for (std::size_t i = 0; i < n; ++i) {
    double u2 = 0.0;
    for (int c = 0; c < d; ++c) {
      const double uc = base[static_cast<std::size_t>(c)][i];
      u2 += uc * uc;
      mean_urho[static_cast<std::size_t>(c)] += uc * r0[i];
    }
    mean_u2rho += u2 * r0[i];
  }
  mean_u2rho /= static_cast<double>(n);
  for (auto& m : mean_urho) m /= static_cast<double>(n);
  std::vector<VectorField> grads;
  for (const auto& c : u.components()) grads.push_back(gradient(c));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double grad2 = 0.0;
    double u2 = 0.0;
    double u_dot = 0.0;
    for (int c = 0; c < d; ++c) {
      for (int a = 0; a < d; ++a) grad2 += grads[static_cast<std::size_t>(c)][a][i] * grads[static_cast<std::size_t>(c)][a][i];
      const double uc = base[static_cast<std::size_t>(c)][i];
      u2 += uc * uc;
      u_dot += uc * mean_urho[static_cast<std::size_t>(c)];
    }
    const double tail_mean = mean_u2rho - 2.0 * u_dot + u2 * mean_rho;
    total += acc[i] + near * grad2 * r0[i] * r0[i] + far * r0[i] * tail_mean;
  }
  return total * g.cell_volume();
}

}  // namespace frfl
