#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "quadrature.hpp"
#include "spectral.hpp"

namespace frfl {

/// Normalising constant of the singular-integral form of (-Delta)^{alpha/2}:
/// value = 2^alpha Gamma(d/2 + alpha/2) / (pi^{d/2} Gamma(-alpha/2)), which is
/// negative on (0, 2); magnitude is what enters the kernel.
struct CAlpha {
  double value;
  double magnitude;
};

inline CAlpha c_alpha(int d, double alpha) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw ConfigError("c_{d,alpha} has a Gamma pole unless alpha lies in (0, 2), got " +
                      std::to_string(alpha));
  const double v = std::pow(2.0, alpha) * std::tgamma(0.5 * d + 0.5 * alpha) /
                   (std::pow(std::numbers::pi, 0.5 * d) * std::tgamma(-0.5 * alpha));
  return {v, std::abs(v)};
}

struct AlignmentParams {
  double alpha = 1.5;
  int d = 1;
  double c_signed = 0.0;
  double c_mag = 0.0;
  /// Dissipation coefficient 1 / |c_{d,alpha}|.
  double mu = 0.0;
  /// Oracle: inner cut-off below which a Taylor expansion replaces quadrature.
  double pv_cutoff = 1e-2;
  /// Oracle: radius past which the periodised integrand is replaced by its
  /// mean; 0 selects 16 L in 1D and 4 L in 2D.
  double tail_radius = 0.0;

  static AlignmentParams make(int d, double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0))
      throw ConfigError("alpha must lie in the range (1,2), got " + std::to_string(alpha));
    if (d != 1 && d != 2) throw ConfigError("unsupported dimension " + std::to_string(d));
    AlignmentParams p;
    p.alpha = alpha;
    p.d = d;
    auto c = c_alpha(d, alpha);
    p.c_signed = c.value;
    p.c_mag = c.magnitude;
    p.mu = 1.0 / c.magnitude;
    return p;
  }
};

/// I_alpha for one component through the fractional Leibniz identity
///   I_alpha(f, sigma) = mu [f L sigma + sigma L f - L(f sigma)],  L = (-Delta)^{alpha/2}.
/// Both slots annihilate constants, so the means are dropped first; this keeps
/// the result symmetric in (f, sigma) and exactly zero for constant data.
inline ScalarField i_alpha(const ScalarField& f, const ScalarField& sigma, const AlignmentParams& p) {
  require_same_grid(f.grid(), sigma.grid());
  const auto a = mean_free(f);
  const auto b = mean_free(sigma);
  auto out = product(a, fractional_laplacian(b, p.alpha));
  out += product(b, fractional_laplacian(a, p.alpha));
  out -= fractional_laplacian(product(a, b), p.alpha);
  out *= p.mu;
  return out;
}

inline VectorField i_alpha(const VectorField& u, const ScalarField& sigma, const AlignmentParams& p) {
  require_same_grid(u.grid(), sigma.grid());
  std::vector<ScalarField> out;
  for (const auto& c : u.components()) out.push_back(i_alpha(c, sigma, p));
  return VectorField(std::move(out));
}

inline void require_positive_density(const ScalarField& rho) {
  auto v = rho.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0))
      throw DensityError("density " + std::to_string(v[i]) + " at grid point " + std::to_string(i) +
                         " is not positive");
}

/// Alignment force per unit mass,
///   (1/rho(x)) int (u(y) - u(x)) rho(x) rho(y) / |x-y|^{d+alpha} dy
///   = mu [u L rho - L(rho u)].
inline VectorField alignment_force(const ScalarField& rho, const VectorField& u, const AlignmentParams& p) {
  require_same_grid(rho.grid(), u.grid());
  require_positive_density(rho);
  const auto lap_rho = fractional_laplacian(rho, p.alpha);
  std::vector<ScalarField> out;
  for (const auto& c : u.components()) {
    auto r = product(c, lap_rho);
    r -= fractional_laplacian(product(rho, c), p.alpha);
    r *= p.mu;
    out.push_back(std::move(r));
  }
  return VectorField(std::move(out));
}

/// The operator T sigma = int y |y|^{-d-alpha} (sigma(x+y) - sigma(x)) dy as
/// the Fourier multiplier |k|^{alpha-1} R(k/|k|), with
///   R(w) = int z |z|^{-d-alpha} (e^{i<z,w>} - 1) dz.
/// R is cached per grid ray direction.
class TOperator {
 public:
  TOperator(const Grid& grid, double alpha) : grid_(grid), alpha_(alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw ConfigError("alpha must lie in the range (1,2)");
    // Radial integral: int_0^inf r^{-alpha} sin(r a) dr = sign(a)|a|^{alpha-1} kappa.
    kappa_ = std::tgamma(1.0 - alpha) * std::cos(0.5 * std::numbers::pi * alpha);
    multipliers_.assign(grid.size(), {cplx{}, cplx{}});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double kn = grid.wavevector_norm(i);
      if (kn == 0.0 || grid.is_nyquist(i)) continue;
      auto m = grid.mode(i);
      const auto r = ray_value(m);
      const double amp = std::pow(kn, alpha - 1.0);
      multipliers_[i] = {amp * r[0], amp * r[1]};
    }
  }

  double alpha() const noexcept { return alpha_; }

  /// R on the unit direction w (vector, purely imaginary).
  std::array<cplx, 2> ray(const Vec2& w) const {
    const double norm = std::hypot(w[0], w[1]);
    return ray_integral({w[0] / norm, w[1] / norm});
  }

  VectorField apply(const ScalarField& sigma) const {
    require_same_grid(sigma.grid(), grid_);
    std::vector<ScalarField> comps;
    for (int a = 0; a < grid_.dim(); ++a) {
      comps.push_back(apply_multiplier(sigma, [this, a](const Vec2&, double, std::size_t i) {
        return multipliers_[i][static_cast<std::size_t>(a)];
      }));
    }
    return VectorField(std::move(comps));
  }

  std::size_t cached_rays() const noexcept { return cache_.size(); }

 private:
  std::array<cplx, 2> ray_value(std::array<int, 2> m) {
    const int g = std::gcd(std::abs(m[0]), std::abs(m[1]));
    std::pair<int, int> key{m[0] / g, m[1] / g};
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double norm = std::hypot(static_cast<double>(key.first), static_cast<double>(key.second));
    auto r = ray_integral({key.first / norm, key.second / norm});
    cache_.emplace(key, r);
    return r;
  }

  // In 1D the unit sphere is {+1, -1}; in 2D the angular integral
  //   kappa int_0^{2pi} e_theta sign(c)|c|^{alpha-1} dtheta, c = e_theta . w,
  // is evaluated by tanh-sinh quadrature on the two arcs where c keeps a sign.
  std::array<cplx, 2> ray_integral(const Vec2& w) const {
    if (grid_.dim() == 1) {
      const double s = w[0] > 0.0 ? 1.0 : -1.0;
      return {cplx{0.0, 2.0 * kappa_ * s}, cplx{}};
    }
    const double theta_w = std::atan2(w[1], w[0]);
    std::array<double, 2> acc{0.0, 0.0};
    for (int arc = 0; arc < 2; ++arc) {
      const double a = theta_w - 0.5 * std::numbers::pi + arc * std::numbers::pi;
      const double b = a + std::numbers::pi;
      for (int comp = 0; comp < 2; ++comp) {
        acc[static_cast<std::size_t>(comp)] += quad::tanh_sinh(
            [&](double theta) {
              const double c = std::cos(theta) * w[0] + std::sin(theta) * w[1];
              const double e = comp == 0 ? std::cos(theta) : std::sin(theta);
              return e * (c >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(c), alpha_ - 1.0);
            },
            a, b);
      }
    }
    return {cplx{0.0, kappa_ * acc[0]}, cplx{0.0, kappa_ * acc[1]}};
  }

  Grid grid_;
  double alpha_;
  double kappa_ = 0.0;
  std::vector<std::array<cplx, 2>> multipliers_;
  std::map<std::pair<int, int>, std::array<cplx, 2>> cache_;
};

inline VectorField t_operator(const ScalarField& sigma, const AlignmentParams& p) {
  return TOperator(sigma.grid(), p.alpha).apply(sigma);
}

}  // namespace frfl
