#pragma once

#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace frfl {

namespace lp_profile {

inline constexpr double inner_radius = 0.75;
inline constexpr double outer_radius = 4.0 / 3.0;

inline double smooth_half(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

/// Radial cut-off: 1 for r <= 3/4, 0 for r >= 4/3, C-infinity smooth step
/// built from exp(-1/t) in between.
inline double chi(double r) {
  if (r <= inner_radius) return 1.0;
  if (r >= outer_radius) return 0.0;
  const double t = (outer_radius - r) / (outer_radius - inner_radius);
  const double a = smooth_half(t);
  const double b = smooth_half(1.0 - t);
  return a / (a + b);
}

/// phi(r) = chi(r/2) - chi(r), supported in [3/4, 8/3].
inline double phi(double r) { return chi(0.5 * r) - chi(r); }

}  // namespace lp_profile

struct BesovSpec {
  double s = 1.0;
  double p = 1.0;
  double q = 1.0;
};

/// One row of a block-by-block norm breakdown.
struct BesovTerm {
  int j;
  double block_norm;
  double weighted;
};

/// Homogeneous Littlewood-Paley decomposition realised on the frequencies
/// of one grid.
class DyadicDecomposition {
 public:
  explicit DyadicDecomposition(const Grid& grid) : grid_(grid) {
    const double kmin = grid.min_nonzero_wavenumber();
    const double kmax = grid.max_wavenumber();
    // Smallest j with chi(2^-j kmin) = 0, largest j with chi(2^-(j+1) kmax) = 1.
    j_min_ = static_cast<int>(std::floor(std::log2(kmin / lp_profile::outer_radius)));
    while (std::ldexp(kmin, -j_min_) < lp_profile::outer_radius) --j_min_;
    while (std::ldexp(kmin, -(j_min_ + 1)) >= lp_profile::outer_radius) ++j_min_;
    j_max_ = static_cast<int>(std::ceil(std::log2(kmax / lp_profile::inner_radius))) - 1;
    while (std::ldexp(kmax, -(j_max_ + 1)) > lp_profile::inner_radius) ++j_max_;
    while (std::ldexp(kmax, -j_max_) <= lp_profile::inner_radius) --j_max_;

    const std::size_t n = grid.size();
    weights_.assign(block_count(), std::vector<double>(n, 0.0));
    for (int j = j_min_; j <= j_max_; ++j)
      for (std::size_t i = 0; i < n; ++i)
        weights_[index(j)][i] = lp_profile::phi(std::ldexp(grid.wavevector_norm(i), -j));
    check_partition();
  }

  const Grid& grid() const noexcept { return grid_; }
  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }
  std::size_t block_count() const noexcept { return static_cast<std::size_t>(j_max_ - j_min_ + 1); }

  /// phi(2^-j k) at a flat spectral index; zero outside the block range.
  double block_weight(int j, std::size_t flat) const {
    if (j < j_min_ || j > j_max_) return 0.0;
    return weights_[index(j)][flat];
  }

  /// Delta_j f.
  ScalarField block(const ScalarField& f, int j) const {
    require_same_grid(f.grid(), grid_);
    return apply_multiplier(f, [this, j](const Vec2&, double, std::size_t i) {
      return block_weight(j, i);
    });
  }

  /// S_j f: multiplier chi(2^-j k) (keeps the mean).
  ScalarField low_pass(const ScalarField& f, int j) const {
    require_same_grid(f.grid(), grid_);
    return apply_multiplier(f, [j](const Vec2&, double kn, std::size_t) {
      return lp_profile::chi(std::ldexp(kn, -j));
    });
  }

  /// L^p norms of Delta_j applied to the components (pointwise Euclidean
  /// magnitude), one entry per block j_min..j_max.
  std::vector<double> block_norms(std::span<const ScalarField> comps, double p) const {
    std::vector<double> out(block_count(), 0.0);
    for (int j = j_min_; j <= j_max_; ++j) {
      std::vector<ScalarField> blocks;
      blocks.reserve(comps.size());
      for (const auto& c : comps) blocks.push_back(block(c, j));
      out[index(j)] = lp_norm(blocks, p);
    }
    return out;
  }
  std::vector<double> block_norms(const ScalarField& f, double p) const {
    return block_norms(std::span(&f, 1), p);
  }
  std::vector<double> block_norms(const VectorField& v, double p) const {
    return block_norms(v.components(), p);
  }

  /// l^q combination of 2^{js} b_j.
  double combine(const std::vector<double>& blocks, double s, double q) const {
    double acc = 0.0;
    for (int j = j_min_; j <= j_max_; ++j) {
      const double w = std::pow(2.0, s * j) * blocks[index(j)];
      if (std::isinf(q))
        acc = std::max(acc, w);
      else if (q == 1.0)
        acc += w;
      else
        acc += std::pow(w, q);
    }
    if (std::isinf(q) || q == 1.0) return acc;
    return std::pow(acc, 1.0 / q);
  }

  std::vector<BesovTerm> breakdown(const ScalarField& f, double s, double p) const {
    auto b = block_norms(f, p);
    std::vector<BesovTerm> rows;
    for (int j = j_min_; j <= j_max_; ++j)
      rows.push_back({j, b[index(j)], std::pow(2.0, s * j) * b[index(j)]});
    return rows;
  }

  /// Largest deviation of sum_j phi(2^-j k) from 1 over nonzero grid modes.
  double partition_defect(std::size_t* worst = nullptr) const {
    double defect = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (grid_.wavevector_norm(i) == 0.0) continue;
      double s = 0.0;
      for (const auto& w : weights_) s += w[i];
      if (std::abs(s - 1.0) > defect) {
        defect = std::abs(s - 1.0);
        if (worst) *worst = i;
      }
    }
    return defect;
  }

 private:
  std::size_t index(int j) const { return static_cast<std::size_t>(j - j_min_); }

  void check_partition() const {
    std::size_t worst = 0;
    const double defect = partition_defect(&worst);
    if (defect > 1e-12) {
      std::ostringstream msg;
      msg << "dyadic partition of unity fails by " << defect << " at |k| = "
          << grid_.wavevector_norm(worst);
      throw DomainError(msg.str());
    }
  }

  Grid grid_;
  int j_min_ = 0;
  int j_max_ = 0;
  std::vector<std::vector<double>> weights_;
};

inline DyadicDecomposition build_cutoffs(const Grid& grid) { return DyadicDecomposition(grid); }

inline ScalarField dyadic_block(const DyadicDecomposition& dec, const ScalarField& f, int j) { return dec.block(f, j); }
inline ScalarField low_freq_cutoff(const DyadicDecomposition& dec, const ScalarField& f, int j) {
  return dec.low_pass(f, j);
}

namespace detail {
inline void warn_nonzero_mean(double mean) {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true))
    std::clog << "[frfl] warning: homogeneous Besov norm of a field with mean " << mean
              << "; the mean is excluded (further warnings suppressed)\n";
}
}  // namespace detail

/// Homogeneous Besov norm sum/l^q over j of 2^{js} ||Delta_j f||_p. The mean
/// of f carries no block and is reported separately by the caller.
inline double besov_norm(const DyadicDecomposition& dec, const ScalarField& f, const BesovSpec& spec) {
  if (spec.p < 1.0 || spec.q < 1.0) throw ConfigError("Besov exponents p, q must be >= 1");
  const double m = f.mean();
  if (std::abs(m) > 1e-12 * std::max(1.0, f.max_abs())) detail::warn_nonzero_mean(m);
  return dec.combine(dec.block_norms(f, spec.p), spec.s, spec.q);
}

inline double besov_norm(const DyadicDecomposition& dec, const VectorField& v, const BesovSpec& spec) {
  if (spec.p < 1.0 || spec.q < 1.0) throw ConfigError("Besov exponents p, q must be >= 1");
  return dec.combine(dec.block_norms(v, spec.p), spec.s, spec.q);
}

/// Critical-space shorthand: ||f||_{B^s_{d,1}}.
inline double besov_d1(const DyadicDecomposition& dec, std::span<const ScalarField> comps, double s) {
  return dec.combine(dec.block_norms(comps, dec.grid().dim()), s, 1.0);
}
inline double besov_d1(const DyadicDecomposition& dec, const ScalarField& f, double s) {
  return besov_d1(dec, std::span(&f, 1), s);
}
inline double besov_d1(const DyadicDecomposition& dec, const VectorField& v, double s) {
  return besov_d1(dec, v.components(), s);
}

/// Finite-difference Besov norm for s in (0,1):
///   ( sum_y h^d (||delta_y f||_p / |y|^s)^q / |y|^d )^{1/q}
/// over nonzero grid offsets y in [-L/2, L/2)^d. At q = 1 this is
/// sum_y h^d ||delta_y f||_p / |y|^{d+s}.
inline double besov_norm_fd(const ScalarField& f, const BesovSpec& spec) {
  if (!(spec.s > 0.0 && spec.s < 1.0))
    throw ConfigError("finite-difference Besov norm needs s in (0, 1)");
  const Grid& g = f.grid();
  const int n = g.n();
  const int d = g.dim();
  const double h = g.spacing();
  auto v = f.values();
  std::vector<double> diff(g.size());
  double acc = 0.0;
  const int rows = d == 2 ? n : 1;
  for (int a = 0; a < rows; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == 0 && b == 0) continue;
      const int ma = d == 2 ? g.signed_mode(a) : 0;
      const int mb = g.signed_mode(b);
      const double r = h * std::hypot(static_cast<double>(ma), static_cast<double>(mb));
      // delta_y f at every node, y = (ma, mb) grid steps.
      for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t shifted;
        if (d == 1) {
          shifted = static_cast<std::size_t>((static_cast<int>(i) + mb + n) % n);
        } else {
          const int ia = static_cast<int>(i) / n;
          const int ib = static_cast<int>(i) % n;
          shifted = static_cast<std::size_t>(((ia + ma + n) % n) * n + (ib + mb + n) % n);
        }
        diff[i] = v[shifted] - v[i];
      }
      const double dn = lp_norm(ScalarField::from_values(g, diff), spec.p);
      const double term = dn / std::pow(r, spec.s);
      const double w = g.cell_volume() / std::pow(r, d);
      if (std::isinf(spec.q))
        acc = std::max(acc, term);
      else
        acc += w * std::pow(term, spec.q);
    }
  }
  if (std::isinf(spec.q)) return acc;
  return std::pow(acc, 1.0 / spec.q);
}

/// Keeps blocks |j| <= level plus the mean.
inline ScalarField truncate_blocks(const DyadicDecomposition& dec, const ScalarField& f, int level) {
  return apply_multiplier(f, [&](const Vec2&, double kn, std::size_t i) {
    if (kn == 0.0) return 1.0;
    double w = 0.0;
    for (int j = std::max(-level, dec.j_min()); j <= std::min(level, dec.j_max()); ++j)
      w += dec.block_weight(j, i);
    return w;
  });
}

}  // namespace frfl
