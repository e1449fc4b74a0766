#pragma once

// Randomised sampling of the functional inequalities used in the analysis:
//   product    ||uv||_{B^1_{d,1}} <= C ||u||_{B^1_{d,1}} ||v||_{B^1_{d,1}}
//   product_a  ||uv||_{B^{2-a}_{d,1}} <= C ||u||_{B^{1-t}_{d,1}} ||v||_{B^{2+t-a}_{d,1}},  t in [0, a-1]
//   commutator sum_j 2^{js} ||[w.grad, D_j] u||_d <= C ||grad w||_{B^1_{d,1}} ||u||_{B^s_{d,1}}
//   ialpha     ||I_a(u, s)||_{B^{2-a}_{d,1}} <= K ||grad u||_{B^{1-t}_{d,1}} ||s||_{B^{1+t}_{d,1}}
// Each constant is estimated as a sample maximum on every grid of a ladder;
// samples are the same trigonometric polynomials on every grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "littlewood_paley.hpp"
#include "nonlocal.hpp"
#include "parallel.hpp"
#include "random_fields.hpp"
#include "transport.hpp"

namespace frfl {

struct InequalityReport {
  std::string id;
  int samples = 0;
  std::vector<int> grid_sizes;
  std::vector<double> constants;  // sample maximum per grid
  double constant = 0.0;          // maximum over the ladder
  /// C(N_{k+1}) / C(N_k) - 1 for consecutive grids.
  std::vector<double> growth;
  bool growth_flag = false;  // some growth above growth_limit
  int worst_sample = -1;
  int worst_grid = 0;
};

struct HarnessConfig {
  std::uint64_t seed = 1;
  int samples = 100;
  int dim = 1;
  double length = 2.0 * 3.14159265358979323846;
  std::vector<int> grid_sizes{64, 128, 256};
  double alpha = 1.5;
  double growth_limit = 0.25;
  /// Largest mode of a sample; defaults to N_min / 6 so that every product
  /// is resolved exactly on every grid.
  int max_mode = 0;
  std::vector<double> commutator_s{0.5, 1.0};
};

/// Ratio of the two sides; 0 when both vanish, infinity when only the
/// right side does.
inline double inequality_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

/// [w . grad, D_j] u summed in the homogeneous B^s_{d,1} sequence norm.
inline double commutator_norm(const DyadicDecomposition& dec, const VectorField& w, const ScalarField& u, double s) {
  const int d = w.dim();
  const double p = d;
  const auto gu = gradient(u);
  ScalarField w_grad_u(u.grid());
  for (int a = 0; a < d; ++a) w_grad_u += product(w[a], gu[a]);
  double acc = 0.0;
  for (int j = dec.j_min(); j <= dec.j_max(); ++j) {
    const auto gb = gradient(dec.block(u, j));
    ScalarField r(u.grid());
    for (int a = 0; a < d; ++a) r += product(w[a], gb[a]);
    r -= dec.block(w_grad_u, j);
    acc += std::pow(2.0, j * s) * lp_norm(r, p);
  }
  return acc;
}

namespace harness_detail {

struct Sample {
  ScalarField u, v;
  VectorField w;
};

inline Sample draw(const Grid& g, std::uint64_t seed, int index, int max_mode) {
  Rng rng(seed, static_cast<std::uint64_t>(index));
  const int k1 = 1 + static_cast<int>(rng.uniform() * max_mode) % max_mode;
  const int k2 = 1 + static_cast<int>(rng.uniform() * max_mode) % max_mode;
  const int k3 = 1 + static_cast<int>(rng.uniform() * max_mode) % max_mode;
  const double d1 = rng.uniform(0.0, 2.5);
  const double d2 = rng.uniform(0.0, 2.5);
  const double d3 = rng.uniform(0.0, 2.5);
  auto u = random_band_limited(g, k1, 1.0, d1, rng);
  auto v = random_band_limited(g, k2, 1.0, d2, rng);
  auto w = random_band_limited_vector(g, k3, 1.0, d3, rng);
  return {std::move(u), std::move(v), std::move(w)};
}

}  // namespace harness_detail

/// One report per inequality (and per exponent choice).
inline std::vector<InequalityReport> inequality_harness(const HarnessConfig& cfg) {
  if (cfg.samples < 1) throw ConfigError("harness needs at least one sample");
  if (cfg.grid_sizes.empty()) throw ConfigError("harness needs at least one grid");
  const auto params = AlignmentParams::make(cfg.dim, cfg.alpha);
  const int n_min = *std::min_element(cfg.grid_sizes.begin(), cfg.grid_sizes.end());
  const int max_mode = cfg.max_mode > 0 ? cfg.max_mode : std::max(1, n_min / 6);
  if (6 * max_mode > n_min) throw ConfigError("harness max_mode too large for the coarsest grid");
  const double a = cfg.alpha;
  const double tmin = std::min(2.0 - a, a - 1.0);

  struct Spec {
    std::string id;
    std::function<double(const DyadicDecomposition&, const harness_detail::Sample&)> ratio;
  };
  std::vector<Spec> specs;
  specs.push_back({"product_B1", [](const DyadicDecomposition& dec, const harness_detail::Sample& s) {
                     return inequality_ratio(besov_d1(dec, product(s.u, s.v), 1.0),
                                             besov_d1(dec, s.u, 1.0) * besov_d1(dec, s.v, 1.0));
                   }});
  for (double t : {0.0, 0.5 * (a - 1.0), a - 1.0}) {
    specs.push_back({"product_alpha_theta=" + std::to_string(t),
                     [a, t](const DyadicDecomposition& dec, const harness_detail::Sample& s) {
                       return inequality_ratio(besov_d1(dec, product(s.u, s.v), 2.0 - a),
                                               besov_d1(dec, s.u, 1.0 - t) * besov_d1(dec, s.v, 2.0 + t - a));
                     }});
  }
  for (double sv : cfg.commutator_s) {
    specs.push_back({"commutator_s=" + std::to_string(sv),
                     [sv](const DyadicDecomposition& dec, const harness_detail::Sample& s) {
                       return inequality_ratio(commutator_norm(dec, s.w, s.u, sv),
                                               besov_d1(dec, gradient_components(s.w), 1.0) *
                                                   besov_d1(dec, s.u, sv));
                     }});
  }
  for (double t : {0.0, 0.5 * tmin, tmin}) {
    specs.push_back({"ialpha_bound_theta=" + std::to_string(t),
                     [&params, a, t](const DyadicDecomposition& dec, const harness_detail::Sample& s) {
                       const auto iu = i_alpha(s.w, s.v, params);
                       return inequality_ratio(besov_d1(dec, iu, 2.0 - a),
                                               besov_d1(dec, gradient_components(s.w), 1.0 - t) *
                                                   besov_d1(dec, s.v, 1.0 + t));
                     }});
  }

  std::vector<InequalityReport> reports(specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    reports[k].id = specs[k].id;
    reports[k].samples = cfg.samples;
    reports[k].grid_sizes = cfg.grid_sizes;
  }
  for (int n : cfg.grid_sizes) {
    const Grid g(cfg.dim, n, cfg.length);
    const DyadicDecomposition dec(g);
    // ratios[sample][spec], filled per sample so the reduction order is fixed.
    std::vector<std::vector<double>> ratios(static_cast<std::size_t>(cfg.samples));
    parallel_for(static_cast<std::size_t>(cfg.samples), [&](std::size_t i) {
      const auto s = harness_detail::draw(g, cfg.seed, static_cast<int>(i), max_mode);
      for (const auto& sp : specs) ratios[i].push_back(sp.ratio(dec, s));
    });
    for (std::size_t k = 0; k < specs.size(); ++k) {
      double c = 0.0;
      int worst = -1;
      for (std::size_t i = 0; i < ratios.size(); ++i)
        if (worst < 0 || ratios[i][k] > c) {
          c = ratios[i][k];
          worst = static_cast<int>(i);
        }
      auto& r = reports[k];
      if (!r.constants.empty()) r.growth.push_back(inequality_ratio(c, r.constants.back()) - 1.0);
      r.constants.push_back(c);
      if (c >= r.constant) {
        r.constant = c;
        r.worst_sample = worst;
        r.worst_grid = n;
      }
    }
  }
  for (auto& r : reports)
    r.growth_flag = std::any_of(r.growth.begin(), r.growth.end(), [&](double x) { return x > cfg.growth_limit; });
  return reports;
}

}  // namespace frfl
