#pragma once

// Spectral I_alpha against the direct quadrature on random smooth pairs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nonlocal.hpp"
#include "oracle.hpp"
#include "random_fields.hpp"

namespace frfl {

inline double rel_l2(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid());
  double num = 0.0, den = 0.0;
  for (int c = 0; c < a.dim(); ++c)
    for (std::size_t i = 0; i < a.grid().size(); ++i) {
      num += (a[c][i] - b[c][i]) * (a[c][i] - b[c][i]);
      den += b[c][i] * b[c][i];
    }
  if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
  return std::sqrt(num / den);
}

struct IdentityCheck {
  std::vector<int> kmax;      // band limit of each pair
  std::vector<double> rel;    // relative L2 discrepancy per pair
  double max_rel = 0.0;
  double constant_sigma = 0.0;  // max |I_a(u, const)| over the pairs
};

/// Pair i draws (u, sigma) from stream i of `seed` with band limit in
/// [1, n/6] and unit decay; both routes see the same samples.
inline IdentityCheck identity_vs_oracle(std::uint64_t seed, int pairs, int n = 64, double alpha = 1.5,
                                        double length = 2.0 * std::numbers::pi) {
  const Grid g(1, n, length);
  const auto p = AlignmentParams::make(1, alpha);
  const int top = std::max(1, n / 6);
  IdentityCheck r;
  for (int i = 0; i < pairs; ++i) {
    Rng rng(seed, 1000 + static_cast<std::uint64_t>(i));
    const int k = 1 + static_cast<int>(rng.uniform() * top) % top;
    auto u = random_band_limited_vector(g, k, 1.0, 1.0, rng);
    auto s = random_band_limited(g, k, 1.0, 1.0, rng);
    const double e = rel_l2(i_alpha(u, s, p), i_alpha_oracle(u, s, p));
    r.kmax.push_back(k);
    r.rel.push_back(e);
    r.max_rel = std::max(r.max_rel, e);
    const auto z = i_alpha(u, ScalarField::constant(g, 0.5 + rng.uniform()), p);
    r.constant_sigma = std::max(r.constant_sigma, z.max_norm());
  }
  return r;
}

}  // namespace frfl
