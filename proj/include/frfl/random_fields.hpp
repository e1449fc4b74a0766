#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "field.hpp"

namespace frfl {

/// Reproducible sampler. Streams derived from one seed are independent and
/// the doubles do not depend on the standard library's distributions.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

/// Smooth random band-limited field: sum over integer modes m with
/// 1 <= max|m_i| <= kmax of amplitude (1+|m|)^{-decay} (a cos + b sin),
/// a, b uniform in [-1, 1]. The sample depends on (seed, stream) only, so one
/// draw is the same function on every grid that resolves it.
inline ScalarField random_band_limited(const Grid& g, int kmax, double amplitude, double decay, Rng& rng) {
  const int d = g.dim();
  const int n = g.n();
  if (3 * kmax > n) throw ConfigError("random field bandwidth exceeds the dealiased range of the grid");
  std::vector<cplx> c(g.size(), cplx{});
  auto flat = [&](int m0, int m1) {
    const int i0 = (m0 + n) % n;
    const int i1 = (m1 + n) % n;
    return d == 1 ? static_cast<std::size_t>(i0) : static_cast<std::size_t>(i0) * n + i1;
  };
  const int lo1 = d == 2 ? -kmax : 0;
  const int hi1 = d == 2 ? kmax : 0;
  for (int m0 = 0; m0 <= kmax; ++m0) {
    for (int m1 = lo1; m1 <= hi1; ++m1) {
      // One representative per +-m pair.
      if (m0 == 0 && m1 <= 0) continue;
      const double a = rng.uniform(-1.0, 1.0);
      const double b = rng.uniform(-1.0, 1.0);
      const double w = amplitude * std::pow(1.0 + std::hypot(m0, m1), -decay);
      // 2D rows are the first axis, so (m0, m1) maps to (row, column).
      const cplx z = 0.5 * w * cplx{a, -b};
      c[flat(m0, m1)] += z;
      c[flat(-m0, -m1)] += std::conj(z);
    }
  }
  return ScalarField::from_spectral(g, std::move(c));
}

inline VectorField random_band_limited_vector(const Grid& g, int kmax, double amplitude, double decay, Rng& rng) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < g.dim(); ++a) comps.push_back(random_band_limited(g, kmax, amplitude, decay, rng));
  return VectorField(std::move(comps));
}

}  // namespace frfl
