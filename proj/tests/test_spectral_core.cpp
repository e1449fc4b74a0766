#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "frfl/random_fields.hpp"
#include "frfl/spectral.hpp"

using namespace frfl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rel_l2(const ScalarField& a, const ScalarField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.grid().size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

ScalarField white_noise(const Grid& g, Rng& rng) {
  std::vector<double> v(g.size());
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return ScalarField::from_values(g, std::move(v));
}

}  // namespace

TEST(Grid, LatticeIn1D) {
  auto g = make_grid(1, 8, kTwoPi);
  std::vector<int> modes;
  for (std::size_t i = 0; i < g.size(); ++i) modes.push_back(g.mode(i)[0]);
  std::sort(modes.begin(), modes.end());
  EXPECT_EQ(modes, (std::vector<int>{-4, -3, -2, -1, 0, 1, 2, 3}));
  EXPECT_DOUBLE_EQ(g.base_wavenumber(), 1.0);
}

TEST(Grid, ZeroModeOnceIn2D) {
  auto g = make_grid(2, 16, kTwoPi);
  EXPECT_EQ(g.size(), 256u);
  int zeros = 0;
  for (std::size_t i = 0; i < g.size(); ++i) zeros += g.wavevector_norm(i) == 0.0;
  EXPECT_EQ(zeros, 1);
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(make_grid(3, 8, 1.0), ConfigError);
  EXPECT_THROW(make_grid(1, 12, 1.0), ConfigError);
  EXPECT_THROW(make_grid(1, 4, 1.0), ConfigError);
  EXPECT_THROW(make_grid(1, 8, 0.0), ConfigError);
}

TEST(Transform, RoundTripOnHundredRandomFields) {
  Rng rng(11, 0);
  for (int dim : {1, 2}) {
    auto g = make_grid(dim, dim == 1 ? 128 : 32, kTwoPi);
    for (int s = 0; s < 100; ++s) {
      auto f = white_noise(g, rng);
      auto back = ScalarField::from_spectral(g, std::vector<cplx>(f.spectral().begin(), f.spectral().end()));
      EXPECT_LE(rel_l2(back, f), 1e-12);
    }
  }
}

TEST(Transform, CosineHasTwoConjugateCoefficients) {
  auto g = make_grid(1, 16, kTwoPi);
  auto f = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  auto c = f.spectral();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int m = g.mode(i)[0];
    const double expect = std::abs(m) == 1 ? 0.5 : 0.0;
    EXPECT_NEAR(c[i].real(), expect, 1e-15);
    EXPECT_NEAR(c[i].imag(), 0.0, 1e-15);
  }
}

TEST(Transform, Parseval) {
  Rng rng(12, 0);
  auto g = make_grid(2, 32, 3.0);
  auto f = white_noise(g, rng);
  double direct = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) direct += f[i] * f[i];
  direct *= g.cell_volume();
  EXPECT_NEAR(spectral_energy(f) / direct, 1.0, 1e-10);
}

TEST(FractionalLaplacian, AnnihilatesConstants) {
  auto g = make_grid(2, 16, kTwoPi);
  auto f = fractional_laplacian(ScalarField::constant(g, 3.7), 1.3);
  EXPECT_EQ(f.max_abs(), 0.0);
}

TEST(FractionalLaplacian, UnitAndDoubleWavenumber) {
  auto g = make_grid(1, 64, kTwoPi);
  auto c1 = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  EXPECT_LE(rel_l2(fractional_laplacian(c1, 1.5), c1), 1e-13);
  auto c2 = ScalarField::from_function(g, [](double x, double) { return std::cos(2 * x); });
  auto expect = c2;
  expect *= std::pow(2.0, 1.5);
  EXPECT_LE(rel_l2(fractional_laplacian(c2, 1.5), expect), 1e-13);
  EXPECT_NEAR(std::pow(2.0, 1.5), 2.828427, 1e-6);
}

TEST(FractionalLaplacian, RejectsExponent) {
  auto g = make_grid(1, 8, kTwoPi);
  EXPECT_THROW(fractional_laplacian(ScalarField(g), 0.0), ConfigError);
  EXPECT_THROW(fractional_laplacian(ScalarField(g), 2.5), ConfigError);
}

TEST(FractionalLaplacian, AlphaTwoIsMinusLaplacian) {
  Rng rng(13, 0);
  auto g = make_grid(2, 32, 5.0);
  auto f = random_band_limited(g, 8, 1.0, 0.0, rng);
  EXPECT_LE(rel_l2(fractional_laplacian(f, 2.0), negative_laplacian(f)), 1e-12);
}

TEST(FractionalLaplacian, Linearity) {
  Rng rng(14, 0);
  auto g = make_grid(1, 64, kTwoPi);
  auto f = white_noise(g, rng);
  auto h = white_noise(g, rng);
  auto combo = 2.5 * f + (-1.25) * h;
  auto lhs = fractional_laplacian(combo, 1.7);
  auto rhs = 2.5 * fractional_laplacian(f, 1.7) + (-1.25) * fractional_laplacian(h, 1.7);
  EXPECT_LE(rel_l2(lhs, rhs), 1e-12);
}

TEST(Differential, GradientOfSine) {
  auto g = make_grid(1, 32, kTwoPi);
  auto f = ScalarField::from_function(g, [](double x, double) { return std::sin(x); });
  auto expect = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  EXPECT_LE(rel_l2(gradient(f)[0], expect), 1e-14);
}

TEST(Differential, DivergenceOfConstantVanishes) {
  auto g = make_grid(2, 16, kTwoPi);
  VectorField v(std::vector<ScalarField>{ScalarField::constant(g, 1.0), ScalarField::constant(g, -2.0)});
  EXPECT_LT(divergence(v).max_abs(), 1e-15);
}

TEST(Differential, DivGradMatchesMinusKSquared) {
  Rng rng(15, 0);
  for (int dim : {1, 2}) {
    auto g = make_grid(dim, 32, kTwoPi);
    auto f = random_band_limited(g, 9, 1.0, 0.0, rng);
    auto lhs = divergence(gradient(f));
    auto rhs = negative_laplacian(f);
    rhs *= -1.0;
    EXPECT_LE(rel_l2(lhs, rhs), 1e-12);
  }
}

TEST(Dealias, LowModesUnchangedBitExactly) {
  Rng rng(16, 0);
  auto g = make_grid(2, 32, kTwoPi);
  auto f = random_band_limited(g, 10, 1.0, 0.0, rng);
  auto d = dealias(f);
  auto a = f.spectral();
  auto b = d.spectral();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Dealias, TopModeRemoved) {
  auto g = make_grid(1, 32, kTwoPi);
  auto f = ScalarField::from_function(g, [](double x, double) { return std::cos(15 * x); });
  EXPECT_LT(dealias(f).max_abs(), 1e-13);
}

TEST(Dealias, ProductOfUpperThirdModes) {
  // cos(12x)^2 = 1/2 + cos(24x)/2. On 32 points the raw grid product folds
  // cos(24x) onto cos(8x); the dealiased product keeps only the exact 1/2.
  auto g = make_grid(1, 32, kTwoPi);
  auto high = ScalarField::from_function(g, [](double x, double) { return std::cos(12 * x); });
  auto raw_field = pointwise_product(high, high);
  auto raw = raw_field.spectral();
  EXPECT_NEAR(std::abs(raw[8]), 0.25, 1e-13);
  auto prod = product(high, high);
  auto c = prod.spectral();
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(c[i]), i == 0 ? 0.5 : 0.0, 1e-14);
}

TEST(Dealias, ProductMatchesClosedFormTruncation) {
  // cos(9x) cos(2x) = cos(11x)/2 + cos(7x)/2; mode 11 lies above N/3 = 10.7.
  auto g = make_grid(1, 32, kTwoPi);
  auto f = ScalarField::from_function(g, [](double x, double) { return std::cos(9 * x); });
  auto h = ScalarField::from_function(g, [](double x, double) { return std::cos(2 * x); });
  auto expect = ScalarField::from_function(g, [](double x, double) { return 0.5 * std::cos(7 * x); });
  EXPECT_LE(rel_l2(product(f, h), expect), 1e-13);
}

TEST(Dealias, TwoDimensionalProductAgainstClosedForm) {
  auto g = make_grid(2, 16, kTwoPi);
  auto f = ScalarField::from_function(g, [](double x, double y) { return std::sin(x + 2 * y); });
  auto h = ScalarField::from_function(g, [](double x, double y) { return std::cos(3 * x - y); });
  // sin(a)cos(b) = (sin(a+b) + sin(a-b))/2: modes (4,1) and (-2,3), both kept.
  auto expect = ScalarField::from_function(
      g, [](double x, double y) { return 0.5 * (std::sin(4 * x + y) + std::sin(-2 * x + 3 * y)); });
  EXPECT_LE(rel_l2(product(f, h), expect), 1e-13);
}
