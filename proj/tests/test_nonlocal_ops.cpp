#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "frfl/nonlocal.hpp"
#include "frfl/oracle.hpp"
#include "frfl/random_fields.hpp"

using namespace frfl;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double rel_l2(const VectorField& a, const VectorField& b) {
  double num = 0.0, den = 0.0;
  for (int c = 0; c < a.dim(); ++c)
    for (std::size_t i = 0; i < a.grid().size(); ++i) {
      num += (a[c][i] - b[c][i]) * (a[c][i] - b[c][i]);
      den += b[c][i] * b[c][i];
    }
  return std::sqrt(num / den);
}

double max_abs(const VectorField& v) {
  double m = 0.0;
  for (const auto& c : v.components()) m = std::max(m, c.max_abs());
  return m;
}

ScalarField fn(const Grid& g, double (*f)(double, double)) { return ScalarField::from_function(g, f); }

VectorField as_vector(ScalarField f) { return VectorField(std::vector<ScalarField>{std::move(f)}); }

}  // namespace

TEST(CAlpha, ClosedFormAtAlphaOne) {
  // Gamma(-1/2) = -2 sqrt(pi), so c = 2 / (sqrt(pi) (-2 sqrt(pi))) = -1/pi.
  auto c = c_alpha(1, 1.0);
  EXPECT_NEAR(c.value, -1.0 / kPi, 1e-15);
  EXPECT_NEAR(c.magnitude, 0.31831, 1e-5);
}

TEST(CAlpha, NegativeOnTheAdmissibleRange) {
  for (int d : {1, 2})
    for (double a = 1.05; a < 2.0; a += 0.1) EXPECT_LT(c_alpha(d, a).value, 0.0);
  EXPECT_THROW(c_alpha(1, 0.0), ConfigError);
  EXPECT_THROW(c_alpha(1, 2.0), ConfigError);
}

TEST(CAlpha, MuInvertsMagnitude) {
  for (double a : {1.1, 1.5, 1.9}) {
    auto p = AlignmentParams::make(2, a);
    EXPECT_NEAR(p.mu * p.c_mag, 1.0, 1e-15);
    EXPECT_GT(p.mu, 0.0);
  }
  EXPECT_THROW(AlignmentParams::make(1, 2.5), ConfigError);
  EXPECT_THROW(AlignmentParams::make(1, 1.0), ConfigError);
}

TEST(IAlpha, ConstantSigmaGivesExactZero) {
  auto g = make_grid(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  Rng rng(1, 0);
  auto u = random_band_limited_vector(g, 8, 1.0, 1.0, rng);
  auto r = i_alpha(u, ScalarField::constant(g, 0.37), p);
  EXPECT_EQ(max_abs(r), 0.0);
  auto o = i_alpha_oracle(u, ScalarField::constant(g, 0.37), p);
  EXPECT_EQ(max_abs(o), 0.0);
}

TEST(IAlpha, SymmetricInItsTwoSlots) {
  auto g = make_grid(2, 32, kTwoPi);
  auto p = AlignmentParams::make(2, 1.3);
  Rng rng(2, 0);
  auto a = random_band_limited(g, 6, 1.0, 1.0, rng);
  auto b = random_band_limited(g, 6, 1.0, 1.0, rng);
  auto x = i_alpha(a, b, p);
  auto y = i_alpha(b, a, p);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(x[i], y[i], 1e-12 * x.max_abs());
}

TEST(IAlpha, BilinearUpToRoundoff) {
  auto g = make_grid(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  Rng rng(3, 0);
  auto u = random_band_limited_vector(g, 8, 1.0, 1.0, rng);
  auto s = random_band_limited(g, 8, 1.0, 1.0, rng);
  auto base = i_alpha(u, s, p);
  auto scaled = i_alpha(2.0 * u, 3.0 * s, p);
  base *= 6.0;
  EXPECT_LE(rel_l2(scaled, base), 1e-12);
}

TEST(IAlpha, CosineSineAgainstOracle) {
  auto g = make_grid(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  auto u = as_vector(fn(g, [](double x, double) { return std::cos(x); }));
  auto s = fn(g, [](double x, double) { return std::sin(x); });
  EXPECT_LE(rel_l2(i_alpha(u, s, p), i_alpha_oracle(u, s, p)), 1e-4);
}

TEST(IAlpha, TwoDimensionalAgainstOracle) {
  auto g = make_grid(2, 16, kTwoPi);
  auto p = AlignmentParams::make(2, 1.5);
  Rng rng(4, 0);
  auto u = random_band_limited_vector(g, 2, 1.0, 1.0, rng);
  auto s = random_band_limited(g, 2, 1.0, 1.0, rng);
  EXPECT_LE(rel_l2(i_alpha(u, s, p), i_alpha_oracle(u, s, p)), 1e-3);
}

TEST(Oracle, BilinearToRoundoff) {
  auto g = make_grid(1, 32, kTwoPi);
  auto p = AlignmentParams::make(1, 1.4);
  Rng rng(5, 0);
  auto u = random_band_limited_vector(g, 5, 1.0, 1.0, rng);
  auto s = random_band_limited(g, 5, 1.0, 1.0, rng);
  auto base = i_alpha_oracle(u, s, p);
  base *= 6.0;
  EXPECT_LE(rel_l2(i_alpha_oracle(2.0 * u, 3.0 * s, p), base), 1e-12);
}

TEST(Oracle, CutoffRefinementIsCauchy) {
  auto g = make_grid(1, 32, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  auto u = as_vector(fn(g, [](double x, double) { return std::cos(x) + 0.3 * std::sin(3 * x); }));
  auto s = fn(g, [](double x, double) { return std::sin(2 * x); });
  std::vector<VectorField> runs;
  OracleOptions opt = OracleOptions::from(p);
  for (double delta : {0.2, 0.1, 0.05, 0.025}) {
    opt.pv_cutoff = delta;
    runs.push_back(i_alpha_oracle(u, s, p, opt));
  }
  double prev = 1e300;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    const double diff = rel_l2(runs[k], runs[k - 1]);
    EXPECT_LT(diff, prev);
    prev = diff;
  }
}

TEST(Oracle, RefusesLargeGrids) {
  auto g = make_grid(1, 256, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  VectorField u(g);
  EXPECT_THROW(i_alpha_oracle(u, ScalarField(g), p), DomainError);
}

TEST(AlignmentForce, ConstantVelocityGivesZero) {
  auto g = make_grid(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  auto rho = fn(g, [](double x, double) { return 1.0 + 0.3 * std::cos(x); });
  VectorField u(std::vector<ScalarField>{ScalarField::constant(g, 0.8)});
  EXPECT_LT(max_abs(alignment_force(rho, u, p)), 1e-13);
}

TEST(AlignmentForce, UnitDensityIsFractionalDiffusion) {
  auto g = make_grid(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  auto u = as_vector(fn(g, [](double x, double) { return std::cos(3 * x); }));
  auto f = alignment_force(ScalarField::constant(g, 1.0), u, p);
  auto expect = as_vector(fn(g, [](double x, double) { return std::cos(3 * x); }));
  expect *= -p.mu * std::pow(3.0, 1.5);
  EXPECT_LE(rel_l2(f, expect), 1e-13);
}

TEST(AlignmentForce, DecompositionThroughIAlpha) {
  for (int dim : {1, 2}) {
    auto g = make_grid(dim, dim == 1 ? 64 : 32, kTwoPi);
    auto p = AlignmentParams::make(dim, 1.6);
    for (int sample = 0; sample < 10; ++sample) {
      Rng rng(6, static_cast<std::uint64_t>(sample));
      auto sigma = random_band_limited(g, 6, 0.05, 1.0, rng);
      auto u = random_band_limited_vector(g, 6, 0.05, 1.0, rng);
      auto rho = sigma + ScalarField::constant(g, 1.0);
      auto force = alignment_force(rho, u, p);
      auto other = i_alpha(u, sigma, p);
      for (int c = 0; c < dim; ++c) {
        auto lap = fractional_laplacian(u[c], p.alpha);
        other[c] -= p.mu * product(sigma, lap);
        other[c] -= p.mu * lap;
      }
      EXPECT_LE(rel_l2(other, force), 1e-6);
    }
  }
  auto g = make_grid(1, 16, kTwoPi);
  VectorField u(g);
  EXPECT_THROW(alignment_force(ScalarField::constant(g, -0.1), u, AlignmentParams::make(1, 1.5)), DensityError);
}

TEST(TOperator, ConstantGivesZero) {
  auto g = make_grid(2, 16, kTwoPi);
  auto t = t_operator(ScalarField::constant(g, 2.0), AlignmentParams::make(2, 1.5));
  EXPECT_EQ(max_abs(t), 0.0);
}

TEST(TOperator, HomogeneityBetweenKAnd2K) {
  auto g = make_grid(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  auto t1 = t_operator(fn(g, [](double x, double) { return std::cos(3 * x); }), p);
  auto t2 = t_operator(fn(g, [](double x, double) { return std::cos(6 * x); }), p);
  EXPECT_NEAR(t2[0].max_abs() / t1[0].max_abs(), std::pow(2.0, 0.5), 1e-12);
}

TEST(TOperator, ConstantOnRays) {
  auto g = make_grid(2, 16, kTwoPi);
  TOperator t(g, 1.7);
  auto a = t.ray({1.0, 2.0});
  auto b = t.ray({3.0, 6.0});
  EXPECT_EQ(a[0], b[0]);
  EXPECT_EQ(a[1], b[1]);
}

TEST(TOperator, TwoDimensionalRayClosedForm) {
  // R(w) = i kappa w int_0^{2pi} |cos t|^alpha dt, the angular integral being
  // 2 sqrt(pi) Gamma((alpha+1)/2) / Gamma(alpha/2 + 1).
  const double alpha = 1.5;
  auto g = make_grid(2, 16, kTwoPi);
  TOperator t(g, alpha);
  const double kappa = std::tgamma(1.0 - alpha) * std::cos(0.5 * kPi * alpha);
  const double ang = 2.0 * std::sqrt(kPi) * std::tgamma(0.5 * (alpha + 1.0)) / std::tgamma(0.5 * alpha + 1.0);
  const double w0 = 0.6, w1 = 0.8;
  auto r = t.ray({w0, w1});
  EXPECT_NEAR(r[0].imag(), kappa * ang * w0, 1e-10);
  EXPECT_NEAR(r[1].imag(), kappa * ang * w1, 1e-10);
  EXPECT_EQ(r[0].real(), 0.0);
}

TEST(TOperator, AgreesWithQuadratureOracle) {
  for (int dim : {1, 2}) {
    auto g = make_grid(dim, dim == 1 ? 64 : 16, kTwoPi);
    auto p = AlignmentParams::make(dim, 1.5);
    Rng rng(7, static_cast<std::uint64_t>(dim));
    auto s = random_band_limited(g, dim == 1 ? 6 : 2, 1.0, 1.0, rng);
    EXPECT_LE(rel_l2(t_operator(s, p), t_operator_oracle(s, p, OracleOptions::from(p))), 1e-3) << "dim " << dim;
  }
}

TEST(Dissipation, OracleMatchesEnergyIdentity) {
  // D = -2 int rho u . A, A the per-unit-mass alignment force.
  auto g = make_grid(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  Rng rng(8, 0);
  auto rho = random_band_limited(g, 5, 0.2, 1.0, rng) + ScalarField::constant(g, 1.0);
  auto u = random_band_limited_vector(g, 5, 1.0, 1.0, rng);
  auto a = alignment_force(rho, u, p);
  double spectral_route = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) spectral_route += rho[i] * u[0][i] * a[0][i];
  spectral_route *= -2.0 * g.cell_volume();
  const double oracle = dissipation_oracle(rho, u, p, OracleOptions::from(p));
  EXPECT_NEAR(spectral_route / oracle, 1.0, 1e-3);
}
