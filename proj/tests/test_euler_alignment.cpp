#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "frfl/gates.hpp"
#include "frfl/random_fields.hpp"
#include "frfl/simulate.hpp"
#include "frfl/snapshot.hpp"

using namespace frfl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField wave(const Grid& g, double amp, int m, bool sine) {
  return ScalarField::from_function(g, [=](double x, double) { return amp * (sine ? std::sin(m * x) : std::cos(m * x)); });
}

VectorField as_vector(ScalarField f) { return VectorField(std::vector<ScalarField>{std::move(f)}); }

double max_abs(const VectorField& v) { return v.max_norm(); }

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.grid().size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool bit_equal(const ScalarField& a, const ScalarField& b) {
  auto x = a.values();
  auto y = b.values();
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

}  // namespace

TEST(AssembleF, ZeroVelocityGivesZero) {
  Grid g(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  auto f = assemble_F(VectorField(g), wave(g, 0.1, 2, false), p);
  EXPECT_EQ(max_abs(f), 0.0);
}

TEST(AssembleF, ZeroDensityPerturbationLeavesInertiaOnly) {
  Grid g(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  Rng rng(3, 0);
  auto u = random_band_limited_vector(g, 6, 0.1, 1.0, rng);
  auto f = assemble_F(u, ScalarField(g), p);
  auto expected = advection(u, u);
  expected *= -1.0;
  EXPECT_LE(max_diff(f[0], expected[0]), 1e-15);
}

TEST(AssembleF, MatchesAlignmentForm) {
  // F - mu L u = mu [u L rho - L(rho u)] - (u . grad) u with rho = 1 + sigma.
  for (int d : {1, 2}) {
    Grid g(d, d == 1 ? 64 : 32, kTwoPi);
    auto p = AlignmentParams::make(d, 1.4);
    for (int s = 0; s < 5; ++s) {
      Rng rng(11, static_cast<std::uint64_t>(s));
      auto sigma = random_band_limited(g, 5, 0.05, 1.0, rng);
      auto u = random_band_limited_vector(g, 5, 0.05, 1.0, rng);
      auto lhs = assemble_F(u, sigma, p);
      lhs.axpy(-p.mu, fractional_laplacian(u, p.alpha));
      auto rhs = alignment_force(sigma + ScalarField::constant(g, 1.0), u, p);
      rhs.axpy(-1.0, advection(u, u));
      const double diff = lp_norm(lhs - rhs, 2.0);
      EXPECT_LE(diff, 1e-6 * lp_norm(rhs, 2.0)) << "d=" << d << " sample " << s;
    }
  }
}

TEST(AssembleF, TermsSumToTotal) {
  Grid g(2, 32, kTwoPi);
  auto p = AlignmentParams::make(2, 1.5);
  Rng rng(5, 1);
  auto sigma = random_band_limited(g, 4, 0.1, 1.0, rng);
  auto u = random_band_limited_vector(g, 4, 0.1, 1.0, rng);
  auto t = assemble_F_terms(u, sigma, p);
  auto total = assemble_F(u, sigma, p);
  for (int a = 0; a < 2; ++a) EXPECT_EQ(max_diff(t.total()[a], total[a]), 0.0);
  EXPECT_GT(max_abs(t.leibniz), 0.0);
  EXPECT_GT(max_abs(t.weighted), 0.0);
  EXPECT_GT(max_abs(t.inertia), 0.0);
}

TEST(DirectStep, ZeroStateStaysZero) {
  Grid g(2, 16, kTwoPi);
  SolverState s(0.0, ScalarField(g), VectorField(g), AlignmentParams::make(2, 1.5));
  DirectStepConfig cfg;
  cfg.dt = 0.05;
  for (int k = 0; k < 10; ++k) s = direct_step(s, cfg);
  EXPECT_EQ(s.sigma.max_norm(), 0.0);
  EXPECT_EQ(max_abs(s.u), 0.0);
  EXPECT_NEAR(s.t, 0.5, 1e-15);
}

TEST(DirectStep, LinearisedDecayRateOfDominantMode) {
  Grid g(1, 128, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  SolverState s(0.0, ScalarField(g), as_vector(wave(g, 1e-3, 1, true)), p);
  DirectStepConfig cfg;
  cfg.dt = 0.01;
  const double a0 = std::abs(s.u[0].spectral()[1]);
  for (int k = 0; k < 100; ++k) s = direct_step(s, cfg);
  const double a1 = std::abs(s.u[0].spectral()[1]);
  const double rate = -std::log(a1 / a0) / s.t;
  EXPECT_NEAR(rate, p.mu, 0.05 * p.mu);
  EXPECT_LT(lp_norm(s.u, 2.0), lp_norm(as_vector(wave(g, 1e-3, 1, true)), 2.0));
}

TEST(DirectStep, MeanDensityConservedOverThousandSteps) {
  Grid g(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.3);
  Rng rng(8, 2);
  auto sigma = random_band_limited(g, 6, 0.02, 1.0, rng);
  auto u = random_band_limited_vector(g, 6, 0.02, 1.0, rng);
  SolverState s(0.0, sigma, u, p);
  const double m0 = s.sigma.mean();
  DirectStepConfig cfg;
  cfg.dt = 0.01;
  DirectStepper stepper(g, p, cfg);
  for (int k = 0; k < 1000; ++k) s = stepper.step(s);
  EXPECT_LE(std::abs(s.sigma.mean() - m0), 1e-12);
}

TEST(DirectStep, NonPositiveDensityAborts) {
  Grid g(1, 32, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  SolverState s(0.0, wave(g, 1.5, 1, false), as_vector(wave(g, 1e-3, 1, true)), p);
  DirectStepConfig cfg;
  cfg.dt = 0.01;
  EXPECT_THROW(direct_step(s, cfg), DensityError);
}

TEST(DirectStep, CflViolationCarriesSuggestion) {
  Grid g(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  SolverState s(0.0, ScalarField(g), as_vector(ScalarField::constant(g, 10.0)), p);
  DirectStepConfig cfg;
  cfg.dt = 0.1;
  try {
    direct_step(s, cfg);
    FAIL() << "expected CFL rejection";
  } catch (const CflViolation& e) {
    EXPECT_NEAR(e.suggested_dt(), 0.5 * g.spacing() / 10.0, 1e-14);
  }
}

TEST(Truncation, FullLevelKeepsData) {
  Grid g(1, 128, kTwoPi);
  const DyadicDecomposition dec(g);
  Rng rng(1, 1);
  auto sigma = random_band_limited(g, 40, 0.1, 0.5, rng);
  auto u = random_band_limited_vector(g, 40, 0.1, 0.5, rng);
  auto [s, v] = init_truncated_data(dec, sigma, u, full_truncation_level(dec), 0);
  EXPECT_LE(max_diff(s, sigma), 1e-12);
  EXPECT_LE(max_diff(v[0], u[0]), 1e-12);
}

TEST(Truncation, LevelZeroKeepsOnlyBlockZero) {
  Grid g(1, 128, kTwoPi);
  const DyadicDecomposition dec(g);
  // Modes 1 and 2 reach block 0; modes 5 and 20 lie entirely above it.
  auto f = wave(g, 1.0, 1, false) + wave(g, 1.0, 2, true) + wave(g, 1.0, 5, false) + wave(g, 1.0, 20, true);
  auto [t, v] = init_truncated_data(dec, f, as_vector(f), 0, 0);
  auto b0 = dec.block(f, 0);
  EXPECT_LE(max_diff(t, b0), 1e-13);
  EXPECT_LE(max_diff(v[0], b0), 1e-13);
  EXPECT_LE(std::abs(t.spectral()[5]), 1e-14);
  EXPECT_LE(std::abs(t.spectral()[20]), 1e-14);
}

TEST(Truncation, LadderNormsBoundedByFullNorm) {
  Grid g(1, 128, kTwoPi);
  const DyadicDecomposition dec(g);
  for (int s = 0; s < 5; ++s) {
    Rng rng(21, static_cast<std::uint64_t>(s));
    auto u = random_band_limited_vector(g, 40, 1.0, 0.3, rng);
    const double full = besov_d1(dec, u, 0.5);
    double sup = 0.0;
    for (int n = 0; n <= full_truncation_level(dec); ++n) {
      auto [sn, un] = init_truncated_data(dec, u[0], u, n, 0);
      sup = std::max(sup, besov_d1(dec, un, 0.5));
    }
    EXPECT_LE(sup, (1.0 + 1e-10) * full);
  }
}

TEST(Gates, ZeroDataPasses) {
  Grid g(1, 64, kTwoPi);
  for (double eps : {1e-8, 1.0}) {
    auto r = smallness_gates(ScalarField(g), VectorField(g), eps, eps, 1.5);
    EXPECT_TRUE(r.global_pass);
    EXPECT_EQ(r.u_norm + r.sigma_norm, 0.0);
    ASSERT_TRUE(r.local_T.has_value());
    EXPECT_TRUE(std::isinf(*r.local_T));
  }
}

TEST(Gates, LargeVelocityFailsGlobalButHasLocalHorizon) {
  Grid g(1, 64, kTwoPi);
  auto u = as_vector(wave(g, 1.0, 1, true));
  auto r = smallness_gates(ScalarField(g), u, 1e-2, 1e-2, 1.5);
  EXPECT_FALSE(r.global_pass);
  ASSERT_TRUE(r.local_T.has_value());
  EXPECT_TRUE(std::isfinite(*r.local_T));
  EXPECT_GT(*r.local_T, 0.0);
  // Check the monitor inequality at the reported horizon and just beyond it.
  const double a = r.grad_sigma_norm + r.grad_u_norm;
  auto monitor = [&](double t) {
    const double x = std::pow(t, 1.0 / 1.5) * a;
    return std::max(std::pow(r.u_norm, 1.0 / 1.5) * std::pow(x, 1.0 - 1.0 / 1.5), x);
  };
  EXPECT_LE(monitor(*r.local_T), 1e-2 * (1.0 + 1e-12));
  EXPECT_GT(monitor(*r.local_T * 1.01), 1e-2);

  auto u2 = as_vector(wave(g, 1.0, 3, true));
  auto r2 = smallness_gates(ScalarField(g), u2, 1e-2, 1e-2, 1.5);
  EXPECT_GT(r2.grad_u_norm + r2.grad_sigma_norm, a);
  EXPECT_LT(*r2.local_T, *r.local_T);
}

TEST(Gates, DoublingVelocityAtLeastHalvesHorizon) {
  Grid g(1, 64, kTwoPi);
  auto u = as_vector(wave(g, 0.5, 2, true) + wave(g, 0.2, 5, false));
  auto u2 = u;
  u2 *= 2.0;
  for (double alpha : {1.2, 1.5, 1.8}) {
    auto r1 = smallness_gates(ScalarField(g), u, 1e-2, 1e-2, alpha);
    auto r2 = smallness_gates(ScalarField(g), u2, 1e-2, 1e-2, alpha);
    EXPECT_LE(*r2.local_T, 0.5 * *r1.local_T * (1.0 + 1e-12)) << alpha;
  }
}

TEST(Gates, SmallDataConfigurationPasses) {
  Grid g(1, 256, kTwoPi);
  auto r = smallness_gates(wave(g, 1e-3, 1, false), as_vector(wave(g, 1e-3, 1, true)), 1e-2, 1e-2, 1.5);
  EXPECT_TRUE(r.global_pass);
  EXPECT_TRUE(r.sigma_small);
}

TEST(Simulate, ZeroHorizonKeepsOnlyInitialState) {
  Grid g(1, 32, kTwoPi);
  SolverState s(0.0, wave(g, 1e-3, 1, false), as_vector(wave(g, 1e-3, 1, true)), AlignmentParams::make(1, 1.5));
  SimulateConfig cfg;
  cfg.t_final = 0.0;
  cfg.snapshot_stride = 1;
  auto tr = simulate(s, cfg);
  ASSERT_EQ(tr.records.size(), 1u);
  ASSERT_EQ(tr.snapshots.size(), 1u);
  EXPECT_EQ(tr.steps, 0);
  EXPECT_TRUE(bit_equal(tr.final_state.sigma, s.sigma));
  EXPECT_EQ(tr.status, RunStatus::completed);
}

TEST(Simulate, RestartFromSnapshotIsBitIdentical) {
  Grid g(2, 16, kTwoPi);
  auto p = AlignmentParams::make(2, 1.5);
  Rng rng(4, 4);
  SolverState s(0.0, random_band_limited(g, 4, 0.05, 1.0, rng), random_band_limited_vector(g, 4, 0.05, 1.0, rng), p);
  SimulateConfig cfg;
  cfg.t_final = 0.4;
  cfg.step.dt = 0.02;
  cfg.snapshot_stride = 10;
  auto full = simulate(s, cfg);
  ASSERT_EQ(full.snapshot_steps.size(), 3u);
  ASSERT_EQ(full.snapshot_steps[1], 10);

  // Round-trip the middle snapshot through files.
  const auto dir = std::filesystem::temp_directory_path() / "frfl_restart_test";
  std::filesystem::create_directories(dir);
  const auto& mid = full.snapshots[1];
  write_snapshot((dir / "sigma.bin").string(), "sigma", mid.sigma);
  write_snapshot((dir / "u1.bin").string(), "u1", mid.u[0]);
  write_snapshot((dir / "u2.bin").string(), "u2", mid.u[1]);
  auto sig = read_snapshot((dir / "sigma.bin").string());
  EXPECT_EQ(sig.name, "sigma");
  std::vector<ScalarField> comps{read_snapshot((dir / "u1.bin").string()).field,
                                 read_snapshot((dir / "u2.bin").string()).field};
  std::filesystem::remove_all(dir);

  SimulateConfig rc = cfg;
  rc.t_start = mid.t;
  auto resumed = simulate(SolverState(mid.t, sig.field, VectorField(std::move(comps)), p), rc);
  EXPECT_EQ(resumed.steps, full.steps);
  EXPECT_TRUE(bit_equal(resumed.final_state.sigma, full.final_state.sigma));
  EXPECT_TRUE(bit_equal(resumed.final_state.u[0], full.final_state.u[0]));
  EXPECT_TRUE(bit_equal(resumed.final_state.u[1], full.final_state.u[1]));
  EXPECT_EQ(resumed.final_state.t, full.final_state.t);
}

TEST(Simulate, AbortKeepsLastGoodState) {
  Grid g(1, 64, kTwoPi);
  SolverState s(0.0, ScalarField(g), as_vector(wave(g, 0.5, 1, true)), AlignmentParams::make(1, 1.5));
  SimulateConfig cfg;
  cfg.t_final = 1.0;
  cfg.step.dt = 0.2;
  auto tr = simulate(s, cfg);
  EXPECT_EQ(tr.status, RunStatus::aborted);
  EXPECT_GT(tr.suggested_dt, 0.0);
  EXPECT_EQ(tr.steps, 0);
  EXPECT_FALSE(tr.message.empty());
}

TEST(Snapshot, RejectsForeignFiles) {
  const auto path = (std::filesystem::temp_directory_path() / "frfl_bad_snapshot.bin").string();
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOPE and some bytes";
  }
  EXPECT_THROW(read_snapshot(path), ConfigError);
  std::filesystem::remove(path);
  EXPECT_THROW(read_snapshot(path), ConfigError);
}

TEST(Iterate, InitialIterateIsTruncatedDensityAndZeroVelocity) {
  Grid g(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  IterateConfig cfg;
  cfg.t_final = 0.2;
  cfg.step.dt = 0.02;
  cfg.n_max = 0;
  auto sigma = wave(g, 1e-3, 1, false);
  auto res = iterate_scheme(sigma, as_vector(wave(g, 1e-3, 1, true)), p, cfg);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].norm_u_crit, 0.0);
  EXPECT_EQ(res.records[0].norm_u_l1, 0.0);
  EXPECT_TRUE(std::isnan(res.records[0].delta_u));
  for (std::size_t k = 0; k < res.last.t.size(); ++k) {
    EXPECT_EQ(max_abs(res.last.u[k]), 0.0);
    EXPECT_TRUE(bit_equal(res.last.sigma[k], sigma));
  }
}

TEST(Iterate, SmallDataContractsAndMatchesDirectSolver) {
  Grid g(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  auto sigma = wave(g, 1e-3, 1, false);
  auto u = as_vector(wave(g, 1e-3, 1, true));
  IterateConfig cfg;
  cfg.t_final = 2.0;
  cfg.step.dt = 0.01;
  cfg.stride = 5;
  cfg.n_max = 6;
  cfg.stop_tol = 0.0;
  auto res = iterate_scheme(sigma, u, p, cfg);
  ASSERT_EQ(res.records.size(), 7u);
  auto rep = cauchy_monitor(res.records, roundoff_floor(res.records));
  for (double r : rep.ratios_u) EXPECT_LE(r, 0.5);
  EXPECT_TRUE(rep.contraction);
  ASSERT_TRUE(rep.fitted_rate.has_value());
  EXPECT_LE(*rep.fitted_rate, 0.5);

  SimulateConfig sc;
  sc.t_final = cfg.t_final;
  sc.step = cfg.step;
  sc.snapshot_stride = cfg.stride;
  auto tr = simulate(SolverState(0.0, sigma, u, p), sc);
  ASSERT_EQ(tr.snapshots.size(), res.last.t.size());
  const DyadicDecomposition dec(g);
  double diff = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    diff = std::max(diff, besov_d1(dec, res.last.u[k] - tr.snapshots[k].u, 0.5));
    ref = std::max(ref, besov_d1(dec, tr.snapshots[k].u, 0.5));
  }
  EXPECT_LE(diff, 1e-3 * ref);
}

TEST(Iterate, HigherOrderNormsStayBounded) {
  Grid g(1, 64, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  Rng rng(6, 0);
  auto sigma = random_band_limited(g, 6, 1e-3, 1.0, rng);
  auto u = random_band_limited_vector(g, 6, 1e-3, 1.0, rng);
  auto gates = smallness_gates(sigma, u, 1e-2, 1e-2, 1.5);
  IterateConfig cfg;
  cfg.t_final = 1.0;
  cfg.step.dt = 0.01;
  cfg.stride = 10;
  cfg.n_max = 5;
  cfg.stop_tol = 0.0;
  auto res = iterate_scheme(sigma, u, p, cfg);
  const double a = gates.grad_sigma_norm + gates.grad_u_norm;
  for (const auto& r : res.records) {
    EXPECT_LE(r.norm_grad_sigma, 4.0 * a) << r.n;
    EXPECT_LE(r.norm_grad_u, 4.0 * a) << r.n;
  }
}

TEST(Iterate, MeanDensityConservedOnEveryIterate) {
  Grid g(1, 32, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  auto sigma = wave(g, 1e-2, 2, false) + ScalarField::constant(g, 0.01);
  IterateConfig cfg;
  cfg.t_final = 1.0;
  cfg.step.dt = 0.02;
  cfg.n_max = 3;
  cfg.stop_tol = 0.0;
  auto res = iterate_scheme(sigma, as_vector(wave(g, 1e-2, 1, true)), p, cfg);
  for (const auto& s : res.last.sigma) EXPECT_NEAR(s.mean(), 0.01, 1e-12);
}

TEST(Iterate, LargeDataFlaggedWithoutThrowing) {
  Grid g(1, 32, kTwoPi);
  auto p = AlignmentParams::make(1, 1.5);
  IterateConfig cfg;
  cfg.t_final = 3.0;
  cfg.step.dt = 0.01;
  cfg.n_max = 12;
  cfg.stop_tol = 0.0;
  cfg.step.cfl_max = 50.0;
  IterateResult res;
  ASSERT_NO_THROW(res = iterate_scheme(wave(g, 0.9, 1, false), as_vector(wave(g, 8.0, 1, true)), p, cfg));
  EXPECT_NE(res.status, IterateStatus::converged);
  EXPECT_NE(res.status, IterateStatus::max_iterations) << res.message;
  if (res.records.size() >= 3) {
    EXPECT_FALSE(cauchy_monitor(res.records).contraction);
  }
}

TEST(CauchyMonitor, IdenticalIteratesAreConverged) {
  std::vector<IterateRecord> recs(4);
  for (int n = 0; n < 4; ++n) recs[static_cast<std::size_t>(n)].n = n;
  recs[1].delta_u = 1e-3;
  recs[1].delta_sigma = 1e-3;
  recs[2].delta_u = recs[3].delta_u = 0.0;
  recs[2].delta_sigma = recs[3].delta_sigma = 0.0;
  auto c = cauchy_monitor(recs);
  EXPECT_TRUE(c.converged);
  EXPECT_TRUE(c.contraction);
  ASSERT_EQ(c.ratios_u.size(), 2u);
  EXPECT_EQ(c.ratios_u[0], 0.0);
  EXPECT_EQ(c.ratios_u[1], 0.0);
}

TEST(CauchyMonitor, GeometricFitRecoversRate) {
  std::vector<IterateRecord> recs(6);
  for (int n = 0; n < 6; ++n) {
    recs[static_cast<std::size_t>(n)].n = n;
    if (n > 0) recs[static_cast<std::size_t>(n)].delta_u = recs[static_cast<std::size_t>(n)].delta_sigma = std::pow(0.3, n);
  }
  auto c = cauchy_monitor(recs);
  ASSERT_TRUE(c.fitted_rate.has_value());
  EXPECT_NEAR(*c.fitted_rate, 0.3, 1e-12);
  for (double r : c.ratios_u) EXPECT_NEAR(r, 0.3, 1e-12);
}

TEST(CauchyMonitor, FloorSilencesRoundoffNoise) {
  std::vector<IterateRecord> recs(5);
  const double du[] = {0.0, 1e-3, 1e-7, 2e-16, 3e-16};
  for (int n = 0; n < 5; ++n) {
    recs[static_cast<std::size_t>(n)].n = n;
    recs[static_cast<std::size_t>(n)].delta_u = recs[static_cast<std::size_t>(n)].delta_sigma = du[n];
  }
  EXPECT_FALSE(cauchy_monitor(recs).contraction);
  auto c = cauchy_monitor(recs, 1e-14);
  EXPECT_TRUE(c.contraction);
  EXPECT_NEAR(c.raw_ratios_u.back(), 1.5, 1e-12);
  EXPECT_EQ(c.ratios_u.back(), 0.0);
}

TEST(CauchyMonitor, NeedsThreeIterates) {
  EXPECT_THROW(cauchy_monitor(std::vector<IterateRecord>(2)), DomainError);
}
