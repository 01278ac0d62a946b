#include <gtest/gtest.h>

#include "levyspde/estimates.hpp"
#include "levyspde/models.hpp"
#include "levyspde/rng.hpp"

#include <cmath>

namespace levyspde {
namespace {

SolverConfig config(double dt, double T, int level) {
  SolverConfig c;
  c.dt = dt;
  c.T = T;
  c.level = level;
  return c;
}

TEST(Summary, KnownValues) {
  const auto s = summarize({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(s.ci99, kZ99 * std::sqrt(5.0 / 3.0) / 2.0);
  EXPECT_EQ(summarize({7, 1, 3}).median, 3.0);
}

TEST(LogLogSlope, PowerLaw) {
  const std::vector<double> x{0.1, 0.2, 0.4, 0.8};
  std::vector<double> y;
  for (double v : x) y.push_back(3 * v * v);
  EXPECT_NEAR(*loglog_slope(x, y), 2.0, 1e-12);
  EXPECT_FALSE(loglog_slope({1.0}, {1.0}).has_value());
}

TEST(Energy, ZeroModelClosedForm) {
  const auto spec = fixtures::zero_model(8);
  const int m = 6;
  EnergyOptions o;
  o.p_list = {2.0, 4.0};
  o.n_paths = 4;
  const auto stats = energy_estimate_mc(spec.bundle, spec.triple, spec.x0, config(0.01, 1, m), o);
  ASSERT_EQ(stats.size(), 2u);
  const Vector p = spec.triple.project(spec.x0, m).coeffs;
  const double h = spec.triple.h_norm(p), v = spec.triple.v_norm(p);
  for (const auto& s : stats) {
    EXPECT_NEAR(s.sup_H_p.mean, std::pow(h, s.p), 1e-14 * std::pow(h, s.p));
    EXPECT_EQ(s.sup_H_p.stddev, 0.0);
    const double iv = std::pow(std::pow(v, 2.0), s.p / 2);  // T = 1
    EXPECT_NEAR(s.int_V_beta_p2.mean, iv, 1e-12 * iv);
    EXPECT_EQ(s.truncated_paths, 0);
  }
}

TEST(Energy, DeterministicHeatSupAtStart) {
  const auto spec = builtin("heat", {{"c", 0.0}, {"sigma", 0.0}});
  EnergyOptions o;
  o.p_list = {2.0};
  o.n_paths = 2;
  const auto s = energy_estimate_mc(spec.bundle, spec.triple, spec.x0, config(1e-3, 1, 8), o).front();
  const double h0 = spec.triple.h_norm(spec.triple.project(spec.x0, 8).coeffs);
  EXPECT_NEAR(s.sup_H_p.mean, h0 * h0, 1e-14);
  // int_0^1 sum_j w_j x_j^2 e^{-2 w_j t} dt = sum_j x_j^2 (1 - e^{-2 w_j}) / 2
  double exact = 0.0;
  for (int j = 0; j < 8; ++j) {
    const double w = (j + 1.0) * (j + 1.0);
    exact += spec.x0[j] * spec.x0[j] * (1 - std::exp(-2 * w)) / 2;
  }
  EXPECT_NEAR(s.int_V_beta_p2.mean, exact, 10 * 1e-3 * exact);
}

TEST(Energy, RejectsSingleEnsemble) {
  const auto spec = fixtures::zero_model(4);
  EnergyOptions o;
  o.n_paths = 1;
  EXPECT_THROW(energy_estimate_mc(spec.bundle, spec.triple, spec.x0, config(0.1, 1, 4), o), InvalidArgument);
}

TEST(Energy, ConfidenceShrinksWithEnsembleSize) {
  const auto spec = builtin("heat");
  EnergyOptions o;
  o.p_list = {2.0};
  o.n_paths = 200;
  const auto a = energy_estimate_mc(spec.bundle, spec.triple, spec.x0, config(0.01, 1, 4), o).front();
  o.n_paths = 800;
  o.seed = 1;
  const auto b = energy_estimate_mc(spec.bundle, spec.triple, spec.x0, config(0.01, 1, 4), o).front();
  EXPECT_NEAR(a.sup_H_p.ci99 / b.sup_H_p.ci99, 2.0, 0.5);
  // disjoint seeds agree within the combined CI
  EXPECT_LE(std::abs(a.sup_H_p.mean - b.sup_H_p.mean), a.sup_H_p.ci99 + b.sup_H_p.ci99);
}

TEST(Energy, WorkerCountInvariant) {
  const auto spec = builtin("allen_cahn");
  EnergyOptions o;
  o.p_list = {2.0, 4.0};
  o.n_paths = 16;
  o.workers = 1;
  const auto a = energy_estimate_mc(spec.bundle, spec.triple, spec.x0, config(0.01, 1, 8), o);
  o.workers = 4;
  const auto b = energy_estimate_mc(spec.bundle, spec.triple, spec.x0, config(0.01, 1, 8), o);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sup_H_p.mean, b[i].sup_H_p.mean);
    EXPECT_EQ(a[i].mixed.mean, b[i].mixed.mean);
    EXPECT_EQ(a[i].ratio.ci99, b[i].ratio.ci99);
  }
}

TEST(Energy, SupDominatesEndpoint) {
  const auto spec = builtin("heat");
  for (int i = 0; i < 20; ++i) {
    const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, config(0.01, 1, 8), derive_seed(0, "sup", i));
    double sup = 0.0;
    for (const auto& e : rec.entries) sup = std::max(sup, e.norm_h);
    EXPECT_GE(sup, rec.final_entry().norm_h);
  }
}

TEST(Residual, ZeroModelIsExactlyZero) {
  const auto spec = fixtures::zero_model(4);
  for (double dt : {0.1, 0.01, 0.003}) {
    const auto noise = sample_noise(4, 0.3, dt, {}, 2);
    const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, config(dt, 0.3, 4), noise);
    const auto r = discrete_energy_residual(rec, spec.bundle, noise);
    for (double v : r.step_residuals) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(r.summed(), 0.0);
  }
}

TEST(Residual, ConstantJumpAlgebraicIdentity) {
  const auto spec = fixtures::constant_jump(4);
  auto marks = spec.bundle.mark_space;
  const double dt = std::ldexp(1.0, -7);
  int total = 0;
  for (int i = 0; i < 20; ++i) {
    const auto noise = sample_noise(4, 1.0, dt, marks, derive_seed(4, "cj", i));
    const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, config(dt, 1, 4), noise);
    const auto r = discrete_energy_residual(rec, spec.bundle, noise);
    ASSERT_EQ(r.jump_residuals.size(), noise.jumps.size());
    for (double v : r.jump_residuals) EXPECT_EQ(v, 0.0);
    total += static_cast<int>(r.jump_residuals.size());
  }
  EXPECT_GT(total, 0);
}

TEST(Residual, MismatchedRealizationIsConsistencyError) {
  const auto spec = builtin("heat");
  const auto a = sample_noise(8, 1.0, 0.01, spec.bundle.mark_space, 1);
  const auto b = sample_noise(8, 1.0, 0.01, spec.bundle.mark_space, 2);
  const auto c = sample_noise(8, 1.0, 0.02, spec.bundle.mark_space, 1);
  const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, config(0.01, 1, 8), a);
  EXPECT_NO_THROW(discrete_energy_residual(rec, spec.bundle, a));
  EXPECT_THROW(discrete_energy_residual(rec, spec.bundle, b), ConsistencyError);
  EXPECT_THROW(discrete_energy_residual(rec, spec.bundle, c), ConsistencyError);
}

PathRecord line_path(double dt, double T) {
  PathRecord r;
  r.dt = dt;
  r.T = T;
  r.level = 1;
  const int K = static_cast<int>(std::lround(T / dt));
  for (int k = 0; k <= K; ++k) {
    const double t = k * dt;
    r.entries.push_back({t, EntryKind::Grid, Vector::Constant(1, t), t, t});
  }
  return r;
}

TEST(Modulus, ConstantPathsVanish) {
  const auto spec = fixtures::zero_model(3);
  std::vector<PathRecord> paths;
  for (int i = 0; i < 3; ++i) paths.push_back(solve_path(spec.bundle, spec.triple, spec.x0, config(0.01, 1, 3), i));
  const auto t = modulus_of_continuity(paths, {0.01, 0.05, 0.2}, 2.0);
  for (const auto& v : t.values) EXPECT_EQ(v.mean, 0.0);
}

TEST(Modulus, LipschitzPathClosedForm) {
  const double dt = 1.0 / 64, T = 1.0;
  const std::vector<PathRecord> paths{line_path(dt, T), line_path(dt, T)};
  std::vector<double> deltas{dt, 4 * dt, 16 * dt, 0.5};
  const auto t = modulus_of_continuity(paths, deltas, 2.0);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double d = deltas[i];
    EXPECT_NEAR(t.values[i].mean, d * d * (T - d), 1e-12);
  }
  EXPECT_TRUE(t.consistent_with_tightness);
  EXPECT_NEAR(*t.slope_normalized, 1.0, 0.2);
}

TEST(Modulus, DeltaMustBeGridMultiple) {
  const std::vector<PathRecord> paths{line_path(0.01, 1.0)};
  EXPECT_THROW(modulus_of_continuity(paths, {0.015}, 2.0), InvalidArgument);
}

}  // namespace
}  // namespace levyspde
