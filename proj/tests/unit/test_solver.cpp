#include <gtest/gtest.h>

#include "levyspde/models.hpp"
#include "levyspde/rng.hpp"
#include "levyspde/solver.hpp"

#include <nlohmann/json.hpp>

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

TEST(Step, ZeroDynamicsLeaveStateUnchanged) {
  const auto spec = fixtures::zero_model(4);
  Vector x(4);
  x << 1, -2, 3, 0.5;
  const auto r = step(x, 0.0, 0.1, spec.bundle, spec.triple, Vector::Constant(4, 0.3), {}, config(0.1, 1, 4));
  EXPECT_EQ(r.state, x);
}

TEST(Step, BackwardEulerScalar) {
  const double mu = 2.0, dt = 0.01;
  const auto spec = fixtures::scalar_linear(mu, 0.0);
  const Vector x = Vector::Constant(1, 0.8);
  const auto r = step(x, 0.0, dt, spec.bundle, spec.triple, Vector::Zero(1), {}, config(dt, 1, 1));
  EXPECT_NEAR(r.state[0], 0.8 / (1 + mu * dt), 1e-15);
}

TEST(Step, ImplicitSolveMatchesClosedFormWithoutShortcut) {
  auto spec = fixtures::scalar_linear(3.0, 0.0);
  spec.bundle.drift_is_linear_diagonal = false;
  spec.bundle.stiff_diagonal = nullptr;
  spec.bundle.drift_jacobian = nullptr;
  const Vector x = Vector::Constant(1, -1.25);
  const Vector y = implicit_drift_solve(spec.bundle, 0.0, x, 0.05, config(0.05, 1, 1));
  EXPECT_NEAR(y[0], -1.25 / 1.15, 1e-10);
}

TEST(Step, ConstantJumpWithCompensator) {
  const auto spec = fixtures::constant_jump(4);
  const double dt = 0.125;
  const Vector x = Vector::Zero(4);
  const Vector g = spec.bundle.eval_jump(0.0, x, 1.0);
  const std::vector<JumpEvent> jumps{{0.05, 0}};
  const auto r = step(x, 0.0, dt, spec.bundle, spec.triple, Vector::Zero(4), jumps, config(dt, 1, 4));
  const double total = spec.bundle.mark_space.total_intensity();
  EXPECT_EQ(r.state, x + g - dt * total * g);
  ASSERT_EQ(r.jumps.size(), 1u);
  EXPECT_EQ(std::get<2>(r.jumps[0]) - std::get<1>(r.jumps[0]), g);
}

TEST(Step, TamedDriftFormula) {
  const auto spec = builtin("heat", {{"c", 0.0}, {"sigma", 0.0}});
  const Vector x = spec.triple.project(spec.x0, 8).coeffs;
  auto cfg = config(0.01, 1, 8);
  cfg.scheme = Scheme::TamedExplicit;
  const auto r = step(x, 0.0, 0.01, spec.bundle, spec.triple, Vector::Zero(8), {}, cfg);
  const Vector A = spec.bundle.eval_drift(0.0, x);
  const Vector expect = x + 0.01 * A / (1.0 + 0.01 * spec.triple.vstar_norm(A));
  EXPECT_LT((r.state - expect).norm(), 1e-15);
}

TEST(SolvePath, ZeroModelIsConstant) {
  const auto spec = fixtures::zero_model(4);
  const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, config(0.01, 1, 3), 5);
  const Vector p = spec.triple.project(spec.x0, 3).coeffs;
  for (const auto& e : rec.entries) EXPECT_EQ(e.coeffs, p);
  EXPECT_EQ(rec.entries.front().time, 0.0);
  EXPECT_NEAR(rec.final_entry().time, 1.0, 1e-12);
}

TEST(SolvePath, DeterministicHeatBackwardEulerPerMode) {
  const auto spec = builtin("heat", {{"c", 0.0}, {"sigma", 0.0}});
  const double dt = 1e-3;
  const int m = 8;
  const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, config(dt, 1, m), 1);
  const auto grid = rec.grid_indices();
  ASSERT_EQ(grid.size(), 1001u);
  double prev = INFINITY;
  for (std::size_t k = 0; k < grid.size(); k += 100) {
    const auto& e = rec.entries[grid[k]];
    for (int j = 0; j < m; ++j) {
      const double w = (j + 1.0) * (j + 1.0);
      const double be = spec.x0[j] * std::pow(1.0 + w * dt, -static_cast<double>(k));
      const double exact = spec.x0[j] * std::exp(-w * e.time);
      EXPECT_NEAR(e.coeffs[j], be, 1e-13);
      EXPECT_NEAR(e.coeffs[j], exact, 10 * dt * std::abs(spec.x0[j]));
    }
    EXPECT_LE(e.norm_h, prev);
    prev = e.norm_h;
  }
}

TEST(SolvePath, SymmetricMarkJumpsReplay) {
  const auto spec = fixtures::mark_jump(2);
  const auto cfg = config(0.01, 2, 2);
  const auto noise = sample_noise(2, 2.0, 0.01, spec.bundle.mark_space, 31);
  const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, cfg, noise);
  double up = 0, down = 0;
  for (const auto& j : noise.jumps) (spec.bundle.mark_space.marks[j.mark] > 0 ? up : down) += 1;
  ASSERT_GT(up + down, 0);
  EXPECT_EQ(rec.final_entry().coeffs[0], spec.x0[0] + up - down);
  EXPECT_EQ(rec.jump_count(), noise.jumps.size());
}

TEST(SolvePath, CadlagEntriesReplayJumpCoefficient) {
  const auto spec = builtin("heat", {{"sigma", 0.5}});
  auto marks = spec.bundle.mark_space;
  auto bundle = spec.bundle;
  marks.weights = {4.0, 4.0};
  bundle.mark_space = marks;
  const auto noise = sample_noise(8, 1.0, 0.01, marks, 13);
  const auto rec = solve_path(bundle, spec.triple, spec.x0, config(0.01, 1, 8), noise);
  ASSERT_EQ(rec.jump_count(), noise.jumps.size());
  std::size_t seen = 0;
  for (std::size_t i = 0; i < rec.entries.size(); ++i) {
    const auto& e = rec.entries[i];
    if (e.kind != EntryKind::JumpPost) continue;
    const auto& pre = rec.entries[i - 1];
    ASSERT_EQ(pre.kind, EntryKind::JumpPre);
    EXPECT_EQ(pre.time, e.time);
    const auto& ev = noise.jumps[seen++];
    EXPECT_EQ(e.time, ev.time);
    const Vector g = bundle.eval_jump(ev.time, pre.coeffs, marks.marks[ev.mark]);
    EXPECT_EQ(e.coeffs, pre.coeffs + g);
    EXPECT_EQ(e.norm_h, spec.triple.h_norm(e.coeffs));
    EXPECT_EQ(e.norm_v, spec.triple.v_norm(e.coeffs));
  }
  // times are nondecreasing and repeat only at jumps
  for (std::size_t i = 1; i < rec.entries.size(); ++i) {
    if (rec.entries[i].kind == EntryKind::JumpPost)
      EXPECT_EQ(rec.entries[i].time, rec.entries[i - 1].time);
    else
      EXPECT_GT(rec.entries[i].time, rec.entries[i - 1].time);
  }
}

TEST(SolvePath, LinearInInitialDatum) {
  const auto spec = builtin("heat", {{"c", 0.0}, {"sigma", 0.0}});
  const auto cfg = config(0.01, 1, 8);
  const auto a = solve_path(spec.bundle, spec.triple, spec.x0, cfg, 0);
  const auto b = solve_path(spec.bundle, spec.triple, Vector(2.0 * spec.x0), cfg, 0);
  const auto c = solve_path(spec.bundle, spec.triple, Vector(3.0 * spec.x0), cfg, 0);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(b.entries[i].coeffs, 2.0 * a.entries[i].coeffs);
    EXPECT_LT((c.entries[i].coeffs - 3.0 * a.entries[i].coeffs).norm(), 1e-14);
  }
}

TEST(SolvePath, StrongOrderOneForAdditiveLinear) {
  const auto spec = fixtures::scalar_linear(1.0, 1.0);
  const double T = 1.0;
  const double fine = std::ldexp(1.0, -12);
  const int n = 400;
  std::vector<double> dts, errs;
  for (int lev = 4; lev <= 7; ++lev) {
    const double dt = std::ldexp(1.0, -lev);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto noise = sample_noise(1, T, fine, {}, derive_seed(2, "strong", i));
      const auto ref = solve_path(spec.bundle, spec.triple, spec.x0, config(fine, T, 1), noise);
      const auto coarse = noise.coarsened(static_cast<int>(std::lround(dt / fine)));
      const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, config(dt, T, 1), coarse);
      err += std::abs(rec.final_entry().coeffs[0] - ref.final_entry().coeffs[0]);
    }
    dts.push_back(std::log2(dt));
    errs.push_back(std::log2(err / n));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) mx += dts[i], my += errs[i];
  mx /= dts.size(), my /= dts.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) sxy += (dts[i] - mx) * (errs[i] - my), sxx += (dts[i] - mx) * (dts[i] - mx);
  const double slope = sxy / sxx;
  EXPECT_GE(slope, 0.8);
  EXPECT_LE(slope, 1.2);
}

TEST(SolvePath, StepFailureTruncatesRecord) {
  ModelSpec spec("blowup", GelfandTriple::dirichlet_sine(1));
  // y = x + dt (1e6 + y^2) has no real root for dt = 0.1
  spec.bundle.drift = [](double, const Vector& u) { return Vector(Vector::Constant(1, 1e6) + u.cwiseProduct(u)); };
  auto cfg = config(0.1, 1, 1);
  cfg.newton_max_iter = 20;
  const auto rec = solve_path(spec.bundle, spec.triple, Vector::Zero(1), cfg, 0);
  EXPECT_TRUE(rec.truncated);
  ASSERT_TRUE(rec.failure_time.has_value());
  EXPECT_EQ(*rec.failure_time, 0.0);
  EXPECT_FALSE(rec.failure.empty());
}

TEST(SolvePath, GridMismatchIsConsistencyError) {
  const auto spec = fixtures::zero_model(4);
  const auto noise = sample_noise(4, 1.0, 0.01, {}, 0);
  EXPECT_THROW(solve_path(spec.bundle, spec.triple, spec.x0, config(0.02, 1, 4), noise), ConsistencyError);
  const auto heat = builtin("heat");
  EXPECT_THROW(solve_path(heat.bundle, heat.triple, heat.x0, config(0.01, 1, 8), noise), ConsistencyError);
}

TEST(SolverConfig, Validation) {
  EXPECT_THROW(config(0.0, 1, 1).validate(), InvalidArgument);
  EXPECT_THROW(config(2.0, 1, 1).validate(), InvalidArgument);
  EXPECT_THROW(config(0.1, 1, 0).validate(), InvalidArgument);
  EXPECT_NO_THROW(config(0.1, 1, 1).validate());
  auto c = config(0.25, 2, 3);
  c.scheme = Scheme::TamedExplicit;
  const auto back = solver_config_from_json(to_json(c));
  EXPECT_EQ(back.scheme, Scheme::TamedExplicit);
  EXPECT_EQ(back.dt, 0.25);
  EXPECT_EQ(back.level, 3);
  EXPECT_THROW(scheme_from_string("rk4"), InvalidArgument);
}

PathRecord hand_record(const std::vector<double>& h, const std::vector<double>& v, double dt) {
  PathRecord r;
  r.dt = dt;
  r.T = dt * static_cast<double>(h.size() - 1);
  r.level = 1;
  for (std::size_t k = 0; k < h.size(); ++k)
    r.entries.push_back({dt * static_cast<double>(k), EntryKind::Grid, Vector::Constant(1, h[k]), h[k], v[k]});
  return r;
}

TEST(Stopping, VoidSetGivesHorizon) {
  const auto r = hand_record({1, 1, 1, 1}, {1, 1, 1, 1}, 0.25);
  const auto [out, tau] = apply_stopping(r, {100.0}, 2.0);
  EXPECT_EQ(tau, r.T);
  EXPECT_EQ(out.entries.size(), r.entries.size());
  EXPECT_FALSE(out.stopped_at.has_value());
}

TEST(Stopping, DirectThresholdCrossing) {
  const double N = 3.0;
  const auto r = hand_record({1, 1, std::sqrt(N + 1), 1, 1}, {0, 0, 0, 0, 0}, 0.25);
  const auto [out, tau] = apply_stopping(r, {N}, 2.0);
  EXPECT_EQ(tau, 0.5);
  EXPECT_EQ(out.entries.size(), 3u);
  EXPECT_EQ(*out.stopped_at, 0.5);
}

TEST(Stopping, IntegralCrossingDetectedAtNextGridTime) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
  const double dt = 0.1, beta = 2.0, N = 5.0;
  const auto r = hand_record(std::vector<double>(8, 0.1), v, dt);
  double running = 0.0;
  std::size_t k_cross = 0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    running += dt * std::pow(v[k], beta);
    if (running > N) {
      k_cross = k + 1;
      break;
    }
  }
  ASSERT_GT(k_cross, 0u);
  const auto [out, tau] = apply_stopping(r, {N}, beta);
  EXPECT_NEAR(tau, dt * static_cast<double>(k_cross), 1e-15);
  EXPECT_EQ(out.entries.size(), k_cross + 1);
}

}  // namespace
}  // namespace levyspde
