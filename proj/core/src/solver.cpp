#include "levyspde/solver.hpp"
#include "levyspde/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levyspde {

std::string to_string(Scheme s) { return s == Scheme::DriftImplicit ? "drift_implicit" : "tamed_explicit"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "drift_implicit") return Scheme::DriftImplicit;
  if (s == "tamed_explicit") return Scheme::TamedExplicit;
  throw InvalidArgument("unknown scheme '" + s + "'");
}

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !(T > 0.0)) throw InvalidArgument("dt and T must be positive");
  if (!(dt < T) && std::abs(dt - T) > 1e-12 * T) throw InvalidArgument("dt must not exceed T");
  if (level < 1) throw InvalidArgument("level must be >= 1");
  if (!(newton_tol > 0.0)) throw InvalidArgument("newton_tol must be positive");
  if (newton_max_iter < 1) throw InvalidArgument("newton_max_iter must be >= 1");
  (void)steps();
}

std::size_t PathRecord::jump_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const PathEntry& e) { return e.kind == EntryKind::JumpPost; }));
}

std::vector<std::size_t> PathRecord::grid_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].kind == EntryKind::Grid) idx.push_back(i);
  return idx;
}

Vector PathRecord::grid_times() const {
  const auto idx = grid_indices();
  Vector t(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) t[static_cast<Eigen::Index>(i)] = entries[idx[i]].time;
  return t;
}

namespace {

Vector residual(const CoefficientBundle& b, double t, const Vector& x, const Vector& y, double dt) {
  return y - x - dt * b.eval_drift(t, y);
}

Matrix drift_jacobian(const CoefficientBundle& b, double t, const Vector& y) {
  if (b.drift_jacobian) return b.drift_jacobian(t, y);
  const Eigen::Index m = y.size();
  Matrix J(m, m);
  const Vector base = b.eval_drift(t, y);
  Vector yp = y;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double h = 1e-7 * std::max(1.0, std::abs(y[j]));
    yp[j] = y[j] + h;
    J.col(j) = (b.eval_drift(t, yp) - base) / h;
    yp[j] = y[j];
  }
  return J;
}

}  // namespace

Vector implicit_drift_solve(const CoefficientBundle& b, double t, const Vector& x, double dt, const SolverConfig& cfg) {
  const double tol = cfg.newton_tol * (1.0 + x.norm());
  const auto m = static_cast<std::size_t>(x.size());

  if (b.drift_is_linear_diagonal && b.stiff_diagonal) {
    const Vector d = b.stiff_diagonal(m);
    return (x.array() / (1.0 - dt * d.array())).matrix();
  }

  Vector y = x;
  Vector r = residual(b, t, x, y, dt);
  double rn = r.norm();
  int iters = 0;
  if (rn < tol) return y;

  if (b.stiff_diagonal) {
    // y <- (x + dt N(y)) / (1 - dt D) with A = D + N.
    const Eigen::ArrayXd d = b.stiff_diagonal(m).array();
    const Eigen::ArrayXd denom = 1.0 - dt * d;
    int stalls = 0;
    while (iters < cfg.newton_max_iter) {
      ++iters;
      const Vector a = b.eval_drift(t, y);
      const Vector n = a - (d * y.array()).matrix();
      const Vector next = ((x + dt * n).array() / denom).matrix();
      const Vector rnext = residual(b, t, x, next, dt);
      const double rnn = rnext.norm();
      if (!std::isfinite(rnn)) break;
      stalls = rnn > 0.5 * rn ? stalls + 1 : 0;
      y = next;
      r = rnext;
      rn = rnn;
      if (rn < tol) return y;
      if (stalls >= 2) break;
    }
  }

  // Damped Newton.
  while (iters < cfg.newton_max_iter) {
    ++iters;
    const Matrix J = Matrix::Identity(x.size(), x.size()) - dt * drift_jacobian(b, t, y);
    const Vector delta = J.partialPivLu().solve(-r);
    double damping = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k) {
      const Vector cand = y + damping * delta;
      const Vector rc = residual(b, t, x, cand, dt);
      const double rcn = rc.norm();
      if (std::isfinite(rcn) && rcn < rn) {
        y = cand;
        r = rc;
        rn = rcn;
        accepted = true;
        break;
      }
      damping *= 0.5;
    }
    if (rn < tol) return y;
    if (!accepted) break;
  }
  throw StepFailure("implicit drift solve did not converge", rn, iters);
}

StepResult step(const Vector& x, double t, double dt, const CoefficientBundle& b, const GelfandTriple& triple,
                const Vector& dW,
                std::span<const JumpEvent> jumps, const SolverConfig& cfg, std::uint64_t shuffle_seed,
                std::size_t step_index) {
  StepResult out;
  Vector y;
  if (cfg.scheme == Scheme::TamedExplicit) {
    const Vector a = b.eval_drift(t, x);
    y = x + dt * a / (1.0 + dt * triple.vstar_norm(a));
  } else {
    try {
      y = implicit_drift_solve(b, t + dt, x, dt, cfg);
    } catch (const StepFailure&) {
      if (!cfg.retry_half_step) throw;
      const Vector half = implicit_drift_solve(b, t + 0.5 * dt, x, 0.5 * dt, cfg);
      y = implicit_drift_solve(b, t + dt, half, 0.5 * dt, cfg);
    }
  }

  if (b.has_diffusion()) y += b.eval_diffusion(t, x) * dW;

  if (b.has_jump()) {
    std::vector<JumpEvent> order(jumps.begin(), jumps.end());
    if (cfg.shuffle_jumps && order.size() > 1) {
      Engine eng = make_engine(shuffle_seed, "stress-shuffle", step_index);
      std::shuffle(order.begin(), order.end(), eng);
    }
    for (const auto& ev : order) {
      Vector pre = y;
      y = pre + b.eval_jump(ev.time, pre, b.mark_space.marks[ev.mark]);
      out.jumps.emplace_back(ev.time, std::move(pre), y);
    }
    Vector comp = Vector::Zero(x.size());
    for (std::size_t i = 0; i < b.mark_space.size(); ++i)
      comp += b.mark_space.weights[i] * b.eval_jump(t, x, b.mark_space.marks[i]);
    y -= dt * comp;
  }
  out.state = std::move(y);
  return out;
}

PathRecord solve_path(const CoefficientBundle& b, const GelfandTriple& triple, const Vector& x0,
                      const SolverConfig& cfg, const NoiseRealization& noise) {
  cfg.validate();
  const int m = cfg.level;
  const int steps = cfg.steps();
  if (noise.steps() != steps || std::abs(noise.dt - cfg.dt) > 1e-15 * cfg.dt)
    throw ConsistencyError("noise realization grid does not match the solver grid");
  if (b.has_diffusion() && noise.modes() < m) throw ConsistencyError("noise realization has fewer Wiener modes than the level");

  PathRecord rec;
  rec.seed = noise.seed;
  rec.dt = cfg.dt;
  rec.T = cfg.T;
  rec.level = m;
  auto push = [&](double time, EntryKind kind, Vector v) {
    PathEntry e{time, kind, std::move(v), 0.0, 0.0};
    e.norm_h = e.coeffs.norm();
    e.norm_v = b.eval_v_norm(triple, e.coeffs);
    rec.entries.push_back(std::move(e));
  };

  Vector x = triple.project(x0, m).coeffs;
  push(0.0, EntryKind::Grid, x);
  const Vector no_dw = Vector::Zero(m);
  for (int k = 0; k < steps; ++k) {
    const double t = k * cfg.dt;
    const double t1 = (k + 1) * cfg.dt;
    const Vector dW = b.has_diffusion() ? Vector(noise.wiener.row(k).head(m).transpose()) : no_dw;
    StepResult res;
    try {
      res = step(x, t, cfg.dt, b, triple, dW, noise.jumps_in(t, t1), cfg, noise.seed, static_cast<std::size_t>(k));
    } catch (const StepFailure& e) {
      rec.truncated = true;
      rec.failure_time = t;
      rec.failure = std::string(e.what()) + " (residual " + std::to_string(e.residual()) + ")";
      return rec;
    }
    for (auto& [tau, pre, post] : res.jumps) {
      push(tau, EntryKind::JumpPre, std::move(pre));
      push(tau, EntryKind::JumpPost, std::move(post));
    }
    x = std::move(res.state);
    if (!all_finite(x)) {
      rec.truncated = true;
      rec.failure_time = t1;
      rec.failure = "state became non-finite";
      return rec;
    }
    push(t1, EntryKind::Grid, x);
  }
  return rec;
}

PathRecord solve_path(const CoefficientBundle& b, const GelfandTriple& triple, const Vector& x0,
                      const SolverConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return solve_path(b, triple, x0, cfg, sample_noise(cfg.level, cfg.T, cfg.dt, b.mark_space, seed));
}

std::pair<PathRecord, double> apply_stopping(const PathRecord& record, const StoppingRule& rule, double beta) {
  if (!(rule.N > 0.0)) throw InvalidArgument("stopping threshold N must be positive");
  const auto grid = record.grid_indices();
  double integral = 0.0;
  std::optional<std::size_t> stop;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& e = record.entries[grid[k]];
    if (e.norm_h * e.norm_h > rule.N || integral > rule.N) {
      stop = grid[k];
      break;
    }
    if (k + 1 < grid.size()) integral += (record.entries[grid[k + 1]].time - e.time) * std::pow(e.norm_v, beta);
  }
  PathRecord out = record;
  if (!stop) return {out, record.T};
  const double tau = record.entries[*stop].time;
  out.entries.resize(*stop + 1);
  out.stopped_at = tau;
  return {out, tau};
}

nlohmann::json to_json(const SolverConfig& c) {
  return {{"scheme", to_string(c.scheme)},
          {"dt", c.dt},
          {"T", c.T},
          {"level", c.level},
          {"newton_tol", c.newton_tol},
          {"newton_max_iter", c.newton_max_iter},
          {"shuffle_jumps", c.shuffle_jumps}};
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  c.dt = j.value("dt", c.dt);
  c.T = j.value("T", c.T);
  c.level = j.value("level", c.level);
  c.newton_tol = j.value("newton_tol", c.newton_tol);
  c.newton_max_iter = j.value("newton_max_iter", c.newton_max_iter);
  c.shuffle_jumps = j.value("shuffle_jumps", c.shuffle_jumps);
  return c;
}

}  // namespace levyspde
