#pragma once

#include "levyspde/coefficients.hpp"
#include "levyspde/noise.hpp"
#include "levyspde/spaces.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace levyspde {

enum class Scheme { DriftImplicit, TamedExplicit };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverConfig {
  Scheme scheme = Scheme::DriftImplicit;
  double dt = 1e-3;
  double T = 1.0;
  int level = 8;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  /// Retry a failed drift solve once as two half steps.
  bool retry_half_step = true;
  /// Stress mode: jumps sharing a step are applied in a shuffled order.
  bool shuffle_jumps = false;

  int steps() const { return step_count(T, dt); }
  void validate() const;
};

enum class EntryKind { Grid, JumpPre, JumpPost };

struct PathEntry {
  double time = 0.0;
  EntryKind kind = EntryKind::Grid;
  Vector coeffs;
  double norm_h = 0.0;
  double norm_v = 0.0;
};

/// Cadlag trajectory: grid entries at k*dt, and each jump time twice (pre, post).
struct PathRecord {
  std::vector<PathEntry> entries;
  std::optional<double> stopped_at;
  bool truncated = false;  ///< a step failure ended the path early
  std::optional<double> failure_time;
  std::string failure;
  std::uint64_t seed = 0;
  double dt = 0.0;
  double T = 0.0;
  int level = 0;

  std::size_t jump_count() const;
  const PathEntry& final_entry() const { return entries.back(); }
  /// Indices of grid entries in time order.
  std::vector<std::size_t> grid_indices() const;
  Vector grid_times() const;
};

/// Solves y = x + dt A(t, y) for the drift-implicit scheme.
/// Throws StepFailure when the solve does not reach tol(1 + |x|_H).
Vector implicit_drift_solve(const CoefficientBundle& bundle, double t, const Vector& x, double dt,
                            const SolverConfig& config);

struct StepResult {
  Vector state;
  /// (time, pre, post) for each applied jump, in application order.
  std::vector<std::tuple<double, Vector, Vector>> jumps;
};

/// One step on (t, t + dt]: drift, then B(t,x) dW, then jumps in time order,
/// then the compensator dt * sum_i lambda_i gamma(t, x, z_i).
StepResult step(const Vector& x, double t, double dt, const CoefficientBundle& bundle, const GelfandTriple& triple,
                const Vector& dW,
                std::span<const JumpEvent> jumps, const SolverConfig& config, std::uint64_t shuffle_seed = 0,
                std::size_t step_index = 0);

/// Simulates with a caller-supplied realization (its first `level` Wiener modes are used).
PathRecord solve_path(const CoefficientBundle& bundle, const GelfandTriple& triple, const Vector& x0,
                      const SolverConfig& config, const NoiseRealization& noise);

/// Samples the realization from `seed` and simulates.
PathRecord solve_path(const CoefficientBundle& bundle, const GelfandTriple& triple, const Vector& x0,
                      const SolverConfig& config, std::uint64_t seed);

struct StoppingRule {
  double N = 1.0;
};

/// tau = first grid time with |Y|_H^2 > N or left-Riemann int |Y|_V^beta > N, else T.
std::pair<PathRecord, double> apply_stopping(const PathRecord& record, const StoppingRule& rule, double beta);

nlohmann::json to_json(const SolverConfig& config);
SolverConfig solver_config_from_json(const nlohmann::json& j);

}  // namespace levyspde
