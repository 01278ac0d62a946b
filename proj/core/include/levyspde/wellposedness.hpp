#pragma once

#include "levyspde/coefficients.hpp"
#include "levyspde/estimates.hpp"
#include "levyspde/solver.hpp"
#include "levyspde/spaces.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace levyspde {

struct StudyOptions {
  int n_paths = 100;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct UniquenessResult {
  double max_sup_diff = 0.0;  ///< max over paths of sup_t |Y1 - Y2|_H
  double scale = 0.0;         ///< max over paths of sup_t |Y1|_H
  int n_paths = 0;
  bool stress = false;
  /// Stress mode only: difference above 1e-9 * (1 + scale).
  bool flagged = false;
};

/// Two solves per path on one realization. Default mode compares identical
/// runs; stress mode shuffles the order of jumps that share a step in the
/// second run. An optional second initial datum gives the perturbation study.
UniquenessResult pathwise_uniqueness_test(const CoefficientBundle& bundle, const GelfandTriple& triple,
                                          const Vector& x0, const SolverConfig& config, const StudyOptions& options,
                                          bool stress = false, const std::optional<Vector>& x0_b = std::nullopt);

struct StabilityResult {
  std::vector<double> times;
  std::vector<Summary> lhs_curve;  ///< E[phi(t) |Y_a(t) - Y_b(t)|_H^2]
  double bound = 0.0;              ///< |x0_a - x0_b|_H^2
  double eps_scheme = 0.0;         ///< 10 dt
  bool pass = false;
  double worst_t = 0.0;
  double margin = 0.0;  ///< min_t bound (1 + eps) - lhs(t)
  /// Per-path phi stayed in (0, 1] and nonincreasing.
  bool phi_valid = true;
};

/// phi(t) = exp(-int_0^t f + rho(Y_a) + eta(Y_b) ds) by left-Riemann sums.
StabilityResult weighted_stability_mc(const CoefficientBundle& bundle, const HypothesisConstants& constants,
                                      const GelfandTriple& triple, const Vector& x0_a, const Vector& x0_b,
                                      const SolverConfig& config, const StudyOptions& options);

struct DependenceResult {
  std::vector<double> deltas;
  std::vector<Summary> values;  ///< E sup_t |Y(x0 + delta d) - Y(x0)|_H^p
  double p = 2.0;
  std::optional<double> slope;  ///< log-log slope over delta > 0
  bool nonincreasing = false;   ///< as delta decreases, within CI
  bool strictly_decreasing = false;
  bool zero_at_zero = true;
};

/// Perturbs x0 along the unit vector `direction` (default e_1). When `admissible`
/// is given, p must lie in it.
DependenceResult continuous_dependence_study(const CoefficientBundle& bundle, const GelfandTriple& triple,
                                             const Vector& x0, const std::vector<double>& deltas, double p,
                                             const SolverConfig& config, const StudyOptions& options,
                                             const PRange* admissible = nullptr,
                                             const std::optional<Vector>& direction = std::nullopt);

struct ConvergenceResult {
  std::vector<int> levels;
  std::vector<Summary> distances;  ///< E |Y_m - Y_{m_max}|_{L^beta(0,T;H)}
  int reference_level = 0;
  double beta = 2.0;
  bool nonincreasing = false;  ///< within CI
};

/// Level m uses the first m Wiener modes of the realization sampled at the
/// finest level; jumps are shared. The finest level is the reference.
ConvergenceResult galerkin_convergence(const CoefficientBundle& bundle, const GelfandTriple& triple, const Vector& x0,
                                       std::vector<int> levels, const SolverConfig& config, double beta,
                                       const StudyOptions& options);

}  // namespace levyspde
