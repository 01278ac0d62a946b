#pragma once

#include "levyspde/coefficients.hpp"
#include "levyspde/noise.hpp"
#include "levyspde/solver.hpp"
#include "levyspde/spaces.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace levyspde {

inline constexpr double kZ99 = 2.5758293035489004;

/// Sample mean with the normal-approximation 99% half-width.
struct Summary {
  double mean = 0.0;
  double ci99 = 0.0;
  double median = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};
Summary summarize(std::vector<double> values);

struct EnergyStats {
  double p = 2.0;
  int level = 0;
  double dt = 0.0;
  int n_paths = 0;
  Summary sup_H_p;        ///< E sup_t |Y|_H^p over grid and jump entries
  Summary int_V_beta_p2;  ///< E (int_0^T |Y|_V^beta dt)^{p/2}
  Summary mixed;          ///< E int_0^T |Y|_V^beta |Y|_H^{p-2} dt
  Summary ratio;          ///< (sup + int) / (1 + |x0|_H^p), path by path
  int truncated_paths = 0;
};

struct EnergyOptions {
  std::vector<double> p_list{2.0};
  double beta = 2.0;
  int n_paths = 100;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// One EnergyStats per p, all computed from the same ensemble of paths.
std::vector<EnergyStats> energy_estimate_mc(const CoefficientBundle& bundle, const GelfandTriple& triple,
                                            const Vector& x0, const SolverConfig& config,
                                            const EnergyOptions& options);

struct ResidualSeries {
  std::vector<double> step_times;      ///< left endpoint of each step
  std::vector<double> step_residuals;  ///< per-step defect of the discrete energy identity
  std::vector<double> jump_times;
  std::vector<double> jump_residuals;  ///< |post|^2 - |pre|^2 - 2(g, pre) - |g|^2 per jump
  double summed() const;
};

/// Replays the discrete energy identity along a solved path. The realization
/// must be the one the record was produced with.
ResidualSeries discrete_energy_residual(const PathRecord& record, const CoefficientBundle& bundle,
                                        const NoiseRealization& realization);

struct ModulusTable {
  std::vector<double> deltas;
  std::vector<Summary> values;  ///< E int_0^{T-delta} |Y(t+delta) - Y(t)|_H^beta dt
  double beta = 2.0;
  /// Log-log slope of the table and of table^{1/beta} against delta.
  std::optional<double> slope_raw;
  std::optional<double> slope_normalized;
  /// Table nonincreasing toward 0 within CI as delta decreases. A diagnostic only.
  bool consistent_with_tightness = false;
};

ModulusTable modulus_of_continuity(const std::vector<PathRecord>& paths, const std::vector<double>& deltas,
                                   double beta);

/// Least-squares slope of log y against log x over pairs with x, y > 0.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace levyspde
