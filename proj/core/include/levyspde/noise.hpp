#pragma once

#include "levyspde/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace levyspde {

/// Atomic intensity measure lambda = sum_i weights[i] * delta_{marks[i]}.
struct MarkSpace {
  std::vector<double> marks;
  std::vector<double> weights;

  static MarkSpace none() { return {}; }
  static MarkSpace symmetric(double z, double intensity_each) { return {{z, -z}, {intensity_each, intensity_each}}; }

  std::size_t size() const noexcept { return marks.size(); }
  bool empty() const noexcept { return marks.empty(); }
  double total_intensity() const;
  /// sum_i lambda_i |z_i|^p
  double moment(double p) const;
  /// Throws InvalidArgument unless sizes agree and all weights are positive and finite.
  void validate() const;
};

struct JumpEvent {
  double time = 0.0;
  std::size_t mark = 0;
};

/// One sample of truncated Wiener increments and a Poisson jump list on [0, T].
struct NoiseRealization {
  Matrix wiener;  ///< steps x modes, N(0, dt) entries
  std::vector<JumpEvent> jumps;
  std::uint64_t seed = 0;
  double dt = 0.0;
  double horizon = 0.0;

  int steps() const noexcept { return static_cast<int>(wiener.rows()); }
  int modes() const noexcept { return static_cast<int>(wiener.cols()); }

  /// Jumps with time in (a, b].
  std::span<const JumpEvent> jumps_in(double a, double b) const;
  /// Sums Wiener increments over blocks of `factor` steps; jumps are shared.
  NoiseRealization coarsened(int factor) const;
  /// Keeps the first m Wiener modes.
  NoiseRealization prefix(int m) const;
};

/// Number of steps T/dt; throws unless dt divides T to 1e-12 relative.
int step_count(double T, double dt);

/// Exponential inter-arrival sampling with categorical marks.
std::vector<JumpEvent> sample_jumps(double T, const MarkSpace& marks, std::uint64_t seed);

/// Per-mode Wiener streams are derived from (seed, mode), so a realization at
/// level m is the prefix of one at any larger level.
Matrix sample_wiener(int m, int steps, double dt, std::uint64_t seed);

NoiseRealization sample_noise(int m, double T, double dt, const MarkSpace& marks, std::uint64_t seed);

/// Deterministic integrand zeta(t, z) with values in H_m.
using MarkIntegrand = std::function<Vector(double t, double z)>;

/// sum over events of zeta(tau_i, z_i) minus the left-endpoint compensator
/// sum_k dt sum_i lambda_i zeta(t_k, z_i).
Vector compensated_integral(const MarkIntegrand& integrand, const NoiseRealization& realization,
                            const MarkSpace& marks, double T);

struct IsometryResult {
  double lhs = 0.0;     ///< Monte Carlo mean of ||int int zeta d(pi - dt x lambda)||_H^2
  double rhs = 0.0;     ///< int_0^T sum_i lambda_i ||zeta(t, z_i)||_H^2 dt
  double rel_err = 0.0;
  double ci99 = 0.0;    ///< half-width of the 99% normal CI for lhs
  int n_paths = 0;
  bool within(double ci_multiple) const;
};

IsometryResult ito_isometry_check(const MarkIntegrand& integrand, const MarkSpace& marks, double T, double dt,
                                  int n_paths, std::uint64_t seed, int workers = 1);

/// JSON-lines dump: a header line, one line per Wiener step, one per jump event.
void write_jsonl(std::ostream& os, const NoiseRealization& realization);
NoiseRealization read_jsonl(std::istream& is);

}  // namespace levyspde
