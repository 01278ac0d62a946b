#include "levyspde/estimates.hpp"
#include "levyspde/parallel.hpp"
#include "levyspde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levyspde {

Summary summarize(std::vector<double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.ci99 = kZ99 * s.stddev / std::sqrt(static_cast<double>(s.n));
  }
  std::sort(values.begin(), values.end());
  const std::size_t h = s.n / 2;
  s.median = s.n % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
  return s;
}

namespace {

struct PathFunctionals {
  std::vector<double> sup_p, int_p2, mixed;
  bool truncated = false;
};

}  // namespace

std::vector<EnergyStats> energy_estimate_mc(const CoefficientBundle& bundle, const GelfandTriple& triple,
                                            const Vector& x0, const SolverConfig& config, const EnergyOptions& o) {
  if (o.n_paths < 2) throw InvalidArgument("n_paths must be >= 2");
  for (double p : o.p_list)
    if (p < 2.0) throw InvalidArgument("energy estimates need p >= 2");
  config.validate();
  const auto np = o.p_list.size();

  auto per_path = [&](std::size_t i) {
    const auto rec = solve_path(bundle, triple, x0, config, derive_seed(o.seed, "energy-path", i));
    PathFunctionals out;
    out.truncated = rec.truncated;
    out.sup_p.assign(np, 0.0);
    out.int_p2.assign(np, 0.0);
    out.mixed.assign(np, 0.0);
    double sup_h = 0.0;
    for (const auto& e : rec.entries) sup_h = std::max(sup_h, e.norm_h);
    const auto grid = rec.grid_indices();
    double int_v = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const auto& e = rec.entries[grid[k]];
      const double dt = rec.entries[grid[k + 1]].time - e.time;
      const double vb = std::pow(e.norm_v, o.beta);
      int_v += dt * vb;
      for (std::size_t q = 0; q < np; ++q) out.mixed[q] += dt * vb * std::pow(e.norm_h, o.p_list[q] - 2.0);
    }
    for (std::size_t q = 0; q < np; ++q) {
      out.sup_p[q] = std::pow(sup_h, o.p_list[q]);
      out.int_p2[q] = std::pow(int_v, o.p_list[q] / 2.0);
    }
    return out;
  };
  const auto results = parallel_map(static_cast<std::size_t>(o.n_paths), o.workers, per_path);

  std::vector<EnergyStats> stats;
  const double x0n = x0.norm();
  for (std::size_t q = 0; q < np; ++q) {
    EnergyStats s;
    s.p = o.p_list[q];
    s.level = config.level;
    s.dt = config.dt;
    std::vector<double> a, b, c, r;
    const double denom = 1.0 + std::pow(x0n, s.p);
    for (const auto& f : results) {
      if (f.truncated) {
        ++s.truncated_paths;
        continue;
      }
      a.push_back(f.sup_p[q]);
      b.push_back(f.int_p2[q]);
      c.push_back(f.mixed[q]);
      r.push_back((f.sup_p[q] + f.int_p2[q]) / denom);
    }
    s.n_paths = static_cast<int>(a.size());
    s.sup_H_p = summarize(std::move(a));
    s.int_V_beta_p2 = summarize(std::move(b));
    s.mixed = summarize(std::move(c));
    s.ratio = summarize(std::move(r));
    stats.push_back(s);
  }
  return stats;
}

double ResidualSeries::summed() const {
  return std::accumulate(step_residuals.begin(), step_residuals.end(), 0.0);
}

ResidualSeries discrete_energy_residual(const PathRecord& record, const CoefficientBundle& b,
                                        const NoiseRealization& noise) {
  if (record.seed != noise.seed) throw ConsistencyError("record and realization seeds differ");
  const auto grid = record.grid_indices();
  if (std::abs(record.dt - noise.dt) > 1e-15 * noise.dt || static_cast<int>(grid.size()) - 1 > noise.steps())
    throw ConsistencyError("record and realization grids differ");
  if (!record.truncated && !record.stopped_at && static_cast<int>(grid.size()) - 1 != noise.steps())
    throw ConsistencyError("record and realization grids differ");
  const int m = record.level;
  if (b.has_diffusion() && noise.modes() < m) throw ConsistencyError("realization has fewer modes than the record");

  ResidualSeries out;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const auto& start = record.entries[grid[k]];
    const auto& end = record.entries[grid[k + 1]];
    const double t = start.time;
    const double dt = end.time - t;
    const Vector& x = start.coeffs;
    double rhs = 2.0 * pairing(b.eval_drift(t, x), x) * dt;
    if (b.has_diffusion()) {
      const Matrix B = b.eval_diffusion(t, x);
      const Vector dW = noise.wiener.row(static_cast<Eigen::Index>(k)).head(m).transpose();
      rhs += hilbert_schmidt_sq(B) * dt + 2.0 * pairing(B * dW, x);
    }
    if (b.has_jump()) {
      const auto& ms = b.mark_space;
      for (std::size_t i = grid[k] + 1; i < grid[k + 1]; i += 2) {
        const auto& pre = record.entries[i];
        const auto& post = record.entries[i + 1];
        if (pre.kind != EntryKind::JumpPre || post.kind != EntryKind::JumpPost)
          throw ConsistencyError("malformed jump entries in record");
        // Locate the mark of this event in the realization.
        const auto events = noise.jumps_in(t, end.time);
        const auto it = std::find_if(events.begin(), events.end(), [&](const JumpEvent& e) { return e.time == pre.time; });
        if (it == events.end()) throw ConsistencyError("record jump not present in realization");
        const Vector g = b.eval_jump(pre.time, pre.coeffs, ms.marks[it->mark]);
        const double jump_terms = 2.0 * pairing(g, pre.coeffs) + g.squaredNorm();
        rhs += jump_terms;
        out.jump_times.push_back(pre.time);
        out.jump_residuals.push_back(post.coeffs.squaredNorm() - pre.coeffs.squaredNorm() - jump_terms);
      }
      for (std::size_t i = 0; i < ms.size(); ++i)
        rhs -= 2.0 * dt * ms.weights[i] * pairing(b.eval_jump(t, x, ms.marks[i]), x);
    } else if (grid[k + 1] != grid[k] + 1) {
      throw ConsistencyError("record has jump entries but the bundle has no jump coefficient");
    }
    out.step_times.push_back(t);
    out.step_residuals.push_back(end.coeffs.squaredNorm() - x.squaredNorm() - rhs);
  }
  return out;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

ModulusTable modulus_of_continuity(const std::vector<PathRecord>& paths, const std::vector<double>& deltas,
                                   double beta) {
  if (paths.empty()) throw InvalidArgument("modulus of continuity needs at least one path");
  const double dt = paths.front().dt;
  const auto n_grid = paths.front().grid_indices().size();
  for (const auto& p : paths)
    if (p.dt != dt || p.grid_indices().size() != n_grid) throw InvalidArgument("paths must share a common grid");

  std::vector<int> shifts;
  for (double d : deltas) {
    const double r = d / dt;
    const double k = std::round(r);
    if (!(d > 0.0) || std::abs(r - k) > 1e-9 * std::max(1.0, r)) throw InvalidArgument("delta must be a positive multiple of dt");
    if (static_cast<std::size_t>(k) >= n_grid) throw InvalidArgument("delta must be smaller than the horizon");
    shifts.push_back(static_cast<int>(k));
  }

  ModulusTable table;
  table.deltas = deltas;
  table.beta = beta;
  std::vector<double> means, normalized;
  for (std::size_t q = 0; q < deltas.size(); ++q) {
    std::vector<double> per_path;
    per_path.reserve(paths.size());
    for (const auto& p : paths) {
      const auto grid = p.grid_indices();
      double acc = 0.0;
      const auto shift = static_cast<std::size_t>(shifts[q]);
      // Left-Riemann sum over t_k in [0, T - delta).
      for (std::size_t k = 0; k + shift + 1 < grid.size(); ++k) {
        const auto& a = p.entries[grid[k]];
        const auto& b = p.entries[grid[k + shift]];
        acc += std::pow((b.coeffs - a.coeffs).norm(), beta);
      }
      per_path.push_back(acc * dt);
    }
    table.values.push_back(summarize(std::move(per_path)));
    means.push_back(table.values.back().mean);
    normalized.push_back(std::pow(means.back(), 1.0 / beta));
  }
  table.slope_raw = loglog_slope(deltas, means);
  table.slope_normalized = loglog_slope(deltas, normalized);

  // Sort by delta and check that smaller delta never exceeds larger delta beyond the CIs.
  std::vector<std::size_t> order(deltas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return deltas[a] < deltas[b]; });
  table.consistent_with_tightness = true;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const auto& lo = table.values[order[i]];
    const auto& hi = table.values[order[i + 1]];
    if (lo.mean - lo.ci99 > hi.mean + hi.ci99) table.consistent_with_tightness = false;
  }
  return table;
}

}  // namespace levyspde
