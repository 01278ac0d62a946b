#include "levyspde/wellposedness.hpp"
#include "levyspde/parallel.hpp"
#include "levyspde/rng.hpp"

#include <algorithm>
#include <cmath>

namespace levyspde {

namespace {

void require_paths(const StudyOptions& o) {
  if (o.n_paths < 1) throw InvalidArgument("n_paths must be >= 1");
}

double sup_difference(const PathRecord& a, const PathRecord& b, bool grid_only) {
  double s = 0.0;
  if (!grid_only && a.entries.size() == b.entries.size()) {
    for (std::size_t i = 0; i < a.entries.size(); ++i) s = std::max(s, (a.entries[i].coeffs - b.entries[i].coeffs).norm());
    return s;
  }
  const auto ga = a.grid_indices();
  const auto gb = b.grid_indices();
  if (ga.size() != gb.size()) return std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ga.size(); ++k)
    s = std::max(s, (a.entries[ga[k]].coeffs - b.entries[gb[k]].coeffs).norm());
  return s;
}

}  // namespace

UniquenessResult pathwise_uniqueness_test(const CoefficientBundle& bundle, const GelfandTriple& triple,
                                          const Vector& x0, const SolverConfig& config, const StudyOptions& o,
                                          bool stress, const std::optional<Vector>& x0_b) {
  require_paths(o);
  config.validate();
  SolverConfig second = config;
  second.shuffle_jumps = stress;
  const Vector xb = x0_b.value_or(x0);
  auto run = [&](std::size_t i) {
    const auto noise =
        sample_noise(config.level, config.T, config.dt, bundle.mark_space, derive_seed(o.seed, "uniqueness-path", i));
    const auto a = solve_path(bundle, triple, x0, config, noise);
    const auto b = solve_path(bundle, triple, xb, second, noise);
    double scale = 0.0;
    for (const auto& e : a.entries) scale = std::max(scale, e.norm_h);
    return std::pair{sup_difference(a, b, stress), scale};
  };
  const auto results = parallel_map(static_cast<std::size_t>(o.n_paths), o.workers, run);
  UniquenessResult out;
  out.n_paths = o.n_paths;
  out.stress = stress;
  for (const auto& [d, s] : results) {
    out.max_sup_diff = std::max(out.max_sup_diff, d);
    out.scale = std::max(out.scale, s);
  }
  out.flagged = stress && out.max_sup_diff > 1e-9 * (1.0 + out.scale);
  return out;
}

StabilityResult weighted_stability_mc(const CoefficientBundle& bundle, const HypothesisConstants& constants,
                                      const GelfandTriple& triple, const Vector& x0_a, const Vector& x0_b,
                                      const SolverConfig& config, const StudyOptions& o) {
  require_paths(o);
  if (!bundle.rho || !bundle.eta) throw ConfigurationError("weighted stability needs rho and eta evaluators");
  config.validate();
  const double f = constants.f();
  auto run = [&](std::size_t i) {
    const auto noise =
        sample_noise(config.level, config.T, config.dt, bundle.mark_space, derive_seed(o.seed, "stability-path", i));
    const auto a = solve_path(bundle, triple, x0_a, config, noise);
    const auto b = solve_path(bundle, triple, x0_b, config, noise);
    const auto ga = a.grid_indices();
    const auto gb = b.grid_indices();
    if (ga.size() != gb.size()) throw StepFailure("stability pair truncated at different times", 0.0, 0);
    std::vector<double> lhs(ga.size());
    double running = 0.0;
    double prev_phi = 1.0;
    bool valid = true;
    for (std::size_t k = 0; k < ga.size(); ++k) {
      const auto& ea = a.entries[ga[k]];
      const auto& eb = b.entries[gb[k]];
      const double phi = std::exp(-running);
      if (!(phi > 0.0 || running > 700.0) || phi > 1.0 || phi > prev_phi) valid = false;
      prev_phi = phi;
      lhs[k] = phi * (ea.coeffs - eb.coeffs).squaredNorm();
      if (k + 1 < ga.size()) {
        const double dt = a.entries[ga[k + 1]].time - ea.time;
        running += dt * (f + bundle.rho(ea.coeffs) + bundle.eta(eb.coeffs));
      }
    }
    return std::pair{std::move(lhs), valid};
  };
  const auto results = parallel_map(static_cast<std::size_t>(o.n_paths), o.workers, run);

  StabilityResult out;
  const auto steps = static_cast<std::size_t>(config.steps());
  out.bound = (triple.project(x0_a, config.level).coeffs - triple.project(x0_b, config.level).coeffs).squaredNorm();
  out.eps_scheme = 10.0 * config.dt;
  out.margin = std::numeric_limits<double>::infinity();
  const double limit = out.bound * (1.0 + out.eps_scheme);
  for (std::size_t k = 0; k <= steps; ++k) {
    std::vector<double> v;
    v.reserve(results.size());
    for (const auto& [lhs, valid] : results) {
      if (k < lhs.size()) v.push_back(lhs[k]);
      if (!valid) out.phi_valid = false;
    }
    out.times.push_back(static_cast<double>(k) * config.dt);
    out.lhs_curve.push_back(summarize(std::move(v)));
    const double margin = limit - out.lhs_curve.back().mean;
    if (margin < out.margin) {
      out.margin = margin;
      out.worst_t = out.times.back();
    }
  }
  out.pass = out.margin >= 0.0;
  return out;
}

DependenceResult continuous_dependence_study(const CoefficientBundle& bundle, const GelfandTriple& triple,
                                             const Vector& x0, const std::vector<double>& deltas, double p,
                                             const SolverConfig& config, const StudyOptions& o,
                                             const PRange* admissible, const std::optional<Vector>& direction) {
  require_paths(o);
  config.validate();
  if (p < 2.0) throw InvalidArgument("continuous dependence needs p >= 2");
  if (admissible && !admissible->contains(p)) throw InvalidArgument("p lies outside the admissible range");
  for (double d : deltas)
    if (!(d >= 0.0)) throw InvalidArgument("perturbation sizes must be nonnegative");
  Vector dir = direction.value_or(Vector::Unit(config.level, 0));
  if (dir.norm() == 0.0) throw InvalidArgument("perturbation direction must be nonzero");
  dir /= dir.norm();
  const Vector base = triple.project(x0, config.level).coeffs;

  auto run = [&](std::size_t i) {
    const auto noise =
        sample_noise(config.level, config.T, config.dt, bundle.mark_space, derive_seed(o.seed, "dependence-path", i));
    const auto ref = solve_path(bundle, triple, base, config, noise);
    std::vector<double> vals;
    for (double d : deltas) {
      if (d == 0.0) {
        vals.push_back(std::pow(sup_difference(ref, solve_path(bundle, triple, base, config, noise), false), p));
        continue;
      }
      const Vector xd = base + d * resized(dir, static_cast<std::size_t>(base.size()));
      vals.push_back(std::pow(sup_difference(ref, solve_path(bundle, triple, xd, config, noise), true), p));
    }
    return vals;
  };
  const auto results = parallel_map(static_cast<std::size_t>(o.n_paths), o.workers, run);

  DependenceResult out;
  out.deltas = deltas;
  out.p = p;
  std::vector<double> means;
  for (std::size_t q = 0; q < deltas.size(); ++q) {
    std::vector<double> v;
    for (const auto& r : results) v.push_back(r[q]);
    out.values.push_back(summarize(std::move(v)));
    means.push_back(out.values.back().mean);
    if (deltas[q] == 0.0 && means.back() != 0.0) out.zero_at_zero = false;
  }
  out.slope = loglog_slope(deltas, means);
  std::vector<std::size_t> order(deltas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return deltas[a] < deltas[b]; });
  out.nonincreasing = true;
  out.strictly_decreasing = true;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const auto& lo = out.values[order[i]];
    const auto& hi = out.values[order[i + 1]];
    if (lo.mean - lo.ci99 > hi.mean + hi.ci99) out.nonincreasing = false;
    if (!(lo.mean < hi.mean)) out.strictly_decreasing = false;
  }
  return out;
}

ConvergenceResult galerkin_convergence(const CoefficientBundle& bundle, const GelfandTriple& triple, const Vector& x0,
                                       std::vector<int> levels, const SolverConfig& config, double beta,
                                       const StudyOptions& o) {
  require_paths(o);
  if (levels.empty()) throw InvalidArgument("galerkin convergence needs at least one level");
  std::sort(levels.begin(), levels.end());
  const int m_max = levels.back();
  if (levels.front() < 1 || static_cast<std::size_t>(m_max) > triple.dimension_cap())
    throw InvalidArgument("levels must lie in [1, dimension_cap]");
  SolverConfig ref_cfg = config;
  ref_cfg.level = m_max;
  ref_cfg.validate();

  auto run = [&](std::size_t i) {
    const auto noise =
        sample_noise(m_max, config.T, config.dt, bundle.mark_space, derive_seed(o.seed, "convergence-path", i));
    const auto ref = solve_path(bundle, triple, x0, ref_cfg, noise);
    const auto gr = ref.grid_indices();
    std::vector<double> dist;
    for (int m : levels) {
      SolverConfig c = config;
      c.level = m;
      const auto path = m == m_max ? ref : solve_path(bundle, triple, x0, c, noise);
      const auto gp = path.grid_indices();
      if (gp.size() != gr.size()) {
        dist.push_back(std::numeric_limits<double>::infinity());
        continue;
      }
      double acc = 0.0;
      for (std::size_t k = 0; k + 1 < gr.size(); ++k) {
        const double dt = ref.entries[gr[k + 1]].time - ref.entries[gr[k]].time;
        const Vector diff = resized(path.entries[gp[k]].coeffs, static_cast<std::size_t>(m_max)) - ref.entries[gr[k]].coeffs;
        acc += dt * std::pow(diff.norm(), beta);
      }
      dist.push_back(std::pow(acc, 1.0 / beta));
    }
    return dist;
  };
  const auto results = parallel_map(static_cast<std::size_t>(o.n_paths), o.workers, run);

  ConvergenceResult out;
  out.levels = levels;
  out.reference_level = m_max;
  out.beta = beta;
  out.nonincreasing = true;
  for (std::size_t q = 0; q < levels.size(); ++q) {
    std::vector<double> v;
    for (const auto& r : results) v.push_back(r[q]);
    out.distances.push_back(summarize(std::move(v)));
    if (q > 0) {
      const auto& prev = out.distances[q - 1];
      const auto& cur = out.distances[q];
      if (cur.mean - cur.ci99 > prev.mean + prev.ci99) out.nonincreasing = false;
    }
  }
  return out;
}

}  // namespace levyspde
