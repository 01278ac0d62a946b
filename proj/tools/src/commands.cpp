#include "levyspde/cli.hpp"
#include "levyspde/levyspde.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace levyspde::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = true;
  std::optional<double> worst_t;
  std::optional<double> margin;
  std::string summary;
};

struct Context {
  ExperimentConfig config;
  ModelSpec spec;
  std::ostream& out;

  int level() const { return config.solver_level_given ? config.solver.level : spec.default_level; }
  SolverConfig solver() const {
    SolverConfig c = config.solver;
    c.level = level();
    return c;
  }
  StudyOptions study_options() const { return {config.study.n_paths, config.seed, config.workers}; }
  double beta() const { return config.study.beta.value_or(spec.constants.beta); }

  void write_table(const std::string& stem, const CsvTable& table) const {
    fs::create_directories(config.out);
    if (config.format == "json") {
      std::ofstream f(fs::path(config.out) / (stem + ".json"));
      f << table.to_json().dump(2) << '\n';
    } else {
      std::ofstream f(fs::path(config.out) / (stem + ".csv"));
      table.write(f);
    }
  }

  int finish(const std::string& study, const Verdict& v) const {
    fs::create_directories(config.out);
    json j{{"study", study},
           {"model", spec.id},
           {"pass", v.pass},
           {"worst_t", v.worst_t ? json(*v.worst_t) : json(nullptr)},
           {"margin", v.margin ? json(*v.margin) : json(nullptr)}};
    std::ofstream(fs::path(config.out) / (study + ".verdict.json")) << j.dump(2) << '\n';
    out << study << ' ' << spec.id << ": " << (v.pass ? "PASS" : "FAIL");
    if (!v.summary.empty()) out << " (" << v.summary << ')';
    out << '\n';
    return v.pass ? kExitPass : kExitStudyFailure;
  }

  void require_level(int m, const std::string& field) const {
    if (m < 1 || static_cast<std::size_t>(m) > spec.triple.dimension_cap())
      throw InvalidArgument(field + ": level " + std::to_string(m) + " exceeds the dimension cap " +
                            std::to_string(spec.triple.dimension_cap()));
  }

  /// Part II studies are restricted to the admissible moment range.
  void require_admissible(const std::vector<double>& ps) const {
    if (spec.regime != Regime::PartII) return;
    const PRange r = spec.admissibility ? *spec.admissibility : admissible_p_range(spec.constants);
    for (double p : ps)
      if (!r.contains(p)) {
        std::ostringstream os;
        os << "study.p: p = " << p << " is outside the admissible range [" << r.lower << ", "
           << (r.unbounded ? std::string("inf") : format_double(r.upper)) << ")";
        throw InvalidArgument(os.str());
      }
  }
};

std::string fmt(double v) { return format_double(v); }

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

int cmd_check(Context& c) {
  AuditOptions o;
  o.samples = c.config.study.samples;
  o.seed = c.config.seed;
  if (c.config.solver_level_given) o.level = c.config.solver.level;
  o.level = std::min<int>(o.level, static_cast<int>(c.spec.triple.dimension_cap()));
  const auto report = validate(c.spec, o);
  CsvTable t("sampled audit of the structural hypotheses (a falsification attempt, not a proof)",
             {"hypothesis", "verdict", "worst_margin", "tolerance", "lhs", "rhs", "witness_t", "samples"});
  Verdict v;
  v.pass = report.passed();
  for (const auto& r : report.entries) {
    t.add_row({r.name, to_string(r.verdict), fmt(r.worst_margin), fmt(r.tolerance), fmt(r.lhs), fmt(r.rhs),
               fmt(r.witness.t), std::to_string(r.samples_used)});
    if (std::isfinite(r.worst_margin) && (!v.margin || r.worst_margin + r.tolerance < *v.margin)) {
      v.margin = r.worst_margin + r.tolerance;
      v.worst_t = r.witness.t;
    }
  }
  c.write_table("check", t);
  int failed = 0;
  for (const auto& r : report.entries) failed += r.passed() ? 0 : 1;
  v.summary = std::to_string(report.entries.size()) + " records, " + std::to_string(failed) + " failed";
  return c.finish("check", v);
}

int cmd_simulate(Context& c) {
  const auto cfg = c.solver();
  c.require_level(cfg.level, "solver.level");
  auto rec = solve_path(c.spec.bundle, c.spec.triple, c.spec.x0, cfg, c.config.seed);
  std::optional<double> tau;
  if (c.config.study.stop_N) {
    auto [stopped, t] = apply_stopping(rec, {*c.config.study.stop_N}, c.beta());
    rec = std::move(stopped);
    tau = t;
  }
  c.write_table("path", path_table(rec, "Galerkin path with pre- and post-jump entries (cadlag record)"));
  fs::create_directories(c.config.out);
  std::ofstream(fs::path(c.config.out) / "path.meta.json") << path_metadata(rec, cfg, c.spec.id).dump(2) << '\n';
  Verdict v;
  v.pass = !rec.truncated;
  v.summary = "final |Y|_H = " + short_num(rec.final_entry().norm_h) + ", jumps " + std::to_string(rec.jump_count());
  if (tau) v.summary += ", tau_N = " + short_num(*tau);
  if (rec.truncated) v.summary += ", truncated: " + rec.failure;
  return c.finish("simulate", v);
}

int cmd_energy(Context& c) {
  auto ps = c.config.study.p.empty() ? std::vector<double>{2.0} : c.config.study.p;
  c.require_admissible(ps);
  auto ms = c.config.study.m.empty() ? std::vector<int>{c.level()} : c.config.study.m;
  for (int m : ms) c.require_level(m, "study.m");
  EnergyOptions o{ps, c.beta(), c.config.study.n_paths, c.config.seed, c.config.workers};
  std::vector<EnergyStats> all;
  for (int m : ms) {
    auto cfg = c.solver();
    cfg.level = m;
    auto s = energy_estimate_mc(c.spec.bundle, c.spec.triple, c.spec.x0, cfg, o);
    all.insert(all.end(), s.begin(), s.end());
  }
  c.write_table("energy", energy_table(all, c.config.seed,
                                       "uniform-in-m moment bound for the Galerkin approximations"));
  Verdict v;
  std::ostringstream sum;
  int truncated = 0;
  for (double p : ps) {
    double lo = INFINITY, hi = -INFINITY, ci_lo = -INFINITY, ci_hi = INFINITY;
    for (const auto& s : all) {
      if (s.p != p) continue;
      lo = std::min(lo, s.ratio.mean);
      hi = std::max(hi, s.ratio.mean);
      ci_lo = std::max(ci_lo, s.ratio.mean - s.ratio.ci99);
      ci_hi = std::min(ci_hi, s.ratio.mean + s.ratio.ci99);
      truncated += s.truncated_paths;
    }
    const double spread = hi / lo;
    const bool ok = std::isfinite(spread) && spread <= 2.0 && ci_lo <= ci_hi;
    v.pass = v.pass && ok;
    if (!v.margin || 2.0 - spread < *v.margin) v.margin = 2.0 - spread;
    sum << "p=" << p << " max/min=" << short_num(spread) << (ci_lo <= ci_hi ? " CIs overlap" : " CIs disjoint")
        << "; ";
  }
  v.pass = v.pass && truncated == 0;
  sum << "truncated paths " << truncated;
  v.summary = sum.str();
  return c.finish("energy", v);
}

int cmd_residual(Context& c) {
  const auto cfg0 = c.solver();
  c.require_level(cfg0.level, "solver.level");
  auto dts = c.config.study.dt.empty() ? std::vector<double>{4 * cfg0.dt, 2 * cfg0.dt, cfg0.dt} : c.config.study.dt;
  if (c.config.study.n_paths < 2) throw InvalidArgument("n_paths must be >= 2");
  CsvTable t("discrete energy identity residual under time-step refinement",
             {"dt", "n_paths", "mean_summed_residual", "ci99", "max_abs_jump_residual"});
  std::vector<double> xs, ys;
  double max_jump = 0.0;
  for (double dt : dts) {
    auto cfg = cfg0;
    cfg.dt = dt;
    cfg.validate();
    struct One {
      double summed = 0.0;
      double jump = 0.0;
    };
    const auto per = parallel_map(
        static_cast<std::size_t>(c.config.study.n_paths), c.config.workers,
        [&](std::size_t i) {
          const auto noise = sample_noise(cfg.level, cfg.T, cfg.dt, c.spec.bundle.mark_space,
                                          derive_seed(c.config.seed, "residual-path", i));
          const auto rec = solve_path(c.spec.bundle, c.spec.triple, c.spec.x0, cfg, noise);
          const auto r = discrete_energy_residual(rec, c.spec.bundle, noise);
          One o{r.summed(), 0.0};
          for (double j : r.jump_residuals) o.jump = std::max(o.jump, std::abs(j));
          return o;
        });
    std::vector<double> sums;
    double mj = 0.0;
    for (const auto& o : per) {
      sums.push_back(o.summed);
      mj = std::max(mj, o.jump);
    }
    const auto s = summarize(sums);
    max_jump = std::max(max_jump, mj);
    t.add_row({fmt(dt), std::to_string(c.config.study.n_paths), fmt(s.mean), fmt(s.ci99), fmt(mj)});
    xs.push_back(dt);
    ys.push_back(std::abs(s.mean));
  }
  c.write_table("residual", t);
  Verdict v;
  const auto slope = loglog_slope(xs, ys);
  if (dts.size() >= 3) v.pass = slope && *slope >= 0.7 && *slope <= 1.3;
  v.margin = slope ? std::optional<double>(std::min(*slope - 0.7, 1.3 - *slope)) : std::nullopt;
  v.pass = v.pass && max_jump <= 1e-12;
  v.summary = "log2 slope " + (slope ? short_num(*slope) : std::string("undefined")) + ", max jump residual " +
              short_num(max_jump);
  return c.finish("residual", v);
}

int cmd_modulus(Context& c) {
  const auto cfg = c.solver();
  c.require_level(cfg.level, "solver.level");
  std::vector<double> deltas = c.config.study.delta;
  if (deltas.empty())
    for (int k = 2; k <= 6; ++k) deltas.push_back(cfg.dt * std::ldexp(1.0, k));
  const auto paths = parallel_map(static_cast<std::size_t>(c.config.study.n_paths), c.config.workers,
                                  [&](std::size_t i) {
                                    return solve_path(c.spec.bundle, c.spec.triple, c.spec.x0, cfg,
                                                      derive_seed(c.config.seed, "modulus-path", i));
                                  });
  const auto table = modulus_of_continuity(paths, deltas, c.beta());
  CsvTable t("time-increment modulus of the Galerkin paths (a tightness indicator, not a proof)",
             {"delta", "estimate", "ci99", "normalized"});
  for (std::size_t i = 0; i < table.deltas.size(); ++i)
    t.add_row({fmt(table.deltas[i]), fmt(table.values[i].mean), fmt(table.values[i].ci99),
               fmt(std::pow(table.values[i].mean, 1.0 / table.beta))});
  c.write_table("modulus", t);
  Verdict v;
  v.pass = table.consistent_with_tightness;
  v.summary = "slope " + (table.slope_raw ? short_num(*table.slope_raw) : std::string("undefined")) +
              ", normalized slope " +
              (table.slope_normalized ? short_num(*table.slope_normalized) : std::string("undefined"));
  return c.finish("modulus", v);
}

int cmd_uniqueness(Context& c) {
  const auto cfg = c.solver();
  c.require_level(cfg.level, "solver.level");
  const auto r = pathwise_uniqueness_test(c.spec.bundle, c.spec.triple, c.spec.x0, cfg, c.study_options(),
                                          c.config.study.stress);
  CsvTable t("pathwise uniqueness: two solves on one noise realization and one initial datum",
             {"n_paths", "stress", "max_sup_diff", "scale", "flagged"});
  t.add_row({std::to_string(r.n_paths), r.stress ? "1" : "0", fmt(r.max_sup_diff), fmt(r.scale),
             r.flagged ? "1" : "0"});
  c.write_table("uniqueness", t);
  Verdict v;
  v.pass = r.stress ? !r.flagged : r.max_sup_diff == 0.0;
  v.margin = -r.max_sup_diff;
  v.summary = "max sup difference " + fmt(r.max_sup_diff);
  return c.finish("uniqueness", v);
}

int cmd_stability(Context& c) {
  const auto cfg = c.solver();
  c.require_level(cfg.level, "solver.level");
  Vector xb = c.spec.x0;
  xb[0] += c.config.study.shift;
  const auto r = weighted_stability_mc(c.spec.bundle, c.spec.constants, c.spec.triple, c.spec.x0, xb, cfg,
                                       c.study_options());
  CsvTable t("weighted stability: E[phi(t) |Y_a(t) - Y_b(t)|_H^2] against |x_a - x_b|_H^2",
             {"t", "lhs", "ci99", "bound", "bound_with_slack"});
  for (std::size_t i = 0; i < r.times.size(); ++i)
    t.add_row({fmt(r.times[i]), fmt(r.lhs_curve[i].mean), fmt(r.lhs_curve[i].ci99), fmt(r.bound),
               fmt(r.bound * (1.0 + r.eps_scheme))});
  c.write_table("stability", t);
  Verdict v;
  v.pass = r.pass;
  v.worst_t = r.worst_t;
  v.margin = r.margin;
  v.summary = "worst t " + short_num(r.worst_t) + ", margin " + short_num(r.margin) +
              (r.phi_valid ? "" : ", weight left (0, 1]");
  return c.finish("stability", v);
}

int cmd_depend(Context& c) {
  const auto cfg = c.solver();
  c.require_level(cfg.level, "solver.level");
  auto ps = c.config.study.p.empty() ? std::vector<double>{2.0} : c.config.study.p;
  c.require_admissible(ps);
  auto deltas = c.config.study.delta.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3} : c.config.study.delta;
  const PRange* range = c.spec.admissibility ? &*c.spec.admissibility : nullptr;
  CsvTable t("continuous dependence on the initial datum", {"p", "delta", "estimate", "ci99"});
  Verdict v;
  std::ostringstream sum;
  for (double p : ps) {
    const auto r = continuous_dependence_study(c.spec.bundle, c.spec.triple, c.spec.x0, deltas, p, cfg,
                                               c.study_options(), range);
    for (std::size_t i = 0; i < r.deltas.size(); ++i)
      t.add_row({fmt(p), fmt(r.deltas[i]), fmt(r.values[i].mean), fmt(r.values[i].ci99)});
    v.pass = v.pass && r.nonincreasing && r.zero_at_zero;
    sum << "p=" << p << " slope " << (r.slope ? short_num(*r.slope) : std::string("undefined")) << "; ";
  }
  c.write_table("depend", t);
  v.summary = sum.str();
  v.summary.resize(v.summary.size() - 2);
  return c.finish("depend", v);
}

int cmd_converge(Context& c) {
  auto ms = c.config.study.m.empty() ? std::vector<int>{4, 8, 16, 32} : c.config.study.m;
  std::vector<int> levels;
  const int cap = static_cast<int>(c.spec.triple.dimension_cap());
  for (int m : ms) {
    if (m < 1) throw InvalidArgument("study.m: values must be >= 1");
    if (m <= cap) levels.push_back(m);
  }
  if (levels.size() < 2) throw InvalidArgument("study.m: need two levels within the dimension cap");
  const auto r = galerkin_convergence(c.spec.bundle, c.spec.triple, c.spec.x0, levels, c.solver(), c.beta(),
                                      c.study_options());
  CsvTable t("Galerkin convergence against the finest level in L^beta(0, T; H)",
             {"m", "distance", "ci99", "reference_m"});
  for (std::size_t i = 0; i < r.levels.size(); ++i)
    t.add_row({std::to_string(r.levels[i]), fmt(r.distances[i].mean), fmt(r.distances[i].ci99),
               std::to_string(r.reference_level)});
  c.write_table("converge", t);
  Verdict v;
  v.pass = r.nonincreasing;
  v.summary = "reference m = " + std::to_string(r.reference_level);
  return c.finish("converge", v);
}

int cmd_prange(Context& c) {
  const auto r = c.spec.admissibility ? *c.spec.admissibility : admissible_p_range(c.spec.constants);
  CsvTable t("admissible moment range for gradient-dependent noise coefficients",
             {"p", "C1", "C2", "strict_condition", "range_condition", "side_condition"});
  for (const auto& row : r.table)
    t.add_row({fmt(row.p), fmt(row.c1), fmt(row.c2), row.condition_strict ? "1" : "0",
               row.condition_range ? "1" : "0", row.condition_side ? "1" : "0"});
  c.write_table("prange", t);
  c.out << "chi = " << fmt(r.chi) << '\n';
  c.out << "p      C1     C2\n";
  for (const auto& row : r.table) {
    if (row.p > 6.0) break;
    c.out << short_num(row.p) << "    " << short_num(row.c1) << "    " << short_num(row.c2) << '\n';
  }
  Verdict v;
  if (c.spec.regime == Regime::PartI)
    v.summary = "model is not in the gradient-dependent regime; ";
  if (r.empty)
    v.summary += "empty interval";
  else
    v.summary += "interval [" + short_num(r.lower) + ", " + (r.unbounded ? std::string("inf") : short_num(r.upper)) +
                ")" + (r.unbounded ? ", unbounded" : "") +
                (r.side_sup ? ", side condition up to p = " + short_num(*r.side_sup) : "");
  return c.finish("prange", v);
}

int cmd_isometry(Context& c) {
  MarkSpace marks = c.spec.bundle.mark_space;
  if (marks.empty()) marks = MarkSpace::symmetric(1.0, 0.5);
  const auto cfg = c.config.solver;
  const int n = c.config.study.n_paths;
  const std::vector<std::pair<std::string, MarkIntegrand>> integrands{
      {"constant", [](double, double) { return Vector::Ones(1); }},
      {"time_linear", [](double t, double) { return Vector::Constant(1, t); }},
      {"mark_weighted", [](double, double z) { return Vector::Constant(1, z); }},
  };
  CsvTable t("isometry for compensated Poisson integrals", {"integrand", "n_paths", "lhs", "rhs", "rel_err", "ci99"});
  Verdict v;
  std::ostringstream sum;
  for (std::size_t k = 0; k < integrands.size(); ++k) {
    const auto r = ito_isometry_check(integrands[k].second, marks, cfg.T, cfg.dt, n,
                                      derive_seed(c.config.seed, "isometry-integrand", k), c.config.workers);
    t.add_row({integrands[k].first, std::to_string(r.n_paths), fmt(r.lhs), fmt(r.rhs), fmt(r.rel_err), fmt(r.ci99)});
    v.pass = v.pass && r.within(3.0);
    const double m = 3.0 * r.ci99 - std::abs(r.lhs - r.rhs);
    if (!v.margin || m < *v.margin) v.margin = m;
    sum << integrands[k].first << " rel_err " << short_num(r.rel_err) << "; ";
  }
  c.write_table("isometry", t);
  v.summary = sum.str();
  v.summary.resize(v.summary.size() - 2);
  return c.finish("isometry", v);
}

const std::map<std::string, std::function<int(Context&)>>& table() {
  static const std::map<std::string, std::function<int(Context&)>> t{
      {"check", cmd_check},         {"simulate", cmd_simulate},   {"energy", cmd_energy},
      {"residual", cmd_residual},   {"modulus", cmd_modulus},     {"uniqueness", cmd_uniqueness},
      {"stability", cmd_stability}, {"depend", cmd_depend},       {"converge", cmd_converge},
      {"prange", cmd_prange},       {"isometry", cmd_isometry},
  };
  return t;
}

}  // namespace

std::vector<std::string> subcommands() {
  std::vector<std::string> names;
  for (const auto& [k, v] : table()) {
    (void)v;
    names.push_back(k);
  }
  return names;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"levyspde: spectral Galerkin studies for SPDEs with Wiener and compensated Poisson noise"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir, format, model;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  app.add_option("--config", config_path, "JSON experiment config (schema_version 1)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--model", model, "builtin model id (overrides the config)");
  for (const auto& name : subcommands()) app.add_subcommand(name);

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    json doc{{"schema_version", 1}};
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw InvalidArgument("--config: cannot open " + config_path);
      try {
        doc = json::parse(f);
      } catch (const json::parse_error& e) {
        throw InvalidArgument("--config: invalid JSON: " + std::string(e.what()));
      }
    }
    ExperimentConfig cfg = parse_config(doc);
    if (const char* env = std::getenv("LEVYSPDE_WORKERS")) {
      try {
        cfg.workers = std::stoi(env);
      } catch (const std::exception&) {
        throw InvalidArgument("LEVYSPDE_WORKERS: expected a positive integer");
      }
      if (cfg.workers < 1) throw InvalidArgument("LEVYSPDE_WORKERS: expected a positive integer");
    }
    if (workers) cfg.workers = *workers;
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (!format.empty()) cfg.format = format;
    if (!model.empty()) cfg.model = model;

    Context ctx{cfg, resolve_model(cfg), out};
    const auto name = app.get_subcommands().front()->get_name();
    return table().at(name)(ctx);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ConsistencyError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "error: --out: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace levyspde::cli
