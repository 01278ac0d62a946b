// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "levyspde/cli.hpp"
#include "levyspde/levyspde.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace levyspde;
using nlohmann::json;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

SolverConfig config(double dt, double T, int level) {
  SolverConfig c;
  c.dt = dt;
  c.T = T;
  c.level = level;
  return c;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Outcome isometry() {
  const auto marks = MarkSpace::symmetric(1.0, 0.5);
  const std::vector<std::pair<std::string, MarkIntegrand>> integrands{
      {"constant", [](double, double) { return Vector::Ones(1); }},
      {"time_linear", [](double t, double) { return Vector::Constant(1, t); }},
      {"mark_weighted", [](double, double z) { return Vector::Constant(1, 1.0 + z); }},
  };
  Outcome o;
  for (std::size_t k = 0; k < integrands.size(); ++k) {
    const auto r = ito_isometry_check(integrands[k].second, marks, 1.0, 0.01, 10000, derive_seed(0, "accept", k));
    o.pass = o.pass && r.within(3.0);
    o.detail += integrands[k].first + " lhs " + num(r.lhs) + " rhs " + num(r.rhs) + " ci99 " + num(r.ci99) + "; ";
  }
  return o;
}

Outcome audits() {
  AuditOptions opt;
  opt.samples = 1000;
  opt.seed = 0;
  Outcome o;
  for (const auto& id : builtin_ids()) {
    const bool ok = validate(builtin(id), opt).passed();
    o.pass = o.pass && ok;
    if (!ok) o.detail += id + " failed; ";
  }
  auto misdeclared = builtin("heat");
  misdeclared.constants.beta = 3.0;
  const auto* h3 = validate(misdeclared, opt).find("H3-coercivity");
  const bool beta_caught = h3 && !h3->passed();
  const auto* h1 = validate(fixtures::step_drift(), opt).find("H1-hemicontinuity");
  const bool step_caught = h1 && !h1->passed();
  o.pass = o.pass && beta_caught && step_caught;
  o.detail += "5 builtins audited; misdeclared beta " + std::string(beta_caught ? "caught" : "missed") +
              "; step drift " + (step_caught ? "caught" : "missed");
  return o;
}

Outcome constants() {
  HypothesisConstants k;
  k.beta = 2.0;
  Outcome o;
  o.pass = c1(2.5) == 1.0 && c1(4.0) == 2.0 && c2(3.0) == 1.0 && c2(5.0) == 2.0 && chi(k) == 1.0;
  k.L_A = 1.0;
  k.L_B = 0.0;
  k.L_gamma = 0.0;
  const auto r = admissible_p_range(k);
  o.pass = o.pass && r.unbounded && !r.empty;
  o.detail = "C1(2.5)=" + num(c1(2.5)) + " C1(4)=" + num(c1(4.0)) + " C2(3)=" + num(c2(3.0)) +
             " C2(5)=" + num(c2(5.0)) + " chi=" + num(chi(k)) + (r.unbounded ? " unbounded" : " bounded");
  return o;
}

Outcome energy() {
  const auto spec = builtin("heat");
  EnergyOptions opt;
  opt.p_list = {2.0, 4.0};
  opt.n_paths = 2000;
  std::vector<EnergyStats> all;
  for (int m : {4, 8, 16, 32}) {
    const auto s = energy_estimate_mc(spec.bundle, spec.triple, spec.x0, config(1e-3, 1.0, m), opt);
    all.insert(all.end(), s.begin(), s.end());
  }
  Outcome o;
  for (double p : opt.p_list) {
    double lo = INFINITY, hi = -INFINITY, ci_lo = -INFINITY, ci_hi = INFINITY;
    int truncated = 0;
    for (const auto& s : all) {
      if (s.p != p) continue;
      lo = std::min(lo, s.ratio.mean);
      hi = std::max(hi, s.ratio.mean);
      ci_lo = std::max(ci_lo, s.ratio.mean - s.ratio.ci99);
      ci_hi = std::min(ci_hi, s.ratio.mean + s.ratio.ci99);
      truncated += s.truncated_paths;
    }
    o.pass = o.pass && hi / lo <= 2.0 && ci_lo <= ci_hi && truncated == 0;
    o.detail += "p=" + num(p) + " max/min " + num(hi / lo) + (ci_lo <= ci_hi ? " overlap" : " disjoint") + "; ";
  }
  return o;
}

Outcome residual() {
  const auto spec = fixtures::scalar_linear(2.0, 0.5);
  std::vector<double> dts{0.02, 0.01, 0.005}, means;
  for (double dt : dts) {
    const auto cfg = config(dt, 1.0, 1);
    const auto sums = parallel_map(4000, 1, [&](std::size_t i) {
      const auto noise = sample_noise(1, 1.0, dt, spec.bundle.mark_space, derive_seed(0, "residual-path", i));
      const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, cfg, noise);
      return discrete_energy_residual(rec, spec.bundle, noise).summed();
    });
    means.push_back(std::abs(summarize(sums).mean));
  }
  const auto slope = loglog_slope(dts, means);

  const auto jump = fixtures::constant_jump(4);
  double worst = 0.0;
  int events = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const double dt = std::ldexp(1.0, -7);
    const auto noise = sample_noise(4, 1.0, dt, jump.bundle.mark_space, derive_seed(0, "jump-residual", i));
    const auto rec = solve_path(jump.bundle, jump.triple, jump.x0, config(dt, 1.0, 4), noise);
    for (double v : discrete_energy_residual(rec, jump.bundle, noise).jump_residuals) {
      worst = std::max(worst, std::abs(v));
      ++events;
    }
  }
  Outcome o;
  o.pass = slope && *slope >= 0.7 && *slope <= 1.3 && worst == 0.0 && events > 0;
  o.detail = "log2 slope " + (slope ? num(*slope) : std::string("undefined")) + " (" + num(means[0]) + ", " +
             num(means[1]) + ", " + num(means[2]) + "); " + std::to_string(events) + " jump residuals, max " +
             num(worst);
  return o;
}

Outcome uniqueness() {
  Outcome o;
  for (const auto& id : builtin_ids()) {
    const auto spec = builtin(id);
    const auto r = pathwise_uniqueness_test(spec.bundle, spec.triple, spec.x0, config(0.01, 1.0, spec.default_level),
                                            {20, 0, 1});
    o.pass = o.pass && r.max_sup_diff == 0.0;
    o.detail += id + " " + num(r.max_sup_diff) + "; ";
  }
  return o;
}

Outcome stability() {
  Outcome o;
  for (const char* id : {"heat", "allen_cahn"}) {
    const auto spec = builtin(id);
    Vector xb = spec.x0;
    xb[0] += 0.1;
    const auto r = weighted_stability_mc(spec.bundle, spec.constants, spec.triple, spec.x0, xb,
                                         config(1e-3, 1.0, 8), {1000, 0, 1});
    o.pass = o.pass && r.pass && r.phi_valid;
    o.detail += std::string(id) + " margin " + num(r.margin) + " at t " + num(r.worst_t) + "; ";
  }
  return o;
}

Outcome dependence() {
  Outcome o;
  const std::vector<double> deltas{1e-1, 1e-2, 1e-3};
  const auto heat = builtin("heat");
  for (double p : {2.0, 4.0}) {
    const auto r = continuous_dependence_study(heat.bundle, heat.triple, heat.x0, deltas, p, config(0.01, 1.0, 16),
                                               {100, 0, 1});
    o.pass = o.pass && r.slope && std::abs(*r.slope - p) <= 0.2;
    o.detail += "heat p=" + num(p) + " slope " + (r.slope ? num(*r.slope) : std::string("undefined")) + "; ";
  }
  const auto ac = builtin("allen_cahn");
  const auto r = continuous_dependence_study(ac.bundle, ac.triple, ac.x0, deltas, 2.0, config(0.01, 1.0, 16),
                                             {100, 0, 1});
  o.pass = o.pass && r.strictly_decreasing;
  o.detail += std::string("allen_cahn ") + (r.strictly_decreasing ? "strictly decreasing" : "not decreasing");
  return o;
}

Outcome convergence() {
  Outcome o;
  for (const char* id : {"heat", "allen_cahn"}) {
    const auto spec = builtin(id);
    const auto r =
        galerkin_convergence(spec.bundle, spec.triple, spec.x0, {4, 8, 16, 32}, config(0.01, 1.0, 4), 2.0, {100, 0, 1});
    o.pass = o.pass && r.nonincreasing;
    o.detail += std::string(id) + " m=4 " + num(r.distances.front().mean) + " m=16 " + num(r.distances[2].mean) + "; ";
  }
  const auto heat = builtin("heat");
  Vector x0 = Vector::Zero(static_cast<Eigen::Index>(heat.triple.dimension_cap()));
  x0[0] = 1.0;
  x0[2] = -0.5;
  const auto r = galerkin_convergence(heat.bundle, heat.triple, x0, {4, 8, 16, 32}, config(0.01, 1.0, 4),
                                      2.0, {10, 0, 1});
  double worst = 0.0;
  for (const auto& d : r.distances) worst = std::max(worst, d.mean);
  o.pass = o.pass && worst == 0.0;
  o.detail += "invariant subspace " + num(worst);
  return o;
}

Outcome modulus() {
  Outcome o;
  const auto zero = fixtures::zero_model(4);
  std::vector<PathRecord> flat;
  for (std::size_t i = 0; i < 4; ++i) flat.push_back(solve_path(zero.bundle, zero.triple, zero.x0, config(0.01, 1.0, 4), i));
  const auto t0 = modulus_of_continuity(flat, {0.01, 0.04, 0.16, 0.5}, 2.0);
  for (const auto& v : t0.values) o.pass = o.pass && v.mean == 0.0;

  const double dt = 1.0 / 128;
  PathRecord line;
  line.dt = dt;
  line.T = 1.0;
  line.level = 1;
  for (int k = 0; k <= 128; ++k) line.entries.push_back({k * dt, EntryKind::Grid, Vector::Constant(1, k * dt), k * dt, k * dt});
  const std::vector<double> ld{dt, 8 * dt, 32 * dt, 64 * dt};
  const auto tl = modulus_of_continuity({line}, ld, 2.0);
  double err = 0.0;
  for (std::size_t i = 0; i < ld.size(); ++i) err = std::max(err, std::abs(tl.values[i].mean - ld[i] * ld[i] * (1 - ld[i])));
  o.pass = o.pass && err <= 1e-12;

  const auto bm = fixtures::scalar_linear(1.0, 1.0);
  const double wdt = 1.0 / 1024;
  const auto paths = parallel_map(200, 1, [&](std::size_t i) {
    return solve_path(bm.bundle, bm.triple, bm.x0, config(wdt, 1.0, 1), derive_seed(0, "modulus-path", i));
  });
  std::vector<double> wd;
  for (int k = 0; k <= 5; ++k) wd.push_back(wdt * std::ldexp(1.0, k));
  const auto tw = modulus_of_continuity(paths, wd, 2.0);
  const bool slope_ok = tw.slope_normalized && *tw.slope_normalized >= 0.35 && *tw.slope_normalized <= 0.65;
  o.pass = o.pass && slope_ok;
  o.detail = "constant paths 0; line error " + num(err) + "; Wiener normalized slope " +
             (tw.slope_normalized ? num(*tw.slope_normalized) : std::string("undefined"));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "levyspde_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "config.json") << json{{"schema_version", 1},
                                              {"model", "allen_cahn"},
                                              {"seed", 3},
                                              {"solver", {{"dt", 0.01}, {"level", 8}}},
                                              {"study", {{"p", {2, 4}}, {"m", {4, 8}}, {"n_paths", 40}}}}
                                                  .dump();
  }
  const std::vector<std::pair<std::string, std::string>> runs{{"1", "a"}, {"4", "b"}, {"1", "c"}, {"4", "d"}};
  std::vector<std::string> energy, residual, path;
  Outcome o;
  for (const auto& [w, tag] : runs) {
    const auto out = (dir / tag).string();
    const std::string cfg = (dir / "config.json").string();
    for (const char* sub : {"energy", "residual", "simulate"}) {
      const std::vector<std::string> args{"levyspde", sub, "--config", cfg, "--workers", w, "--out", out};
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream so, se;
      if (cli::run(static_cast<int>(argv.size()), argv.data(), so, se) != cli::kExitPass) {
        o.pass = false;
        o.detail += std::string(sub) + " exited nonzero: " + se.str() + "; ";
      }
    }
    energy.push_back(slurp(fs::path(out) / "energy.csv"));
    residual.push_back(slurp(fs::path(out) / "residual.csv"));
    path.push_back(slurp(fs::path(out) / "path.csv"));
  }
  for (std::size_t i = 1; i < runs.size(); ++i)
    o.pass = o.pass && energy[i] == energy[0] && residual[i] == residual[0] && path[i] == path[0];
  o.pass = o.pass && !energy[0].empty() && !path[0].empty();
  o.detail += "energy, residual and path tables compared over 2 reruns x workers {1, 4}";
  fs::remove_all(dir);
  return o;
}

struct Criterion {
  std::string name;
  std::function<Outcome()> fn;
  double budget_s;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"isometry for compensated Poisson integrals", isometry, 30},
      {"hypothesis audits and planted failures", audits, 60},
      {"admissibility constants arithmetic", constants, 1},
      {"energy bound uniform in the Galerkin level", energy, 300},
      {"discrete energy identity residual", residual, 300},
      {"pathwise uniqueness on shared noise", uniqueness, 300},
      {"weighted stability", stability, 300},
      {"continuous dependence on the initial datum", dependence, 300},
      {"Galerkin convergence", convergence, 300},
      {"time-increment modulus", modulus, 300},
      {"determinism across reruns and worker counts", determinism, 300},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += " over the " + num(c.budget_s) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s [%.2f s] %s\n", o.pass ? "PASS" : "FAIL", i + 1, c.name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
