#include "levyspde/coefficients.hpp"
#include "levyspde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace levyspde {

namespace {

struct Candidate {
  double t = 0.0;
  std::vector<Vector> inputs;
};

double normalized(const InequalityTerms& terms) {
  return terms.margin() / (1.0 + std::abs(terms.lhs) + std::abs(terms.rhs));
}

double sample_time(const AuditOptions& o, double horizon, std::size_t index) {
  const int tp = std::max(1, o.time_points);
  if (tp == 1) return 0.0;
  return horizon * static_cast<double>(index % tp) / static_cast<double>(tp - 1);
}

// Gaussian at several amplitudes (flat or V-decayed) plus axis-aligned extremes.
Vector sample_vector(const GelfandTriple& triple, int m, const AuditOptions& o, std::string_view purpose,
                     std::size_t index) {
  Engine eng = make_engine(o.seed, purpose, index);
  std::normal_distribution<double> gauss;
  const auto& amps = o.amplitudes;
  const double a = amps.empty() ? 1.0 : amps[index % amps.size()];
  const std::size_t shape = (index / std::max<std::size_t>(1, amps.size())) % 3;
  Vector u = Vector::Zero(m);
  switch (shape) {
    case 0:
      for (int j = 0; j < m; ++j) u[j] = a * gauss(eng) / std::sqrt(static_cast<double>(m));
      break;
    case 1:
      for (int j = 0; j < m; ++j) u[j] = a * gauss(eng) / std::sqrt(triple.weight(j));
      break;
    default: {
      std::uniform_int_distribution<int> pick(0, m - 1);
      std::bernoulli_distribution sign;
      u[pick(eng)] = sign(eng) ? a : -a;
      break;
    }
  }
  return u;
}

void into_ball(const CoefficientBundle& bundle, const GelfandTriple& triple, std::optional<double> radius,
               Vector& u) {
  if (!radius) return;
  const double n = bundle.eval_v_norm(triple, u);
  if (n > *radius) u *= *radius / n;
}

template <class Terms>
void check_finite(const std::string& name, const InequalityTerms& terms, const Candidate& c, Terms&&) {
  if (!std::isfinite(terms.lhs) || !std::isfinite(terms.rhs)) {
    std::ostringstream os;
    os << name << ": coefficient evaluation returned non-finite values at t = " << c.t;
    throw AuditFailure(os.str(), c.inputs);
  }
}

struct AuditRun {
  std::string name;
  int samples;
  std::function<Candidate(std::size_t)> generate;
  std::function<InequalityTerms(const Candidate&)> terms;
  std::function<void(Candidate&)> constrain;  // optional
  int refine_sweeps = 0;
  double relative_tolerance = 1e-9;
};

HypothesisRecord run(const AuditRun& audit) {
  HypothesisRecord rec;
  rec.name = audit.name;
  double worst = std::numeric_limits<double>::infinity();
  Candidate worst_c;
  InequalityTerms worst_t;
  for (int i = 0; i < audit.samples; ++i) {
    Candidate c = audit.generate(static_cast<std::size_t>(i));
    const auto terms = audit.terms(c);
    check_finite(audit.name, terms, c, 0);
    const double r = normalized(terms);
    if (r < worst) {
      worst = r;
      worst_c = c;
      worst_t = terms;
    }
  }
  rec.samples_used = audit.samples;

  // Deterministic coordinate perturbation descent from the worst witness.
  for (int sweep = 0; sweep < audit.refine_sweeps && audit.samples > 0; ++sweep) {
    bool improved = false;
    for (std::size_t k = 0; k < worst_c.inputs.size(); ++k) {
      const double scale = std::max(1e-3, worst_c.inputs[k].norm());
      const double h = 0.1 * scale * std::ldexp(1.0, -sweep);
      for (Eigen::Index j = 0; j < worst_c.inputs[k].size(); ++j) {
        for (double sign : {1.0, -1.0}) {
          Candidate c = worst_c;
          c.inputs[k][j] += sign * h;
          if (audit.constrain) audit.constrain(c);
          const auto terms = audit.terms(c);
          check_finite(audit.name, terms, c, 0);
          ++rec.samples_used;
          const double r = normalized(terms);
          if (r < worst) {
            worst = r;
            worst_c = std::move(c);
            worst_t = terms;
            improved = true;
          }
        }
      }
    }
    if (!improved && sweep > 1) break;
  }

  rec.worst_margin = worst_t.margin();
  rec.lhs = worst_t.lhs;
  rec.rhs = worst_t.rhs;
  rec.tolerance = audit_tolerance(worst_t.lhs, worst_t.rhs, audit.relative_tolerance);
  rec.witness.t = worst_c.t;
  rec.witness.inputs = worst_c.inputs;
  rec.verdict = rec.worst_margin >= -rec.tolerance ? Verdict::Pass : Verdict::Fail;
  return rec;
}

double jump_pairing_sq(const CoefficientBundle& b, double t, const Vector& u, const Vector& v) {
  if (!b.has_jump()) return 0.0;
  double s = 0.0;
  const auto& ms = b.mark_space;
  for (std::size_t i = 0; i < ms.size(); ++i)
    s += ms.weights[i] * (b.eval_jump(t, u, ms.marks[i]) - b.eval_jump(t, v, ms.marks[i])).squaredNorm();
  return s;
}

double jump_moment(const CoefficientBundle& b, double t, const Vector& u, double p) {
  if (!b.has_jump()) return 0.0;
  double s = 0.0;
  const auto& ms = b.mark_space;
  for (std::size_t i = 0; i < ms.size(); ++i) s += ms.weights[i] * std::pow(b.eval_jump(t, u, ms.marks[i]).norm(), p);
  return s;
}

std::string p_label(double p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

HypothesisRecord arithmetic_record(const std::string& name, double lhs, double rhs, const std::string& note) {
  HypothesisRecord rec;
  rec.name = name;
  rec.lhs = lhs;
  rec.rhs = rhs;
  rec.worst_margin = rhs - lhs;
  rec.samples_used = 1;
  rec.verdict = rhs - lhs > 0.0 ? Verdict::Pass : Verdict::Fail;
  rec.note = note;
  return rec;
}

}  // namespace

ScanResult scan_hemicontinuity(const CoefficientBundle& bundle, double t, const Vector& u, const Vector& v,
                               const Vector& w, double s_lo, double s_hi, int grid, int bisections) {
  auto phi = [&](double s) { return pairing(bundle.eval_drift(t, u + s * v), w); };
  ScanResult res;
  std::vector<double> values(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / grid;
    values[i] = phi(s);
    if (!std::isfinite(values[i])) throw AuditFailure("hemicontinuity scan: non-finite drift pairing", {u, v, w});
    res.scale = std::max(res.scale, std::abs(values[i]));
  }
  int cell = 0;
  double best = -1.0;
  for (int i = 0; i < grid; ++i) {
    const double d = std::abs(values[i + 1] - values[i]);
    if (d > best) {
      best = d;
      cell = i;
    }
  }
  double a = s_lo + (s_hi - s_lo) * cell / grid;
  double b = s_lo + (s_hi - s_lo) * (cell + 1) / grid;
  double fa = values[cell];
  double fb = values[cell + 1];
  for (int it = 0; it < bisections; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = phi(mid);
    if (std::abs(fm - fa) >= std::abs(fb - fm)) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }
  res.jump = std::abs(fb - fa);
  res.s = 0.5 * (a + b);
  return res;
}

HypothesisRecord audit_hemicontinuity(const CoefficientBundle& bundle, const GelfandTriple& triple,
                                      const AuditOptions& o) {
  if (o.samples < 1) throw InvalidArgument("audit needs samples >= 1");
  HypothesisRecord rec;
  rec.name = "H1-hemicontinuity";
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < o.samples; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double t = sample_time(o, 1.0, idx);
    Vector u = sample_vector(triple, o.level, o, "hemi-u", idx);
    Vector v = sample_vector(triple, o.level, o, "hemi-v", idx);
    Vector w = sample_vector(triple, o.level, o, "hemi-w", idx);
    const auto scan = scan_hemicontinuity(bundle, t, u, v, w);
    const double tol = o.relative_tolerance * (1.0 + scan.scale);
    const double r = (-scan.jump) / (1.0 + scan.scale);
    if (r < worst) {
      worst = r;
      rec.worst_margin = -scan.jump;
      rec.tolerance = tol;
      rec.lhs = scan.jump;
      rec.rhs = 0.0;
      rec.witness = {t, {u, v, w}, scan.s};
    }
  }
  rec.samples_used = o.samples;
  rec.verdict = rec.worst_margin >= -rec.tolerance ? Verdict::Pass : Verdict::Fail;
  return rec;
}

InequalityTerms local_monotonicity_terms(const CoefficientBundle& b, const HypothesisConstants& c,
                                         const GelfandTriple& triple, MonotonicityMode mode, double t,
                                         const Vector& u, const Vector& v) {
  const Vector d = u - v;
  const double dist_sq = d.squaredNorm();
  if (mode == MonotonicityMode::H2Prime) {
    if (!b.monotonicity_bound) throw ConfigurationError("general local monotonicity needs an M_t(r) evaluator");
    const double r = std::max(b.eval_v_norm(triple, u), b.eval_v_norm(triple, v));
    return {pairing(b.eval_drift(t, u) - b.eval_drift(t, v), d), b.monotonicity_bound(t, r) * dist_sq};
  }
  if (!b.rho || !b.eta) throw ConfigurationError("local monotonicity needs rho and eta evaluators");
  InequalityTerms terms;
  terms.lhs = 2.0 * pairing(b.eval_drift(t, u) - b.eval_drift(t, v), d) +
              hilbert_schmidt_sq(b.eval_diffusion(t, u) - b.eval_diffusion(t, v)) + jump_pairing_sq(b, t, u, v);
  terms.rhs = (c.f() + b.rho(u) + b.eta(v)) * dist_sq;
  return terms;
}

HypothesisReport audit_local_monotonicity(const CoefficientBundle& bundle, const HypothesisConstants& c,
                                          const GelfandTriple& triple, MonotonicityMode mode,
                                          const AuditOptions& o) {
  if (o.samples < 1) throw InvalidArgument("audit needs samples >= 1");
  if (mode == MonotonicityMode::H2Prime && !bundle.monotonicity_bound)
    throw ConfigurationError("general local monotonicity needs an M_t(r) evaluator");
  if (mode != MonotonicityMode::H2Prime && (!bundle.rho || !bundle.eta))
    throw ConfigurationError("local monotonicity needs rho and eta evaluators");

  const int m = o.level;
  auto constrain = [&](Candidate& cand) {
    for (auto& x : cand.inputs) into_ball(bundle, triple, o.v_radius, x);
  };
  auto generate_pair = [&](std::size_t i) {
    Candidate cand;
    cand.t = sample_time(o, c.horizon, i);
    Vector u = sample_vector(triple, m, o, "mono-u", i);
    Vector v = sample_vector(triple, m, o, "mono-v", i);
    // Every fifth pair is a near-coincident pair.
    if (i % 5 == 4) v = u + 1e-3 * v;
    cand.inputs = {u, v};
    constrain(cand);
    return cand;
  };

  HypothesisReport report;
  const std::string main_name = mode == MonotonicityMode::H2       ? "H2-local-monotonicity"
                                : mode == MonotonicityMode::H2Prime ? "H2prime-general-local-monotonicity"
                                                                    : "H2star-local-monotonicity";
  report.entries.push_back(run({main_name, o.samples, generate_pair,
                                [&](const Candidate& cand) {
                                  return local_monotonicity_terms(bundle, c, triple, mode, cand.t, cand.inputs[0],
                                                                  cand.inputs[1]);
                                },
                                constrain, o.refine_sweeps, o.relative_tolerance}));
  if (mode == MonotonicityMode::H2Prime) return report;

  auto generate_one = [&](std::size_t i) {
    Candidate cand;
    cand.t = sample_time(o, c.horizon, i);
    cand.inputs = {sample_vector(triple, m, o, "envelope-u", i)};
    return cand;
  };
  auto norms = [&](const Vector& u) { return std::pair{u.norm(), bundle.eval_v_norm(triple, u)}; };

  if (mode == MonotonicityMode::H2) {
    report.entries.push_back(run({"H2-envelope", o.samples, generate_one,
                                  [&](const Candidate& cand) {
                                    const auto& u = cand.inputs[0];
                                    const auto [h, vn] = norms(u);
                                    return InequalityTerms{std::abs(bundle.rho(u)) + std::abs(bundle.eta(u)),
                                                           c.C_monotone * (1.0 + std::pow(vn, c.beta)) *
                                                               (1.0 + std::pow(h, c.zeta))};
                                  },
                                  {}, o.refine_sweeps, o.relative_tolerance}));
    return report;
  }

  report.entries.push_back(run({"H2star-rho-envelope", o.samples, generate_one,
                                [&](const Candidate& cand) {
                                  const auto& u = cand.inputs[0];
                                  const auto [h, vn] = norms(u);
                                  return InequalityTerms{
                                      std::abs(bundle.rho(u)),
                                      c.C_monotone * (1.0 + std::pow(h, c.lambda_exp)) +
                                          c.C_monotone * std::pow(vn, c.theta_exp) * (1.0 + std::pow(h, c.zeta))};
                                },
                                {}, o.refine_sweeps, o.relative_tolerance}));
  report.entries.push_back(run({"H2star-eta-envelope", o.samples, generate_one,
                                [&](const Candidate& cand) {
                                  const auto& u = cand.inputs[0];
                                  const auto [h, vn] = norms(u);
                                  return InequalityTerms{
                                      std::abs(bundle.eta(u)),
                                      c.C_monotone * (1.0 + std::pow(h, 2.0 + c.alpha)) +
                                          c.C_monotone * std::pow(vn, c.beta) * (1.0 + std::pow(h, c.alpha))};
                                },
                                {}, o.refine_sweeps, o.relative_tolerance}));
  report.entries.push_back(arithmetic_record("H2star-theta-below-beta", c.theta_exp, c.beta,
                                             "requires theta < beta"));
  return report;
}

HypothesisReport audit_coercivity_growth(const CoefficientBundle& bundle, const HypothesisConstants& c,
                                         const GelfandTriple& triple, Part part, const AuditOptions& o) {
  if (o.samples < 1) throw InvalidArgument("audit needs samples >= 1");
  const int m = o.level;
  const double beta = c.beta;
  auto generate_one = [&](std::size_t i) {
    Candidate cand;
    cand.t = sample_time(o, c.horizon, i);
    cand.inputs = {sample_vector(triple, m, o, "growth-u", i)};
    return cand;
  };
  auto generate_seq = [&](std::size_t i) {
    Candidate cand;
    cand.t = sample_time(o, c.horizon, i);
    cand.inputs = {sample_vector(triple, m, o, "continuity-u", i), sample_vector(triple, m, o, "continuity-d", i)};
    return cand;
  };
  auto hn = [](const Vector& u) { return u.norm(); };
  auto vn = [&](const Vector& u) { return bundle.eval_v_norm(triple, u); };
  auto drift_pair = [&](const Candidate& cand) { return pairing(bundle.eval_drift(cand.t, cand.inputs[0]), cand.inputs[0]); };
  auto drift_dual = [&](const Candidate& cand) {
    return std::pow(triple.vstar_norm(bundle.eval_drift(cand.t, cand.inputs[0])), beta / (beta - 1.0));
  };
  auto b_sq = [&](const Candidate& cand) {
    return hilbert_schmidt_sq(bundle.eval_diffusion(cand.t, cand.inputs[0]));
  };
  const int sweeps = o.refine_sweeps;
  const double rel = o.relative_tolerance;

  HypothesisReport report;
  if (part == Part::I) {
    report.entries.push_back(run({"H3-coercivity", o.samples, generate_one,
                                  [&](const Candidate& cand) {
                                    const auto& u = cand.inputs[0];
                                    return InequalityTerms{2.0 * drift_pair(cand),
                                                           c.f() * (1.0 + u.squaredNorm()) -
                                                               c.C_coercive * std::pow(vn(u), beta)};
                                  },
                                  {}, sweeps, rel}));
    report.entries.push_back(run({"H4-growth", o.samples, generate_one,
                                  [&](const Candidate& cand) {
                                    const auto& u = cand.inputs[0];
                                    return InequalityTerms{drift_dual(cand), (c.f() + c.C_growth * std::pow(vn(u), beta)) *
                                                                                 (1.0 + std::pow(hn(u), c.alpha))};
                                  },
                                  {}, sweeps, rel}));
    report.entries.push_back(run({"H5-growth", o.samples, generate_one,
                                  [&](const Candidate& cand) {
                                    return InequalityTerms{b_sq(cand), c.g() * (1.0 + cand.inputs[0].squaredNorm())};
                                  },
                                  {}, sweeps, rel}));
    // Sequential continuity is only probed along u_k = u + 2^-k d.
    constexpr int kDepth = 40;
    report.entries.push_back(run({"H5-continuity", o.samples, generate_seq,
                                  [&](const Candidate& cand) {
                                    const auto& u = cand.inputs[0];
                                    const Vector uk = u + std::ldexp(1.0, -kDepth) * cand.inputs[1];
                                    const Matrix bu = bundle.eval_diffusion(cand.t, u);
                                    const double diff = std::sqrt(hilbert_schmidt_sq(bundle.eval_diffusion(cand.t, uk) - bu));
                                    return InequalityTerms{diff / (1.0 + std::sqrt(hilbert_schmidt_sq(bu))), 0.0};
                                  },
                                  {}, 0, rel}));
    report.entries.push_back(run({"H6-continuity", o.samples, generate_seq,
                                  [&](const Candidate& cand) {
                                    const auto& u = cand.inputs[0];
                                    const Vector uk = u + std::ldexp(1.0, -kDepth) * cand.inputs[1];
                                    const double diff = std::sqrt(jump_pairing_sq(bundle, cand.t, uk, u));
                                    const double base = std::sqrt(jump_moment(bundle, cand.t, u, 2.0));
                                    return InequalityTerms{diff / (1.0 + base), 0.0};
                                  },
                                  {}, 0, rel}));
  } else {
    report.entries.push_back(arithmetic_record("H3star-LA-positive", 0.0, c.L_A, "requires L_A > 0"));
    report.entries.push_back(run({"H3star-coercivity", o.samples, generate_one,
                                  [&](const Candidate& cand) {
                                    const auto& u = cand.inputs[0];
                                    return InequalityTerms{drift_pair(cand), c.f() * (1.0 + u.squaredNorm()) -
                                                                                 c.L_A * std::pow(vn(u), beta)};
                                  },
                                  {}, sweeps, rel}));
    report.entries.push_back(run({"H4star-growth", o.samples, generate_one,
                                  [&](const Candidate& cand) {
                                    const auto& u = cand.inputs[0];
                                    const double h = hn(u);
                                    return InequalityTerms{drift_dual(cand),
                                                           c.f() * (1.0 + std::pow(h, 2.0 + c.alpha)) +
                                                               c.C_growth * std::pow(vn(u), beta) * (1.0 + std::pow(h, c.alpha))};
                                  },
                                  {}, sweeps, rel}));
    report.entries.push_back(run({"H5star-growth", o.samples, generate_one,
                                  [&](const Candidate& cand) {
                                    const auto& u = cand.inputs[0];
                                    return InequalityTerms{b_sq(cand), c.g() * (1.0 + u.squaredNorm()) +
                                                                           c.L_B * std::pow(vn(u), beta)};
                                  },
                                  {}, sweeps, rel}));
  }

  for (const auto& [p, integral] : c.h_p_integrals) {
    const double hp = integral / c.horizon;
    const std::string name = (part == Part::I ? "H6-growth-p=" : "H6star-growth-p=") + p_label(p);
    report.entries.push_back(run({name, o.samples, generate_one,
                                  [&, p, hp](const Candidate& cand) {
                                    const auto& u = cand.inputs[0];
                                    const double h = hn(u);
                                    double rhs = hp * (1.0 + std::pow(h, p));
                                    if (part == Part::II) rhs += c.L_gamma * std::pow(h, p - 2.0) * std::pow(vn(u), beta);
                                    return InequalityTerms{jump_moment(bundle, cand.t, u, p), rhs};
                                  },
                                  {}, sweeps, rel}));
  }
  return report;
}

}  // namespace levyspde
