#include "levyspde/cli.hpp"

#include <set>

namespace levyspde::cli {

namespace {

using nlohmann::json;

/// Field access under a dotted path with unknown-key rejection.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidArgument(path_ + ": expected an object");
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    known_.insert(key);
    return j_.contains(key);
  }
  const json& raw(const std::string& key) {
    known_.insert(key);
    return j_.at(key);
  }

  template <class T>
  void read(const std::string& key, T& target) {
    if (!has(key)) return;
    try {
      target = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InvalidArgument(name(key) + ": wrong type");
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      (void)v;
      if (!known_.count(k)) throw InvalidArgument(name(k) + ": unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

void require_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw InvalidArgument(field + ": must be > 0");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Section top(doc, "");
  int version = 0;
  if (!top.has("schema_version")) throw InvalidArgument("schema_version: missing");
  top.read("schema_version", version);
  if (version != 1) throw InvalidArgument("schema_version: unsupported value " + std::to_string(version));

  if (top.has("model")) {
    c.model = top.raw("model");
    if (!c.model.is_string() && !c.model.is_object()) throw InvalidArgument("model: expected an id or an object");
  }
  top.read("seed", c.seed);
  top.read("workers", c.workers);
  if (c.workers < 1) throw InvalidArgument("workers: must be >= 1");
  top.read("out", c.out);
  top.read("format", c.format);
  if (c.format != "csv" && c.format != "json") throw InvalidArgument("format: expected csv or json");

  if (top.has("noise")) {
    Section n(top.raw("noise"), "noise");
    MarkSpace ms;
    n.read("marks", ms.marks);
    n.read("weights", ms.weights);
    n.finish();
    try {
      ms.validate();
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(std::string("noise: ") + e.what());
    }
    c.marks = ms;
  }

  if (top.has("solver")) {
    Section s(top.raw("solver"), "solver");
    std::string scheme = to_string(c.solver.scheme);
    s.read("scheme", scheme);
    try {
      c.solver.scheme = scheme_from_string(scheme);
    } catch (const InvalidArgument&) {
      throw InvalidArgument("solver.scheme: expected drift_implicit or tamed_explicit");
    }
    s.read("dt", c.solver.dt);
    s.read("T", c.solver.T);
    if (s.has("level")) {
      s.read("level", c.solver.level);
      c.solver_level_given = true;
    }
    s.read("newton_tol", c.solver.newton_tol);
    s.read("newton_max_iter", c.solver.newton_max_iter);
    s.read("retry_half_step", c.solver.retry_half_step);
    s.finish();
    require_positive(c.solver.dt, "solver.dt");
    require_positive(c.solver.T, "solver.T");
    if (c.solver.level < 1) throw InvalidArgument("solver.level: must be >= 1");
  }

  if (top.has("study")) {
    Section s(top.raw("study"), "study");
    auto& st = c.study;
    s.read("p", st.p);
    s.read("m", st.m);
    s.read("delta", st.delta);
    s.read("dt", st.dt);
    s.read("n_paths", st.n_paths);
    s.read("samples", st.samples);
    s.read("stress", st.stress);
    s.read("shift", st.shift);
    if (s.has("beta")) {
      double b = 0.0;
      s.read("beta", b);
      st.beta = b;
    }
    if (s.has("N")) {
      double n = 0.0;
      s.read("N", n);
      require_positive(n, "study.N");
      st.stop_N = n;
    }
    s.finish();
    for (double p : st.p)
      if (!(p >= 1.0)) throw InvalidArgument("study.p: values must be >= 1");
    for (int m : st.m)
      if (m < 1) throw InvalidArgument("study.m: values must be >= 1");
    for (double d : st.dt) require_positive(d, "study.dt");
    if (st.samples < 1) throw InvalidArgument("study.samples: must be >= 1");
  }
  top.finish();
  return c;
}

ModelSpec resolve_model(const ExperimentConfig& config) {
  ModelSpec spec = [&] {
    try {
      return load_model(config.model);
    } catch (const InvalidArgument& e) {
      const std::string what = e.what();
      throw InvalidArgument(what.rfind("model", 0) == 0 ? what : "model: " + what);
    } catch (const nlohmann::json::exception&) {
      throw InvalidArgument("model: malformed record");
    }
  }();
  if (config.marks) {
    if (!spec.bundle.jump) throw InvalidArgument("noise: model " + spec.id + " has no jump coefficient");
    spec.bundle.mark_space = *config.marks;
  }
  return spec;
}

}  // namespace levyspde::cli
