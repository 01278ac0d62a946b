#include "levyspde/models.hpp"

#include <cmath>

namespace levyspde {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw InvalidArgument("custom model: field '" + field + "' " + why);
}

double number(const json& j, const std::string& key, double def, const std::string& path) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number()) bad(path + key, "must be a number");
  return j[key].get<double>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "must be an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) bad(path, "must be an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

GelfandTriple make_triple(const json& t) {
  const std::string family = t.value("family", "dirichlet_sine");
  const auto cap = static_cast<std::size_t>(number(t, "cap", 16, "triple."));
  const auto grid = static_cast<std::size_t>(number(t, "grid", 64, "triple."));
  if (family == "dirichlet_sine") return GelfandTriple::dirichlet_sine(cap, grid);
  if (family == "periodic_fourier") return GelfandTriple::periodic_fourier(cap, grid);
  if (family == "custom") {
    if (!t.contains("weights")) bad("triple.weights", "is required for the custom family");
    return GelfandTriple(t.value("name", "custom"), numbers(t["weights"], "triple.weights"));
  }
  bad("triple.family", "must be dirichlet_sine, periodic_fourier or custom");
}

/// a + b * S(u)^2, S the sup bound of the physical basis.
StateFunctional sup_functional(const json& j, const GelfandTriple& triple, const std::string& path) {
  const double a = number(j, "const", 0.0, path + ".");
  const double b = number(j, "sup_sq", 0.0, path + ".");
  if (b != 0.0 && triple.family() == BasisFamily::Custom) bad(path + ".sup_sq", "needs a physical basis family");
  return [a, b, triple](const Vector& u) {
    if (b == 0.0) return a;
    const double S = triple.sup_bound(u);
    return a + b * S * S;
  };
}

}  // namespace

ModelSpec custom_model(const json& r) {
  if (!r.is_object()) throw InvalidArgument("custom model: record must be an object");
  ModelSpec s(r.value("name", "custom"), make_triple(r.value("triple", json::object())));
  const GelfandTriple tri = s.triple;
  const auto cap = tri.dimension_cap();
  auto& b = s.bundle;

  // Drift: diagonal spectrum (explicit or -nu (w - shift)) plus a polynomial reaction on the grid.
  const json drift = r.value("drift", json::object());
  std::vector<double> spec;
  if (drift.contains("spectrum")) {
    spec = numbers(drift["spectrum"], "drift.spectrum");
    if (spec.size() < cap) bad("drift.spectrum", "needs dimension_cap entries");
  } else {
    const double nu = number(drift, "laplacian", 1.0, "drift.");
    const double shift = tri.family() == BasisFamily::PeriodicFourier ? 1.0 : 0.0;
    for (std::size_t j = 0; j < cap; ++j) spec.push_back(-nu * (tri.weight(j) - shift));
  }
  b.stiff_diagonal = [spec](std::size_t m) {
    Vector d(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) d[static_cast<Eigen::Index>(j)] = spec.at(j);
    return d;
  };
  const auto diag = b.stiff_diagonal;
  std::vector<double> poly;
  if (drift.contains("reaction")) poly = numbers(drift["reaction"], "drift.reaction");
  bool has_reaction = false;
  for (double a : poly) has_reaction = has_reaction || a != 0.0;
  if (!has_reaction) {
    b.drift_is_linear_diagonal = true;
    b.drift = [diag](double, const Vector& u) { return Vector(diag(static_cast<std::size_t>(u.size())).cwiseProduct(u)); };
  } else {
    if (tri.family() == BasisFamily::Custom) bad("drift.reaction", "needs a physical basis family");
    const auto G = tri.grid_ptr();
    auto eval = [poly](const Eigen::ArrayXd& x, bool derivative) {
      Eigen::ArrayXd out = Eigen::ArrayXd::Zero(x.size());
      for (std::size_t k = poly.size(); k-- > 0;) {
        if (derivative) {
          if (k == 0) break;
          out = out * x + static_cast<double>(k) * poly[k];
        } else {
          out = out * x + poly[k];
        }
      }
      return out;
    };
    b.drift = [G, diag, eval](double, const Vector& u) {
      const auto m = static_cast<std::size_t>(u.size());
      const Eigen::ArrayXd x = G->to_grid(u).array();
      return Vector(diag(m).cwiseProduct(u) + G->from_grid(eval(x, false).matrix(), m));
    };
    b.drift_jacobian = [G, diag, eval](double, const Vector& u) {
      const Eigen::ArrayXd x = G->to_grid(u).array();
      const auto E = G->basis().leftCols(u.size());
      const Vector w = (G->quadrature_weight() * eval(x, true)).matrix();
      Matrix J = E.transpose() * w.asDiagonal() * E;
      J.diagonal() += diag(static_cast<std::size_t>(u.size()));
      return J;
    };
  }

  const json diff = r.value("diffusion", json::object());
  const std::string dtype = diff.value("type", "none");
  const double c = number(diff, "c", 0.0, "diffusion.");
  if (dtype == "multiplicative") {
    b.diffusion = [c](double, const Vector& u) { return Matrix(c * u.asDiagonal()); };
  } else if (dtype == "additive") {
    b.diffusion = [c](double, const Vector& u) { return Matrix(c * Matrix::Identity(u.size(), u.size())); };
  } else if (dtype != "none") {
    bad("diffusion.type", "must be none, additive or multiplicative");
  }

  const json jump = r.value("jump", json::object());
  const std::string jtype = jump.value("type", "none");
  const double sigma = number(jump, "sigma", 0.0, "jump.");
  if (jtype != "none") {
    b.mark_space.marks = jump.contains("marks") ? numbers(jump["marks"], "jump.marks") : std::vector<double>{1.0, -1.0};
    b.mark_space.weights = jump.contains("weights") ? numbers(jump["weights"], "jump.weights") : std::vector<double>{0.5, 0.5};
    try {
      b.mark_space.validate();
    } catch (const InvalidArgument& e) {
      bad("jump.weights", e.what());
    }
    if (jtype == "multiplicative") {
      b.jump = [sigma](double, const Vector& u, double z) { return Vector(sigma * z * u); };
    } else if (jtype == "additive") {
      b.jump = [sigma](double, const Vector& u, double z) {
        Vector g = Vector::Zero(u.size());
        g[0] = sigma * z;
        return g;
      };
    } else {
      bad("jump.type", "must be none, additive or multiplicative");
    }
  }

  if (r.contains("rho")) b.rho = sup_functional(r["rho"], tri, "rho");
  if (r.contains("eta")) b.eta = sup_functional(r["eta"], tri, "eta");
  if (r.contains("M")) {
    const double a = number(r["M"], "const", 0.0, "M.");
    const double q = number(r["M"], "r_sq", 0.0, "M.");
    b.monotonicity_bound = [a, q](double, double rr) { return a + q * rr * rr; };
  }

  const std::string regime = r.value("regime", "part1");
  if (regime == "part2") {
    s.regime = Regime::PartII;
    s.monotonicity = MonotonicityMode::H2Star;
  } else if (regime != "part1") {
    bad("regime", "must be part1 or part2");
  }
  if (r.contains("monotonicity")) {
    const std::string mode = r["monotonicity"].get<std::string>();
    if (mode == "H2") s.monotonicity = MonotonicityMode::H2;
    else if (mode == "H2prime") s.monotonicity = MonotonicityMode::H2Prime;
    else if (mode == "H2star") s.monotonicity = MonotonicityMode::H2Star;
    else bad("monotonicity", "must be H2, H2prime or H2star");
  }

  const json k = r.value("constants", json::object());
  auto& C = s.constants;
  C.horizon = number(k, "T", 1.0, "constants.");
  C.beta = number(k, "beta", 2.0, "constants.");
  C.f_integral = number(k, "f", 0.0, "constants.") * C.horizon;
  C.g_integral = number(k, "g", 0.0, "constants.") * C.horizon;
  if (k.contains("h_p")) {
    if (!k["h_p"].is_object()) bad("constants.h_p", "must map p to a rate");
    for (const auto& [p, v] : k["h_p"].items()) {
      if (!v.is_number()) bad("constants.h_p." + p, "must be a number");
      C.h_p_integrals[std::stod(p)] = v.get<double>() * C.horizon;
    }
  }
  C.C_monotone = number(k, "C_monotone", 0.0, "constants.");
  C.C_coercive = number(k, "C_coercive", 0.0, "constants.");
  C.C_growth = number(k, "C_growth", 0.0, "constants.");
  C.zeta = number(k, "zeta", 0.0, "constants.");
  C.alpha = number(k, "alpha", 0.0, "constants.");
  C.lambda_exp = number(k, "lambda_exp", 0.0, "constants.");
  C.theta_exp = number(k, "theta_exp", 0.0, "constants.");
  C.L_A = number(k, "L_A", 0.0, "constants.");
  C.L_B = number(k, "L_B", 0.0, "constants.");
  C.L_gamma = number(k, "L_gamma", 0.0, "constants.");
  try {
    C.validate();
  } catch (const InvalidArgument& e) {
    bad("constants", e.what());
  }

  s.x0 = Vector::Zero(static_cast<Eigen::Index>(cap));
  if (r.contains("x0")) {
    const auto& x = r["x0"];
    if (x.is_array()) {
      const auto v = numbers(x, "x0");
      for (std::size_t j = 0; j < std::min(v.size(), cap); ++j) s.x0[static_cast<Eigen::Index>(j)] = v[j];
    } else if (x.is_object()) {
      const double scale = number(x, "scale", 1.0, "x0.");
      const double decay = number(x, "decay", 2.0, "x0.");
      for (std::size_t j = 0; j < cap; ++j) s.x0[static_cast<Eigen::Index>(j)] = scale * std::pow(double(j + 1), -decay);
    } else {
      bad("x0", "must be an array or {scale, decay}");
    }
  }
  s.default_level = static_cast<int>(number(r, "level", std::min<double>(8.0, double(cap)), ""));
  if (s.default_level < 1 || static_cast<std::size_t>(s.default_level) > cap) bad("level", "must lie in [1, cap]");
  s.parameters = r;
  if (s.regime == Regime::PartII) s.admissibility = admissible_p_range(C);
  return s;
}

}  // namespace levyspde
