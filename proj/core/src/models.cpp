#include "levyspde/models.hpp"

#include <cmath>
#include <set>

namespace levyspde {

std::string to_string(Regime r) { return r == Regime::PartI ? "part1" : "part2"; }

std::vector<std::string> builtin_ids() { return {"heat", "p_laplacian", "allen_cahn", "burgers1d", "grad_noise_linear"}; }

namespace {

/// Reads named parameters with defaults and rejects unknown keys.
class Params {
 public:
  Params(const nlohmann::json& given, std::string model) : given_(given), model_(std::move(model)) {
    if (!given_.is_null() && !given_.is_object()) throw InvalidArgument(model_ + ": params must be an object");
  }
  double get(const std::string& key, double def) {
    known_.insert(key);
    double v = def;
    if (given_.is_object() && given_.contains(key)) {
      if (!given_[key].is_number()) throw InvalidArgument(model_ + ": params." + key + " must be a number");
      v = given_[key].get<double>();
    }
    effective_[key] = v;
    return v;
  }
  nlohmann::json finish() const {
    if (given_.is_object())
      for (const auto& [k, _] : given_.items())
        if (!known_.count(k)) throw InvalidArgument(model_ + ": unknown parameter params." + k);
    return effective_;
  }

 private:
  const nlohmann::json& given_;
  std::string model_;
  std::set<std::string> known_;
  nlohmann::json effective_ = nlohmann::json::object();
};

Vector decaying(std::size_t n, double scale, double power, double offset = 0.0) {
  Vector x(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) x[static_cast<Eigen::Index>(j)] = scale * std::pow(static_cast<double>(j) + 1.0 + offset, -power);
  return x;
}

/// Linear part D = -nu (w - shift) for both physical families.
StiffDiagonalFn laplacian_diagonal(const GelfandTriple& triple, double nu, double shift) {
  std::vector<double> w(triple.weights().begin(), triple.weights().end());
  return [w, nu, shift](std::size_t m) {
    Vector d(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) d[static_cast<Eigen::Index>(j)] = -nu * (w.at(j) - shift);
    return d;
  };
}

void multiplicative_noise(CoefficientBundle& b, double c, double sigma) {
  if (c != 0.0) b.diffusion = [c](double, const Vector& u) { return Matrix(c * u.asDiagonal()); };
  if (sigma != 0.0) {
    b.mark_space = MarkSpace::symmetric(1.0, 0.5);
    b.jump = [sigma](double, const Vector& u, double z) { return Vector(sigma * z * u); };
  }
}

void jump_growth_constants(HypothesisConstants& k, double sigma) {
  // Marks +-1 with weight 1/2: sum lambda |z|^p = 1.
  for (double p : {2.0, 4.0}) k.h_p_integrals[p] = std::pow(std::abs(sigma), p) * k.horizon;
}

ModelSpec heat(const nlohmann::json& params) {
  Params P(params, "heat");
  const auto cap = static_cast<std::size_t>(P.get("cap", 64));
  const double c = P.get("c", 0.5);
  const double sigma = P.get("sigma", 0.2);
  const double T = P.get("T", 1.0);
  ModelSpec s("heat", GelfandTriple::dirichlet_sine(cap));
  auto& b = s.bundle;
  const auto diag = laplacian_diagonal(s.triple, 1.0, 0.0);
  b.stiff_diagonal = diag;
  b.drift_is_linear_diagonal = true;
  b.drift = [diag](double, const Vector& u) { return Vector(diag(static_cast<std::size_t>(u.size())).cwiseProduct(u)); };
  b.drift_jacobian = [diag](double, const Vector& u) { return Matrix(diag(static_cast<std::size_t>(u.size())).asDiagonal()); };
  multiplicative_noise(b, c, sigma);
  b.rho = [](const Vector&) { return 0.0; };
  b.eta = [](const Vector&) { return 0.0; };
  b.monotonicity_bound = [](double, double) { return 0.0; };

  auto& k = s.constants;
  k.beta = 2.0;
  k.horizon = T;
  // -2|d|_V^2 + (c^2 + sigma^2)|d|^2 <= 0 because w_j >= 1, so f = 0 suffices.
  k.f_integral = 0.0;
  k.g_integral = c * c * T;
  jump_growth_constants(k, sigma);
  k.C_coercive = 2.0;
  k.C_growth = 1.0;
  s.x0 = decaying(cap, 1.0, 3.0);
  s.default_level = 16;
  s.parameters = P.finish();
  if (c * c + sigma * sigma > 2.0) throw InvalidArgument("heat: c^2 + sigma^2 must not exceed 2");
  return s;
}

ModelSpec allen_cahn(const nlohmann::json& params) {
  Params P(params, "allen_cahn");
  const auto cap = static_cast<std::size_t>(P.get("cap", 32));
  const auto grid = static_cast<std::size_t>(P.get("grid", 64));
  const double c = P.get("c", 0.3);
  const double sigma = P.get("sigma", 0.2);
  const double T = P.get("T", 1.0);
  ModelSpec s("allen_cahn", GelfandTriple::periodic_fourier(cap, grid));
  auto& b = s.bundle;
  const auto diag = laplacian_diagonal(s.triple, 1.0, 1.0);
  // Captured by value: the spec (and its triple) is moved after construction.
  const GelfandTriple tri = s.triple;
  const auto G = tri.grid_ptr();
  b.stiff_diagonal = diag;
  b.drift = [G, diag](double, const Vector& u) {
    const auto m = static_cast<std::size_t>(u.size());
    const Vector x = G->to_grid(u);
    const Vector r = (x.array() - x.array().cube()).matrix();
    return Vector(diag(m).cwiseProduct(u) + G->from_grid(r, m));
  };
  b.drift_jacobian = [G, diag](double, const Vector& u) {
    const auto m = static_cast<std::size_t>(u.size());
    const Vector x = G->to_grid(u);
    const auto E = G->basis().leftCols(u.size());
    const Vector w = (G->quadrature_weight() * (1.0 - 3.0 * x.array().square())).matrix();
    Matrix J = E.transpose() * w.asDiagonal() * E;
    J.diagonal() += diag(m);
    return J;
  };
  multiplicative_noise(b, c, sigma);
  // |u^3 - v^3| <= (3/2)(u^2 + v^2)|u - v| pointwise gives rho = eta = 3 S^2,
  // with S a rigorous bound on sup |u|.
  b.rho = [tri](const Vector& u) { const double S = tri.sup_bound(u); return 3.0 * S * S; };
  b.eta = b.rho;
  b.monotonicity_bound = [](double, double) { return 1.0; };

  auto& k = s.constants;
  k.beta = 2.0;
  k.horizon = T;
  // 2<N(u) - N(v), u - v> <= 2|u - v|^2 and 2<Au, u> = -2|u|_V^2 + 4|u|^2 - 2 int u^4.
  k.f_integral = 4.0 * T;
  k.g_integral = c * c * T;
  jump_growth_constants(k, sigma);
  k.C_coercive = 2.0;
  k.C_growth = 4.0;
  k.alpha = 4.0;
  k.C_monotone = 3.5;
  s.x0 = Vector::Zero(static_cast<Eigen::Index>(cap));
  s.x0.head(std::min<Eigen::Index>(5, s.x0.size())) << 0.4, 0.5, -0.3, 0.2, 0.1;
  s.default_level = 16;
  s.parameters = P.finish();
  return s;
}

ModelSpec burgers(const nlohmann::json& params) {
  Params P(params, "burgers1d");
  const auto cap = static_cast<std::size_t>(P.get("cap", 32));
  const auto grid = static_cast<std::size_t>(P.get("grid", 64));
  const double nu = P.get("nu", 0.5);
  const double c = P.get("c", 0.3);
  const double sigma = P.get("sigma", 0.2);
  const double T = P.get("T", 1.0);
  if (!(nu > 0.0)) throw InvalidArgument("burgers1d: params.nu must be positive");
  ModelSpec s("burgers1d", GelfandTriple::periodic_fourier(cap, grid));
  auto& b = s.bundle;
  const auto diag = laplacian_diagonal(s.triple, nu, 1.0);
  // Captured by value: the spec (and its triple) is moved after construction.
  const GelfandTriple tri = s.triple;
  const auto G = tri.grid_ptr();
  b.stiff_diagonal = diag;
  b.drift = [G, diag](double, const Vector& u) {
    const auto m = static_cast<std::size_t>(u.size());
    const Vector x = G->to_grid(u);
    const Vector dx = G->derivative_to_grid(u);
    return Vector(diag(m).cwiseProduct(u) - G->from_grid(x.cwiseProduct(dx), m));
  };
  b.drift_jacobian = [G, diag](double, const Vector& u) {
    const auto m = static_cast<std::size_t>(u.size());
    const Vector x = G->to_grid(u);
    const Vector dx = G->derivative_to_grid(u);
    const auto E = G->basis().leftCols(u.size());
    const auto D = G->basis_derivative().leftCols(u.size());
    Matrix J = -G->quadrature_weight() * (E.transpose() * (dx.asDiagonal() * E + x.asDiagonal() * D));
    J.diagonal() += diag(m);
    return J;
  };
  multiplicative_noise(b, c, sigma);
  // 2<b(v) - b(u), d> = int (u + v) d d_x is split evenly between u and v and
  // each half absorbed by nu |d_x|^2.
  b.rho = [tri, nu](const Vector& u) { const double S = tri.sup_bound(u); return S * S / (4.0 * nu); };
  b.eta = b.rho;
  const double K = s.triple.sup_bound_constant(cap);
  b.monotonicity_bound = [K, nu](double, double r) { return K * K * r * r / (4.0 * nu); };

  auto& k = s.constants;
  k.beta = 2.0;
  k.horizon = T;
  // 2<Au, u> = -2 nu |u_x|^2 = -2 nu (|u|_V^2 - |u|^2).
  k.f_integral = std::max(2.0 * nu, c * c + sigma * sigma) * T;
  k.g_integral = c * c * T;
  jump_growth_constants(k, sigma);
  k.C_coercive = 2.0 * nu;
  k.C_growth = 2.0;
  k.alpha = 2.0;
  k.C_monotone = 0.6 / (2.0 * nu);
  s.x0 = Vector::Zero(static_cast<Eigen::Index>(cap));
  s.x0.head(std::min<Eigen::Index>(5, s.x0.size())) << 0.2, 0.6, 0.3, -0.2, 0.1;
  s.default_level = 16;
  s.parameters = P.finish();
  return s;
}

ModelSpec p_laplacian(const nlohmann::json& params) {
  Params P(params, "p_laplacian");
  const auto cap = static_cast<std::size_t>(P.get("cap", 32));
  const auto grid = static_cast<std::size_t>(P.get("grid", 64));
  const double p = P.get("p", 3.0);
  const double c = P.get("c", 0.3);
  const double sigma = P.get("sigma", 0.2);
  const double T = P.get("T", 1.0);
  if (!(p > 2.0)) throw InvalidArgument("p_laplacian: params.p must exceed 2");
  ModelSpec s("p_laplacian", GelfandTriple::dirichlet_sine(cap, grid));
  auto& b = s.bundle;
  // Captured by value: the spec (and its triple) is moved after construction.
  const GelfandTriple tri = s.triple;
  const auto G = tri.grid_ptr();
  b.drift = [G, p](double, const Vector& u) {
    const auto m = static_cast<std::size_t>(u.size());
    const Vector a = G->derivative_to_grid(u);
    const Vector flux = (a.array().abs().pow(p - 2.0) * a.array()).matrix();
    return Vector(-G->from_grid_derivative(flux, m));
  };
  b.drift_jacobian = [G, p](double, const Vector& u) {
    const Vector a = G->derivative_to_grid(u);
    const auto D = G->basis_derivative().leftCols(u.size());
    const Vector w = (G->quadrature_weight() * (p - 1.0) * a.array().abs().pow(p - 2.0)).matrix();
    return Matrix(-(D.transpose() * w.asDiagonal() * D));
  };
  b.v_norm = [G, p](const Vector& u) {
    const Vector a = G->derivative_to_grid(u);
    return std::pow(G->integrate(a.array().abs().pow(p).matrix()), 1.0 / p);
  };
  multiplicative_noise(b, c, sigma);
  b.rho = [](const Vector&) { return 0.0; };
  b.eta = [](const Vector&) { return 0.0; };
  b.monotonicity_bound = [](double, double) { return 0.0; };

  auto& k = s.constants;
  k.beta = p;
  k.horizon = T;
  k.f_integral = (c * c + sigma * sigma) * T;
  k.g_integral = c * c * T;
  jump_growth_constants(k, sigma);
  k.C_coercive = 2.0;
  // |A|_{V*} <= |flux|_{L2} and the discrete L^{2(p-1)} / L^p comparison on the grid.
  k.C_growth = 0.5 * std::pow(static_cast<double>(grid) / 3.141592653589793, 0.5 * (p - 2.0) / (p - 1.0)) + 1.0;
  s.x0 = decaying(cap, 1.0, 2.0);
  s.default_level = 8;
  s.parameters = P.finish();
  return s;
}

ModelSpec grad_noise_linear(const nlohmann::json& params) {
  Params P(params, "grad_noise_linear");
  const auto cap = static_cast<std::size_t>(P.get("cap", 64));
  const double cB = P.get("c_B", 0.1);
  const double cG = P.get("c_gamma", 1e-3);
  const double LA = P.get("L_A", 1.0);
  const double T = P.get("T", 1.0);
  if (!(LA > 0.0)) throw InvalidArgument("grad_noise_linear: params.L_A must be positive");
  ModelSpec s("grad_noise_linear", GelfandTriple::dirichlet_sine(cap));
  s.regime = Regime::PartII;
  s.monotonicity = MonotonicityMode::H2Star;
  auto& b = s.bundle;
  const auto diag = laplacian_diagonal(s.triple, LA, 0.0);
  std::vector<double> w(s.triple.weights().begin(), s.triple.weights().end());
  auto root_w = [w](Eigen::Index m) {
    Vector r(m);
    for (Eigen::Index j = 0; j < m; ++j) r[j] = std::sqrt(w.at(static_cast<std::size_t>(j)));
    return r;
  };
  b.stiff_diagonal = diag;
  b.drift_is_linear_diagonal = true;
  b.drift = [diag](double, const Vector& u) { return Vector(diag(static_cast<std::size_t>(u.size())).cwiseProduct(u)); };
  b.drift_jacobian = [diag](double, const Vector& u) { return Matrix(diag(static_cast<std::size_t>(u.size())).asDiagonal()); };
  if (cB != 0.0)
    b.diffusion = [cB, root_w](double, const Vector& u) { return Matrix((cB * root_w(u.size()).cwiseProduct(u)).asDiagonal()); };
  if (cG != 0.0) {
    b.mark_space = MarkSpace::symmetric(1.0, 0.5);
    b.jump = [cG, root_w](double, const Vector& u, double z) { return Vector(cG * z * root_w(u.size()).cwiseProduct(u)); };
  }
  b.rho = [](const Vector&) { return 0.0; };
  b.eta = [](const Vector&) { return 0.0; };

  auto& k = s.constants;
  k.beta = 2.0;
  k.horizon = T;
  k.f_integral = 0.0;
  k.g_integral = 0.0;
  k.h_p_integrals[2.0] = 0.0;
  k.C_growth = LA * LA;
  k.C_monotone = 0.0;
  k.alpha = 1.0;
  k.L_A = LA;
  k.L_B = cB * cB;
  k.L_gamma = cG * cG;  // sum lambda z^2 = 1
  s.x0 = decaying(cap, 1.0, 3.0);
  s.default_level = 16;
  s.parameters = P.finish();
  s.admissibility = admissible_p_range(k);
  return s;
}

}  // namespace

ModelSpec builtin(const std::string& id, const nlohmann::json& params) {
  if (id == "heat") return heat(params);
  if (id == "allen_cahn") return allen_cahn(params);
  if (id == "burgers1d") return burgers(params);
  if (id == "p_laplacian") return p_laplacian(params);
  if (id == "grad_noise_linear") return grad_noise_linear(params);
  throw InvalidArgument("unknown model id '" + id + "'");
}

ModelSpec load_model(const nlohmann::json& record) {
  if (record.is_string()) return builtin(record.get<std::string>());
  if (!record.is_object() || !record.contains("id")) throw InvalidArgument("model: expected an object with an id");
  const auto id = record.at("id").get<std::string>();
  if (id == "custom") return custom_model(record);
  return builtin(id, record.value("params", nlohmann::json::object()));
}

HypothesisReport validate(const ModelSpec& spec, const AuditOptions& options) {
  HypothesisReport report;
  try {
    spec.constants.validate();
  } catch (const InvalidArgument& e) {
    HypothesisRecord r;
    r.name = "constants-valid";
    r.verdict = Verdict::Fail;
    r.worst_margin = -1.0;
    r.note = e.what();
    report.entries.push_back(r);
    return report;
  }
  report.entries.push_back(audit_hemicontinuity(spec.bundle, spec.triple, options));
  if (spec.regime == Regime::PartI) {
    report.append(audit_local_monotonicity(spec.bundle, spec.constants, spec.triple, spec.monotonicity, options));
    report.append(audit_coercivity_growth(spec.bundle, spec.constants, spec.triple, Part::I, options));
    return report;
  }
  report.append(audit_local_monotonicity(spec.bundle, spec.constants, spec.triple, MonotonicityMode::H2Star, options));
  report.append(audit_coercivity_growth(spec.bundle, spec.constants, spec.triple, Part::II, options));
  // Strict constant condition at the smallest moment p = 2.
  const auto& k = spec.constants;
  HypothesisRecord r;
  r.name = "admissibility-strict-condition";
  r.lhs = k.L_B + 2.0 * c1(2.0) * k.L_gamma;
  r.rhs = (2.0 * k.L_A + k.L_B) / chi(k);
  r.worst_margin = r.rhs - r.lhs;
  r.samples_used = 1;
  r.verdict = r.worst_margin > 0.0 ? Verdict::Pass : Verdict::Fail;
  const auto range = spec.admissibility ? *spec.admissibility : admissible_p_range(k);
  r.note = range.empty ? "admissible p-range is empty"
                       : (range.unbounded ? "admissible p-range [2, inf)"
                                          : "admissible p-range [2, " + std::to_string(range.upper) + ")");
  report.entries.push_back(r);
  return report;
}

namespace fixtures {

ModelSpec scalar_linear(double mu, double sigma, bool multiplicative) {
  ModelSpec s("scalar_linear", GelfandTriple("scalar", {1.0}));
  auto& b = s.bundle;
  b.stiff_diagonal = [mu](std::size_t m) { return Vector(Vector::Constant(static_cast<Eigen::Index>(m), -mu)); };
  b.drift_is_linear_diagonal = true;
  b.drift = [mu](double, const Vector& u) { return Vector(-mu * u); };
  b.drift_jacobian = [mu](double, const Vector& u) { return Matrix(-mu * Matrix::Identity(u.size(), u.size())); };
  if (multiplicative)
    b.diffusion = [sigma](double, const Vector& u) { return Matrix(sigma * u.asDiagonal()); };
  else
    b.diffusion = [sigma](double, const Vector& u) { return Matrix(sigma * Matrix::Identity(u.size(), u.size())); };
  b.rho = [](const Vector&) { return 0.0; };
  b.eta = [](const Vector&) { return 0.0; };
  auto& k = s.constants;
  k.f_integral = multiplicative ? sigma * sigma : 0.0;
  k.g_integral = sigma * sigma;
  k.C_coercive = 0.0;
  k.C_growth = mu * mu;
  s.x0 = Vector::Constant(1, 1.0);
  s.default_level = 1;
  s.parameters = {{"mu", mu}, {"sigma", sigma}, {"multiplicative", multiplicative}};
  return s;
}

ModelSpec step_drift(std::size_t cap) {
  ModelSpec s("step_drift", GelfandTriple::dirichlet_sine(cap));
  const auto diag = laplacian_diagonal(s.triple, 1.0, 0.0);
  s.bundle.drift = [diag](double, const Vector& u) {
    Vector a = diag(static_cast<std::size_t>(u.size())).cwiseProduct(u);
    a[0] += u[0] >= 0.5 ? 1.0 : 0.0;
    return a;
  };
  s.bundle.rho = [](const Vector&) { return 0.0; };
  s.bundle.eta = [](const Vector&) { return 0.0; };
  // 2 u_1 <= 1 + |u|^2 keeps coercivity and growth intact; only continuity breaks.
  s.constants.f_integral = 1.0;
  s.constants.C_coercive = 2.0;
  s.constants.C_growth = 2.0;
  s.x0 = Vector::Zero(static_cast<Eigen::Index>(cap));
  return s;
}

ModelSpec zero_model(std::size_t cap) {
  ModelSpec s("zero", GelfandTriple::dirichlet_sine(cap));
  s.bundle.drift = [](double, const Vector& u) { return Vector(Vector::Zero(u.size())); };
  s.bundle.stiff_diagonal = [](std::size_t m) { return Vector(Vector::Zero(static_cast<Eigen::Index>(m))); };
  s.bundle.drift_is_linear_diagonal = true;
  s.bundle.rho = [](const Vector&) { return 0.0; };
  s.bundle.eta = [](const Vector&) { return 0.0; };
  s.x0 = decaying(cap, 1.0, 1.0);
  s.default_level = static_cast<int>(cap);
  return s;
}

ModelSpec constant_jump(std::size_t cap) {
  ModelSpec s("constant_jump", GelfandTriple::dirichlet_sine(cap));
  Vector g(static_cast<Eigen::Index>(cap));
  for (std::size_t j = 0; j < cap; ++j) g[static_cast<Eigen::Index>(j)] = std::ldexp(j % 2 ? -1.0 : 1.0, -static_cast<int>(j) - 1);
  s.bundle.drift = [](double, const Vector& u) { return Vector(Vector::Zero(u.size())); };
  s.bundle.stiff_diagonal = [](std::size_t m) { return Vector(Vector::Zero(static_cast<Eigen::Index>(m))); };
  s.bundle.drift_is_linear_diagonal = true;
  s.bundle.mark_space = MarkSpace::symmetric(1.0, 0.5);
  s.bundle.jump = [g](double, const Vector& u, double) { return Vector(g.head(u.size())); };
  s.x0 = Vector::Zero(static_cast<Eigen::Index>(cap));
  s.x0[0] = 0.5;
  s.default_level = static_cast<int>(cap);
  return s;
}

ModelSpec mark_jump(std::size_t cap) {
  ModelSpec s("mark_jump", GelfandTriple::dirichlet_sine(cap));
  s.bundle.drift = [](double, const Vector& u) { return Vector(Vector::Zero(u.size())); };
  s.bundle.stiff_diagonal = [](std::size_t m) { return Vector(Vector::Zero(static_cast<Eigen::Index>(m))); };
  s.bundle.drift_is_linear_diagonal = true;
  s.bundle.mark_space = MarkSpace::symmetric(1.0, 0.5);
  s.bundle.jump = [](double, const Vector& u, double z) {
    Vector g = Vector::Zero(u.size());
    g[0] = z;
    return g;
  };
  s.x0 = Vector::Zero(static_cast<Eigen::Index>(cap));
  s.default_level = static_cast<int>(cap);
  return s;
}

}  // namespace fixtures

}  // namespace levyspde
