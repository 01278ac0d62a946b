#pragma once

#include "levyspde/coefficients.hpp"
#include "levyspde/spaces.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace levyspde {

enum class Regime { PartI, PartII };
std::string to_string(Regime r);

/// A fully wired model: triple, coefficients, declared constants and defaults.
struct ModelSpec {
  std::string id;
  GelfandTriple triple;
  CoefficientBundle bundle;
  HypothesisConstants constants;
  Regime regime = Regime::PartI;
  MonotonicityMode monotonicity = MonotonicityMode::H2;
  Vector x0;              ///< default initial datum (length dimension_cap)
  int default_level = 8;
  nlohmann::json parameters;  ///< effective parameters, echoed into metadata
  /// Part II only: admissibility computed when the model is loaded.
  std::optional<PRange> admissibility;

  ModelSpec(std::string id_, GelfandTriple triple_) : id(std::move(id_)), triple(std::move(triple_)) {}
};

std::vector<std::string> builtin_ids();

/// heat, p_laplacian, allen_cahn, burgers1d, grad_noise_linear. `params`
/// overrides named defaults (e.g. {"c": 0.5, "sigma": 0.2}).
ModelSpec builtin(const std::string& id, const nlohmann::json& params = nlohmann::json::object());

/// Builds a model from a coefficient-table record (no code execution).
ModelSpec custom_model(const nlohmann::json& record);

/// {"id": <builtin>, "params": {...}} or {"id": "custom", ...}.
ModelSpec load_model(const nlohmann::json& record);

/// Regime-appropriate audit set plus the load-time constant arithmetic.
HypothesisReport validate(const ModelSpec& spec, const AuditOptions& options);

namespace fixtures {

/// One mode, A = -mu u, B = sigma (additive) or sigma u, no jumps.
ModelSpec scalar_linear(double mu, double sigma, bool multiplicative = false);
/// A(u) = -w u + e_1 [u_1 >= 0.5]; hemicontinuity must fail.
ModelSpec step_drift(std::size_t cap = 8);
/// A = B = gamma = 0.
ModelSpec zero_model(std::size_t cap = 8);
/// gamma(u, z) = g constant (dyadic entries), marks +-1 with weight 1/2, A = B = 0.
ModelSpec constant_jump(std::size_t cap = 4);
/// gamma(u, z) = z e_1, marks +-1 with weight 1/2, A = B = 0.
ModelSpec mark_jump(std::size_t cap = 2);

}  // namespace fixtures

}  // namespace levyspde
