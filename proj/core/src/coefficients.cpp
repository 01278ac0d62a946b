#include "levyspde/coefficients.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace levyspde {

Vector CoefficientBundle::eval_drift(double t, const Vector& u) const {
  if (!drift) return Vector::Zero(u.size());
  return drift(t, u);
}

Matrix CoefficientBundle::eval_diffusion(double t, const Vector& u) const {
  if (!diffusion) return Matrix::Zero(u.size(), u.size());
  return diffusion(t, u);
}

Vector CoefficientBundle::eval_jump(double t, const Vector& u, double z) const {
  if (!jump) return Vector::Zero(u.size());
  return jump(t, u, z);
}

double CoefficientBundle::eval_v_norm(const GelfandTriple& triple, const Vector& u) const {
  return v_norm ? v_norm(u) : triple.v_norm(u);
}

double HypothesisConstants::h(double p) const {
  auto it = h_p_integrals.find(p);
  if (it == h_p_integrals.end()) throw ConfigurationError("no h_p declared for p = " + std::to_string(p));
  return it->second / horizon;
}

void HypothesisConstants::validate() const {
  if (!(beta > 1.0)) throw InvalidArgument("beta must exceed 1");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  for (double c : {f_integral, g_integral, C_monotone, C_coercive, C_growth, zeta, alpha, lambda_exp, theta_exp, L_A,
                   L_B, L_gamma})
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("hypothesis constants must be finite and nonnegative");
  for (const auto& [p, h] : h_p_integrals)
    if (p < 2.0 || !(h >= 0.0)) throw InvalidArgument("h_p needs p >= 2 and a nonnegative integral");
}

std::string to_string(Verdict v) { return v == Verdict::Pass ? "pass" : "fail"; }

bool HypothesisReport::passed() const {
  for (const auto& e : entries)
    if (!e.passed()) return false;
  return true;
}

const HypothesisRecord* HypothesisReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

void HypothesisReport::append(const HypothesisReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

nlohmann::json to_json(const HypothesisRecord& r) {
  nlohmann::json witness = nlohmann::json::array();
  for (const auto& v : r.witness.inputs) witness.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  nlohmann::json j = {{"hypothesis", r.name},
                      {"verdict", to_string(r.verdict)},
                      {"worst_margin", r.worst_margin},
                      {"tolerance", r.tolerance},
                      {"witness_coeffs", witness},
                      {"witness_t", r.witness.t},
                      {"samples", r.samples_used}};
  if (r.witness.s) j["witness_s"] = *r.witness.s;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::json HypothesisReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) arr.push_back(levyspde::to_json(e));
  return arr;
}

double hilbert_schmidt_sq(const Matrix& b) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < b.cols(); ++c) s += b.col(c).squaredNorm();
  return s;
}

double audit_tolerance(double lhs, double rhs, double relative) {
  return relative * (1.0 + std::abs(lhs) + std::abs(rhs));
}

}  // namespace levyspde
