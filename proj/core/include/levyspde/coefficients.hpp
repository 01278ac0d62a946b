#pragma once

#include "levyspde/noise.hpp"
#include "levyspde/spaces.hpp"
#include "levyspde/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace levyspde {

using DriftFn = std::function<Vector(double t, const Vector& u)>;
using DiffusionFn = std::function<Matrix(double t, const Vector& u)>;
using JumpFn = std::function<Vector(double t, const Vector& u, double z)>;
using JacobianFn = std::function<Matrix(double t, const Vector& u)>;
using StiffDiagonalFn = std::function<Vector(std::size_t level)>;
using StateFunctional = std::function<double(const Vector& u)>;
using MonotonicityBoundFn = std::function<double(double t, double r)>;

/// The triple (A, B, gamma) acting on Galerkin coordinates of any level m.
/// drift returns P_m A (length m), diffusion returns P_m B Q_m (m x m, column
/// j is the image of the j-th Wiener mode), jump returns P_m gamma (length m).
struct CoefficientBundle {
  DriftFn drift;
  DiffusionFn diffusion;  ///< empty means B = 0
  JumpFn jump;            ///< empty means gamma = 0
  MarkSpace mark_space;

  /// Optional analytic Jacobian of the drift.
  JacobianFn drift_jacobian;
  /// Optional diagonal linear part D of the drift: A(t,u) = D u + N(t,u).
  StiffDiagonalFn stiff_diagonal;
  /// A(t,u) = D u exactly (N = 0); implicit steps are then solved in closed form.
  bool drift_is_linear_diagonal = false;

  /// Model-declared V-norm functional (non-Hilbert V); empty means the triple's weighted norm.
  StateFunctional v_norm;

  /// Local monotonicity functionals rho, eta and the bound M_t(r).
  StateFunctional rho;
  StateFunctional eta;
  MonotonicityBoundFn monotonicity_bound;

  bool has_diffusion() const { return static_cast<bool>(diffusion); }
  bool has_jump() const { return static_cast<bool>(jump) && !mark_space.empty(); }

  Vector eval_drift(double t, const Vector& u) const;
  Matrix eval_diffusion(double t, const Vector& u) const;
  Vector eval_jump(double t, const Vector& u, double z) const;
  double eval_v_norm(const GelfandTriple& triple, const Vector& u) const;
};

/// Declared hypothesis constants. f, g, h_p are constant in time; the
/// integrals over [0, horizon] are stored and rates recovered as integral / horizon.
struct HypothesisConstants {
  double beta = 2.0;
  double horizon = 1.0;
  double f_integral = 0.0;
  double g_integral = 0.0;
  std::map<double, double> h_p_integrals;
  double C_monotone = 0.0;
  double C_coercive = 0.0;
  double C_growth = 0.0;
  double zeta = 0.0;
  double alpha = 0.0;
  double lambda_exp = 0.0;
  double theta_exp = 0.0;
  double L_A = 0.0;
  double L_B = 0.0;
  double L_gamma = 0.0;

  double f() const { return f_integral / horizon; }
  double g() const { return g_integral / horizon; }
  double h(double p) const;

  /// Throws InvalidArgument when beta <= 1 or a constant is negative.
  void validate() const;
};

enum class Verdict { Pass, Fail };
std::string to_string(Verdict v);

struct Witness {
  double t = 0.0;
  std::vector<Vector> inputs;  ///< e.g. (u, v) for monotonicity, (u, v, w) for hemicontinuity
  std::optional<double> s;     ///< scan parameter for hemicontinuity
};

struct HypothesisRecord {
  std::string name;
  double worst_margin = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;  ///< verdict is Pass iff worst_margin >= -tolerance
  double lhs = 0.0;
  double rhs = 0.0;
  Witness witness;
  int samples_used = 0;
  Verdict verdict = Verdict::Pass;
  std::string note;

  bool passed() const { return verdict == Verdict::Pass; }
};

struct HypothesisReport {
  std::vector<HypothesisRecord> entries;

  bool passed() const;
  const HypothesisRecord* find(const std::string& name) const;
  void append(const HypothesisReport& other);
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const HypothesisRecord& record);

enum class MonotonicityMode { H2, H2Prime, H2Star };
enum class Part { I, II };

struct AuditOptions {
  int samples = 1000;
  int level = 8;
  std::uint64_t seed = 0;
  std::vector<double> amplitudes{0.1, 1.0, 10.0};
  int time_points = 8;
  /// Restrict monotonicity samples to the V-ball of this radius.
  std::optional<double> v_radius;
  /// Coordinate-descent sweeps from the worst witness.
  int refine_sweeps = 6;
  /// Relative floor of the verdict tolerance.
  double relative_tolerance = 1e-9;
};

/// Verdict tolerance for an inequality lhs <= rhs.
double audit_tolerance(double lhs, double rhs, double relative = 1e-9);

struct ScanResult {
  double jump = 0.0;  ///< estimated size of the largest discontinuity
  double s = 0.0;     ///< location of the largest discontinuity
  double scale = 0.0; ///< max |phi(s)| over the scan
};

/// Scans s -> <A(t, u + s v), w> on [s_lo, s_hi] with a uniform grid followed by
/// bisection on the cell with the largest increment.
ScanResult scan_hemicontinuity(const CoefficientBundle& bundle, double t, const Vector& u, const Vector& v,
                               const Vector& w, double s_lo = -1.0, double s_hi = 2.0, int grid = 96,
                               int bisections = 60);

HypothesisRecord audit_hemicontinuity(const CoefficientBundle& bundle, const GelfandTriple& triple,
                                      const AuditOptions& options);

struct InequalityTerms {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
};

/// Both sides of the selected local monotonicity inequality at (t, u, v).
InequalityTerms local_monotonicity_terms(const CoefficientBundle& bundle, const HypothesisConstants& constants,
                                         const GelfandTriple& triple, MonotonicityMode mode, double t,
                                         const Vector& u, const Vector& v);

/// Main inequality plus envelope bounds on rho and eta (one record each).
HypothesisReport audit_local_monotonicity(const CoefficientBundle& bundle, const HypothesisConstants& constants,
                                          const GelfandTriple& triple, MonotonicityMode mode,
                                          const AuditOptions& options);

/// Coercivity, drift growth, B and gamma growth (and H-continuity along
/// u + 2^-k d for Part I).
HypothesisReport audit_coercivity_growth(const CoefficientBundle& bundle, const HypothesisConstants& constants,
                                         const GelfandTriple& triple, Part part, const AuditOptions& options);

/// Hilbert-Schmidt norm squared by explicit column summation.
double hilbert_schmidt_sq(const Matrix& b);

// ---- admissibility arithmetic for gradient-dependent noise ----

/// chi: max{1+alpha, 1+lambda, 1+zeta+2 theta/beta} for beta <= 2,
/// max{1+alpha, 3+lambda-beta, 1+zeta+2 theta/beta} for beta > 2.
double chi(const HypothesisConstants& c);
/// 1 on [2,3], 2^{p-3} for p >= 3.
double c1(double p);
/// 1 on [2,4], 2 for p > 4.
double c2(double p);

struct AdmissibilityOptions {
  std::function<double(double p)> c_tilde = [](double p) { return std::pow(4.0, p); };
  double p_cap = 1e6;
  double table_step = 0.5;
  double table_max = 12.0;
};

struct PRangeRow {
  double p = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  bool condition_strict = false;  ///< L_B + 2 C1 L_gamma < (2 L_A + L_B)/chi
  bool condition_range = false;   ///< p < 1 + (2 L_A + L_B)/(L_B + 2 C1 L_gamma)
  bool condition_side = false;   ///< L_gamma^{p/2} < L_A^{p/2} / ((1 + sqrt3 C2) C2^2 C~_p)
};

struct PRange {
  double chi = 1.0;
  double lower = 2.0;
  double upper = 2.0;       ///< open upper endpoint; +inf when unbounded
  bool unbounded = false;   ///< L_B = L_gamma = 0
  bool empty = false;
  /// Largest table point in [2, upper) where the side condition also holds.
  std::optional<double> side_sup;
  std::vector<PRangeRow> table;

  bool contains(double p) const { return !empty && p >= lower && (unbounded || p < upper); }
};

PRangeRow admissibility_row(const HypothesisConstants& c, double p, const AdmissibilityOptions& options = {});
PRange admissible_p_range(const HypothesisConstants& c, const AdmissibilityOptions& options = {});

}  // namespace levyspde
