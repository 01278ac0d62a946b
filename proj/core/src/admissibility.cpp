#include "levyspde/coefficients.hpp"

#include <algorithm>
#include <cmath>

namespace levyspde {

double chi(const HypothesisConstants& c) {
  const double a = 1.0 + c.alpha;
  const double b = c.beta <= 2.0 ? 1.0 + c.lambda_exp : 3.0 + c.lambda_exp - c.beta;
  const double d = 1.0 + c.zeta + 2.0 * c.theta_exp / c.beta;
  return std::max({a, b, d});
}

double c1(double p) {
  if (p < 2.0) throw InvalidArgument("C1 is defined for p >= 2");
  return p <= 3.0 ? 1.0 : std::exp2(p - 3.0);
}

double c2(double p) {
  if (p < 2.0) throw InvalidArgument("C2 is defined for p >= 2");
  return p <= 4.0 ? 1.0 : 2.0;
}

PRangeRow admissibility_row(const HypothesisConstants& c, double p, const AdmissibilityOptions& o) {
  PRangeRow row;
  row.p = p;
  row.c1 = c1(p);
  row.c2 = c2(p);
  const double num = 2.0 * c.L_A + c.L_B;
  const double den = c.L_B + 2.0 * row.c1 * c.L_gamma;
  row.condition_strict = den < num / chi(c);
  row.condition_range = den == 0.0 ? num > 0.0 : p < 1.0 + num / den;
  const double ct = o.c_tilde ? o.c_tilde(p) : std::pow(4.0, p);
  row.condition_side =
      std::pow(c.L_gamma, p / 2.0) < std::pow(c.L_A, p / 2.0) / ((1.0 + std::sqrt(3.0) * row.c2) * row.c2 * row.c2 * ct);
  return row;
}

PRange admissible_p_range(const HypothesisConstants& c, const AdmissibilityOptions& o) {
  PRange out;
  out.chi = chi(c);
  auto ok = [&](double p) {
    const auto row = admissibility_row(c, p, o);
    return row.condition_strict && row.condition_range;
  };

  for (double p = 2.0; p <= o.table_max + 1e-12; p += o.table_step) out.table.push_back(admissibility_row(c, p, o));

  if (!ok(2.0)) {
    out.empty = true;
    out.upper = 2.0;
    return out;
  }
  if (c.L_B == 0.0 && c.L_gamma == 0.0) {
    out.unbounded = true;
    out.upper = std::numeric_limits<double>::infinity();
  } else {
    // Both conditions get harder as p grows, so the admissible set is [2, upper).
    double lo = 2.0;
    double hi = 3.0;
    while (ok(hi) && hi < o.p_cap) {
      lo = hi;
      hi = std::min(o.p_cap, 2.0 * hi);
    }
    if (ok(hi)) {
      out.upper = hi;
    } else {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (ok(mid) ? lo : hi) = mid;
      }
      out.upper = hi;
    }
  }
  for (const auto& row : out.table)
    if (row.condition_strict && row.condition_range && row.condition_side) out.side_sup = row.p;
  return out;
}

}  // namespace levyspde
