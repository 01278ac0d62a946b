#pragma once

#include "levyspde/types.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace levyspde {

enum class BasisFamily {
  DirichletSine,    ///< sqrt(2/pi) sin(jx) on (0, pi), w_j = j^2
  PeriodicFourier,  ///< 1/sqrt(2pi), cos(kx)/sqrt(pi), sin(kx)/sqrt(pi) on [0, 2pi), w = 1 + k^2
  Custom,           ///< weights only, no physical realization
};

std::string to_string(BasisFamily family);
BasisFamily basis_family_from_string(const std::string& name);

/// Physical collocation grid attached to a spectral basis. Holds basis values
/// and derivatives at the nodes plus the quadrature weight, so that
/// coefficient -> grid -> coefficient transforms are direct sums.
class PhysicalGrid {
 public:
  PhysicalGrid(BasisFamily family, std::size_t modes, std::size_t points);

  std::size_t points() const noexcept { return nodes_.size(); }
  std::size_t modes() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double quadrature_weight() const noexcept { return quad_weight_; }

  /// u(x_i) = sum_j u_j e_j(x_i), using the first u.size() modes.
  Vector to_grid(const Vector& coeffs) const;
  /// u'(x_i), exact derivative of the truncated expansion.
  Vector derivative_to_grid(const Vector& coeffs) const;
  /// c_j = quad(g e_j) for j < m.
  Vector from_grid(const Vector& values, std::size_t m) const;
  /// c_j = quad(g e_j') for j < m.
  Vector from_grid_derivative(const Vector& values, std::size_t m) const;
  /// quad(g).
  double integrate(const Vector& values) const;

  /// Basis values, points x modes.
  const Matrix& basis() const noexcept { return basis_; }
  const Matrix& basis_derivative() const noexcept { return dbasis_; }

 private:
  std::vector<double> nodes_;
  double quad_weight_;
  Matrix basis_;
  Matrix dbasis_;
};

struct GalerkinState {
  int level = 0;
  Vector coeffs;
  double time = 0.0;

  bool valid() const { return level > 0 && coeffs.size() == level && coeffs.allFinite() && time >= 0.0; }
};

struct Norms {
  double h = 0.0;
  double v = 0.0;
  double vstar = 0.0;
};

/// Spectral realization of V in H in V*. ||u||_V^2 = sum w_j u_j^2 and
/// ||u||_{V*}^2 = sum u_j^2 / w_j over the realized modes.
class GelfandTriple {
 public:
  GelfandTriple(std::string name, std::vector<double> weights, BasisFamily family = BasisFamily::Custom,
                std::size_t grid_points = 0);

  static GelfandTriple dirichlet_sine(std::size_t dimension_cap, std::size_t grid_points = 0);
  static GelfandTriple periodic_fourier(std::size_t dimension_cap, std::size_t grid_points = 64);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension_cap() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t j) const { return weights_.at(j); }
  /// First m weights as a vector.
  Vector weight_vector(std::size_t m) const;
  BasisFamily family() const noexcept { return family_; }
  bool has_grid() const noexcept { return grid_ != nullptr; }
  const PhysicalGrid& grid() const;
  /// Shared handle to the grid, for coefficient closures that outlive the triple.
  std::shared_ptr<const PhysicalGrid> grid_ptr() const;

  GalerkinState project(const Vector& u, int m, double time = 0.0) const;
  Norms norms(const GalerkinState& state) const;

  double h_norm(const Vector& u) const;
  double v_norm(const Vector& u) const;
  double vstar_norm(const Vector& u) const;

  /// Upper bound on sup_x |u(x)| from the coefficients (periodic: pairs
  /// combined as sqrt(a^2+b^2)). Only defined for the physical families.
  double sup_bound(const Vector& u) const;
  /// Smallest S with sup_bound(u) <= S ||u||_V for every u on the first m modes.
  double sup_bound_constant(std::size_t m) const;

 private:
  std::string name_;
  std::vector<double> weights_;
  BasisFamily family_;
  std::shared_ptr<const PhysicalGrid> grid_;
};

/// <dual, primal> in coordinates; coincides with the H inner product.
double pairing(const Vector& dual, const Vector& primal);

/// Zero-pads (or truncates) u to length n.
Vector resized(const Vector& u, std::size_t n);

}  // namespace levyspde
