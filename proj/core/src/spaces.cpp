#include "levyspde/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace levyspde {

namespace {

constexpr double kPi = std::numbers::pi;

// Fourier wavenumber of 0-based mode index in the periodic family.
std::size_t periodic_wavenumber(std::size_t idx) { return (idx + 1) / 2; }

std::vector<double> sine_weights(std::size_t cap) {
  std::vector<double> w(cap);
  for (std::size_t j = 0; j < cap; ++j) w[j] = static_cast<double>((j + 1) * (j + 1));
  return w;
}

std::vector<double> fourier_weights(std::size_t cap) {
  std::vector<double> w(cap);
  for (std::size_t j = 0; j < cap; ++j) {
    const double k = static_cast<double>(periodic_wavenumber(j));
    w[j] = 1.0 + k * k;
  }
  return w;
}

}  // namespace

std::string to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::DirichletSine: return "dirichlet_sine";
    case BasisFamily::PeriodicFourier: return "periodic_fourier";
    case BasisFamily::Custom: return "custom";
  }
  return "custom";
}

BasisFamily basis_family_from_string(const std::string& name) {
  if (name == "dirichlet_sine") return BasisFamily::DirichletSine;
  if (name == "periodic_fourier") return BasisFamily::PeriodicFourier;
  if (name == "custom") return BasisFamily::Custom;
  throw InvalidArgument("unknown basis family '" + name + "'");
}

PhysicalGrid::PhysicalGrid(BasisFamily family, std::size_t modes, std::size_t points) {
  if (points == 0 || modes == 0) throw InvalidArgument("grid needs at least one point and one mode");
  const auto n = static_cast<Eigen::Index>(points);
  const auto m = static_cast<Eigen::Index>(modes);
  basis_.resize(n, m);
  dbasis_.resize(n, m);
  nodes_.resize(points);

  switch (family) {
    case BasisFamily::DirichletSine: {
      if (modes > points) throw InvalidArgument("dirichlet_sine grid needs points >= modes");
      quad_weight_ = kPi / static_cast<double>(points);
      const double amp = std::sqrt(2.0 / kPi);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) + 0.5) * quad_weight_;
        nodes_[i] = x;
        for (Eigen::Index j = 0; j < m; ++j) {
          const double k = static_cast<double>(j + 1);
          basis_(i, j) = amp * std::sin(k * x);
          dbasis_(i, j) = amp * k * std::cos(k * x);
        }
      }
      break;
    }
    case BasisFamily::PeriodicFourier: {
      if (2 * periodic_wavenumber(modes - 1) >= points)
        throw InvalidArgument("periodic_fourier grid must resolve the highest wavenumber (points > 2 k_max)");
      quad_weight_ = 2.0 * kPi / static_cast<double>(points);
      const double c0 = 1.0 / std::sqrt(2.0 * kPi);
      const double ck = 1.0 / std::sqrt(kPi);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * quad_weight_;
        nodes_[i] = x;
        basis_(i, 0) = c0;
        dbasis_(i, 0) = 0.0;
        for (Eigen::Index j = 1; j < m; ++j) {
          const double k = static_cast<double>(periodic_wavenumber(static_cast<std::size_t>(j)));
          if (j % 2 == 1) {
            basis_(i, j) = ck * std::cos(k * x);
            dbasis_(i, j) = -ck * k * std::sin(k * x);
          } else {
            basis_(i, j) = ck * std::sin(k * x);
            dbasis_(i, j) = ck * k * std::cos(k * x);
          }
        }
      }
      break;
    }
    case BasisFamily::Custom:
      throw InvalidArgument("custom basis family has no physical grid");
  }
}

Vector PhysicalGrid::to_grid(const Vector& coeffs) const {
  return basis_.leftCols(coeffs.size()) * coeffs;
}

Vector PhysicalGrid::derivative_to_grid(const Vector& coeffs) const {
  return dbasis_.leftCols(coeffs.size()) * coeffs;
}

Vector PhysicalGrid::from_grid(const Vector& values, std::size_t m) const {
  return quad_weight_ * (basis_.leftCols(static_cast<Eigen::Index>(m)).transpose() * values);
}

Vector PhysicalGrid::from_grid_derivative(const Vector& values, std::size_t m) const {
  return quad_weight_ * (dbasis_.leftCols(static_cast<Eigen::Index>(m)).transpose() * values);
}

double PhysicalGrid::integrate(const Vector& values) const { return quad_weight_ * values.sum(); }

GelfandTriple::GelfandTriple(std::string name, std::vector<double> weights, BasisFamily family,
                             std::size_t grid_points)
    : name_(std::move(name)), weights_(std::move(weights)), family_(family) {
  if (weights_.empty()) throw InvalidArgument("dimension_cap must be positive");
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    if (!std::isfinite(weights_[j]) || weights_[j] < 1.0)
      throw InvalidArgument("V-weights must satisfy w_j >= 1");
    if (j > 0 && weights_[j] < weights_[j - 1]) throw InvalidArgument("V-weights must be nondecreasing");
  }
  if (grid_points > 0) {
    if (family_ == BasisFamily::Custom) throw InvalidArgument("custom triples cannot carry a physical grid");
    grid_ = std::make_shared<const PhysicalGrid>(family_, weights_.size(), grid_points);
  }
}

GelfandTriple GelfandTriple::dirichlet_sine(std::size_t dimension_cap, std::size_t grid_points) {
  return GelfandTriple("dirichlet_sine", sine_weights(dimension_cap), BasisFamily::DirichletSine, grid_points);
}

GelfandTriple GelfandTriple::periodic_fourier(std::size_t dimension_cap, std::size_t grid_points) {
  return GelfandTriple("periodic_fourier", fourier_weights(dimension_cap), BasisFamily::PeriodicFourier,
                       grid_points);
}

Vector GelfandTriple::weight_vector(std::size_t m) const {
  if (m > weights_.size()) throw InvalidArgument("level exceeds dimension_cap");
  return Eigen::Map<const Vector>(weights_.data(), static_cast<Eigen::Index>(m));
}

const PhysicalGrid& GelfandTriple::grid() const {
  if (!grid_) throw ConfigurationError("triple '" + name_ + "' has no physical grid");
  return *grid_;
}

GalerkinState GelfandTriple::project(const Vector& u, int m, double time) const {
  if (m <= 0 || static_cast<std::size_t>(m) > weights_.size())
    throw InvalidArgument("projection level must lie in [1, dimension_cap]");
  GalerkinState s;
  s.level = m;
  s.time = time;
  s.coeffs = Vector::Zero(m);
  const auto n = std::min<Eigen::Index>(m, u.size());
  s.coeffs.head(n) = u.head(n);
  return s;
}

Norms GelfandTriple::norms(const GalerkinState& state) const {
  return {h_norm(state.coeffs), v_norm(state.coeffs), vstar_norm(state.coeffs)};
}

double GelfandTriple::h_norm(const Vector& u) const { return u.norm(); }

double GelfandTriple::v_norm(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) > weights_.size()) throw InvalidArgument("vector longer than dimension_cap");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) acc += weights_[j] * u[j] * u[j];
  return std::sqrt(acc);
}

double GelfandTriple::vstar_norm(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) > weights_.size()) throw InvalidArgument("vector longer than dimension_cap");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) acc += u[j] * u[j] / weights_[j];
  return std::sqrt(acc);
}

std::shared_ptr<const PhysicalGrid> GelfandTriple::grid_ptr() const {
  (void)grid();
  return grid_;
}

double GelfandTriple::sup_bound(const Vector& u) const {
  switch (family_) {
    case BasisFamily::DirichletSine:
      return std::sqrt(2.0 / kPi) * u.cwiseAbs().sum();
    case BasisFamily::PeriodicFourier: {
      if (u.size() == 0) return 0.0;
      double acc = std::abs(u[0]) / std::sqrt(2.0 * kPi);
      for (Eigen::Index j = 1; j < u.size(); j += 2) {
        const double a = u[j];
        const double b = (j + 1 < u.size()) ? u[j + 1] : 0.0;
        acc += std::hypot(a, b) / std::sqrt(kPi);
      }
      return acc;
    }
    case BasisFamily::Custom: break;
  }
  throw ConfigurationError("sup_bound needs a physical basis family");
}

double GelfandTriple::sup_bound_constant(std::size_t m) const {
  if (m > weights_.size()) throw InvalidArgument("level exceeds dimension_cap");
  double s2 = 0.0;
  switch (family_) {
    case BasisFamily::DirichletSine:
      for (std::size_t j = 0; j < m; ++j) s2 += (2.0 / kPi) / weights_[j];
      return std::sqrt(s2);
    case BasisFamily::PeriodicFourier:
      if (m == 0) return 0.0;
      s2 = 1.0 / (2.0 * kPi * weights_[0]);
      for (std::size_t j = 1; j < m; j += 2) s2 += 1.0 / (kPi * weights_[j]);
      return std::sqrt(s2);
    case BasisFamily::Custom: break;
  }
  throw ConfigurationError("sup_bound_constant needs a physical basis family");
}

double pairing(const Vector& dual, const Vector& primal) {
  if (dual.size() != primal.size()) throw InvalidArgument("pairing: length mismatch");
  return dual.dot(primal);
}

Vector resized(const Vector& u, std::size_t n) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
  const auto k = std::min<Eigen::Index>(u.size(), static_cast<Eigen::Index>(n));
  out.head(k) = u.head(k);
  return out;
}

}  // namespace levyspde
