#include "levyspde/noise.hpp"

#include "levyspde/parallel.hpp"
#include "levyspde/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace levyspde {

double MarkSpace::total_intensity() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double MarkSpace::moment(double p) const {
  double s = 0.0;
  for (std::size_t i = 0; i < marks.size(); ++i) s += weights[i] * std::pow(std::abs(marks[i]), p);
  return s;
}

void MarkSpace::validate() const {
  if (marks.size() != weights.size()) throw InvalidArgument("mark space: marks and intensities differ in length");
  for (std::size_t i = 0; i < marks.size(); ++i) {
    if (!std::isfinite(marks[i])) throw InvalidArgument("mark space: non-finite mark");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw InvalidArgument("mark space: intensities must be positive and finite");
  }
}

std::span<const JumpEvent> NoiseRealization::jumps_in(double a, double b) const {
  auto lo = std::upper_bound(jumps.begin(), jumps.end(), a,
                             [](double t, const JumpEvent& e) { return t < e.time; });
  auto hi = std::upper_bound(lo, jumps.end(), b, [](double t, const JumpEvent& e) { return t < e.time; });
  return {lo, hi};
}

NoiseRealization NoiseRealization::coarsened(int factor) const {
  if (factor < 1 || steps() % factor != 0) throw InvalidArgument("coarsening factor must divide the step count");
  NoiseRealization out;
  out.seed = seed;
  out.dt = dt * factor;
  out.horizon = horizon;
  out.jumps = jumps;
  out.wiener = Matrix::Zero(steps() / factor, modes());
  for (int k = 0; k < steps(); ++k) out.wiener.row(k / factor) += wiener.row(k);
  return out;
}

NoiseRealization NoiseRealization::prefix(int m) const {
  if (m < 1 || m > modes()) throw InvalidArgument("prefix level out of range");
  NoiseRealization out = *this;
  out.wiener = wiener.leftCols(m);
  return out;
}

int step_count(double T, double dt) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("horizon T must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("step dt must be positive");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-12 * std::max(1.0, ratio))
    throw InvalidArgument("dt must divide T");
  return static_cast<int>(n);
}

std::vector<JumpEvent> sample_jumps(double T, const MarkSpace& marks, std::uint64_t seed) {
  marks.validate();
  std::vector<JumpEvent> events;
  const double rate = marks.total_intensity();
  if (marks.empty() || rate <= 0.0) return events;
  Engine times = make_engine(seed, "jump-times");
  Engine labels = make_engine(seed, "jump-marks");
  std::exponential_distribution<double> gap(rate);
  std::discrete_distribution<std::size_t> pick(marks.weights.begin(), marks.weights.end());
  for (double t = gap(times); t <= T; t += gap(times)) events.push_back({t, pick(labels)});
  return events;
}

Matrix sample_wiener(int m, int steps, double dt, std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("need at least one Wiener mode");
  Matrix w(steps, m);
  const double sd = std::sqrt(dt);
  for (int j = 0; j < m; ++j) {
    Engine eng = make_engine(seed, "wiener-mode", static_cast<std::uint64_t>(j));
    std::normal_distribution<double> gauss(0.0, sd);
    for (int k = 0; k < steps; ++k) w(k, j) = gauss(eng);
  }
  return w;
}

NoiseRealization sample_noise(int m, double T, double dt, const MarkSpace& marks, std::uint64_t seed) {
  const int steps = step_count(T, dt);
  NoiseRealization r;
  r.seed = seed;
  r.dt = dt;
  r.horizon = T;
  r.wiener = sample_wiener(m, steps, dt, seed);
  r.jumps = sample_jumps(T, marks, seed);
  return r;
}

namespace {

// Left-endpoint sum_k dt sum_i lambda_i zeta(t_k, z_i).
Vector compensator(const MarkIntegrand& integrand, const MarkSpace& marks, double T, double dt) {
  const int steps = step_count(T, dt);
  Vector acc;
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    for (std::size_t i = 0; i < marks.size(); ++i) {
      Vector v = integrand(t, marks.marks[i]);
      if (acc.size() == 0) acc = Vector::Zero(v.size());
      acc += (dt * marks.weights[i]) * v;
    }
  }
  return acc;
}

Vector event_sum(const MarkIntegrand& integrand, const std::vector<JumpEvent>& jumps, const MarkSpace& marks,
                 double T, Eigen::Index size) {
  Vector acc = Vector::Zero(size);
  for (const auto& e : jumps) {
    if (e.time > T) break;
    acc += integrand(e.time, marks.marks.at(e.mark));
  }
  return acc;
}

Eigen::Index integrand_size(const MarkIntegrand& integrand, const MarkSpace& marks) {
  return integrand(0.0, marks.empty() ? 0.0 : marks.marks.front()).size();
}

}  // namespace

Vector compensated_integral(const MarkIntegrand& integrand, const NoiseRealization& realization,
                            const MarkSpace& marks, double T) {
  const double dt = realization.dt > 0.0 ? realization.dt : T;
  const auto n = integrand_size(integrand, marks);
  Vector comp = compensator(integrand, marks, T, dt);
  if (comp.size() == 0) comp = Vector::Zero(n);
  return event_sum(integrand, realization.jumps, marks, T, n) - comp;
}

bool IsometryResult::within(double ci_multiple) const { return std::abs(lhs - rhs) <= ci_multiple * ci99; }

IsometryResult ito_isometry_check(const MarkIntegrand& integrand, const MarkSpace& marks, double T, double dt,
                                  int n_paths, std::uint64_t seed, int workers) {
  if (n_paths < 100) throw InvalidArgument("ito_isometry_check needs n_paths >= 100");
  const int steps = step_count(T, dt);
  const auto n = integrand_size(integrand, marks);

  // The integrand is deterministic, so the compensator is shared by every path.
  Vector comp = compensator(integrand, marks, T, dt);
  if (comp.size() == 0) comp = Vector::Zero(n);

  const auto squares = parallel_map(static_cast<std::size_t>(n_paths), workers, [&](std::size_t k) {
    const auto jumps = sample_jumps(T, marks, derive_seed(seed, "isometry-path", k));
    return (event_sum(integrand, jumps, marks, T, n) - comp).squaredNorm();
  });

  double mean = 0.0;
  for (double s : squares) mean += s;
  mean /= n_paths;
  double var = 0.0;
  for (double s : squares) var += (s - mean) * (s - mean);
  var /= (n_paths - 1);

  // Composite Simpson on a grid twice as fine as the step grid.
  const int intervals = 2 * steps;
  const double h = T / intervals;
  auto density = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < marks.size(); ++i) s += marks.weights[i] * integrand(t, marks.marks[i]).squaredNorm();
    return s;
  };
  double rhs = density(0.0) + density(T);
  for (int i = 1; i < intervals; ++i) rhs += (i % 2 == 1 ? 4.0 : 2.0) * density(i * h);
  rhs *= h / 3.0;

  IsometryResult res;
  res.lhs = mean;
  res.rhs = rhs;
  res.n_paths = n_paths;
  res.ci99 = 2.5758293035489004 * std::sqrt(var / n_paths);
  res.rel_err = rhs != 0.0 ? std::abs(mean - rhs) / std::abs(rhs) : std::abs(mean - rhs);
  return res;
}

void write_jsonl(std::ostream& os, const NoiseRealization& r) {
  nlohmann::json header = {{"type", "header"},   {"seed", r.seed}, {"dt", r.dt},
                           {"horizon", r.horizon}, {"steps", r.steps()}, {"modes", r.modes()},
                           {"jumps", r.jumps.size()}};
  os << header.dump() << '\n';
  for (int k = 0; k < r.steps(); ++k) {
    std::vector<double> row(r.wiener.cols());
    for (int j = 0; j < r.modes(); ++j) row[j] = r.wiener(k, j);
    os << nlohmann::json{{"type", "wiener"}, {"step", k}, {"increments", row}}.dump() << '\n';
  }
  for (const auto& e : r.jumps)
    os << nlohmann::json{{"type", "jump"}, {"time", e.time}, {"mark", e.mark}}.dump() << '\n';
}

NoiseRealization read_jsonl(std::istream& is) {
  NoiseRealization r;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "header") {
      r.seed = j.at("seed").get<std::uint64_t>();
      r.dt = j.at("dt").get<double>();
      r.horizon = j.at("horizon").get<double>();
      r.wiener = Matrix::Zero(j.at("steps").get<int>(), j.at("modes").get<int>());
      have_header = true;
    } else if (type == "wiener") {
      if (!have_header) throw ConsistencyError("noise dump: wiener line before header");
      const int k = j.at("step").get<int>();
      const auto row = j.at("increments").get<std::vector<double>>();
      if (k < 0 || k >= r.steps() || static_cast<int>(row.size()) != r.modes())
        throw ConsistencyError("noise dump: malformed wiener line");
      for (int c = 0; c < r.modes(); ++c) r.wiener(k, c) = row[c];
    } else if (type == "jump") {
      r.jumps.push_back({j.at("time").get<double>(), j.at("mark").get<std::size_t>()});
    } else {
      throw ConsistencyError("noise dump: unknown line type '" + type + "'");
    }
  }
  if (!have_header) throw ConsistencyError("noise dump: missing header");
  return r;
}

}  // namespace levyspde
