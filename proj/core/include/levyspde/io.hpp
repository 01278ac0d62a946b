#pragma once

#include "levyspde/estimates.hpp"
#include "levyspde/solver.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace levyspde {

/// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double v);

/// CSV with a leading "# ..." comment row naming the verified property.
class CsvTable {
 public:
  CsvTable(std::string comment, std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const noexcept { return rows_.size(); }
  void write(std::ostream& os) const;
  std::string str() const;
  /// {"comment", "columns", "rows"} with the same cell text as the CSV body.
  nlohmann::json to_json() const;

 private:
  std::string comment_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Columns time, is_jump_post, coeff_1..coeff_m, norm_H, norm_V.
CsvTable path_table(const PathRecord& record, const std::string& comment);

/// Rows of (quantity, p, m, dt, n_paths, estimate, ci99, seed).
CsvTable energy_table(const std::vector<EnergyStats>& stats, std::uint64_t seed, const std::string& comment);

/// Sidecar metadata for a path export; the only place a timestamp is written.
nlohmann::json path_metadata(const PathRecord& record, const SolverConfig& config, const std::string& model_id);

}  // namespace levyspde
