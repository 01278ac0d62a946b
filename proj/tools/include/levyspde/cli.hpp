#pragma once

#include "levyspde/models.hpp"
#include "levyspde/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace levyspde::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitStudyFailure = 2;

/// Parameters shared by the study subcommands. Empty lists fall back to
/// per-study defaults.
struct StudyParams {
  std::vector<double> p;
  std::vector<int> m;
  std::vector<double> delta;
  std::vector<double> dt;
  int n_paths = 100;
  int samples = 1000;
  bool stress = false;
  double shift = 0.1;
  std::optional<double> beta;
  std::optional<double> stop_N;
};

struct ExperimentConfig {
  nlohmann::json model = "heat";
  /// Replaces the model's mark space when present.
  std::optional<MarkSpace> marks;
  SolverConfig solver;
  bool solver_level_given = false;
  StudyParams study;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out = ".";
  std::string format = "csv";
};

/// Parses a schema_version 1 document. Throws InvalidArgument naming the
/// offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Loads the model named by the config and applies the mark-space override.
ModelSpec resolve_model(const ExperimentConfig& config);

/// Runs "levyspde <subcommand> [flags]". Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::vector<std::string> subcommands();

}  // namespace levyspde::cli
