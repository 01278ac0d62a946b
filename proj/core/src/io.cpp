#include "levyspde/io.hpp"

#include <charconv>
#include <chrono>
#include <ostream>
#include <sstream>

namespace levyspde {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::string comment, std::vector<std::string> columns)
    : comment_(std::move(comment)), columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw InvalidArgument("csv row width does not match the header");
  rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& os) const {
  if (!comment_.empty()) os << "# " << comment_ << '\n';
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

nlohmann::json CsvTable::to_json() const {
  return {{"comment", comment_}, {"columns", columns_}, {"rows", rows_}};
}

CsvTable path_table(const PathRecord& record, const std::string& comment) {
  std::vector<std::string> cols{"time", "is_jump_post"};
  for (int j = 1; j <= record.level; ++j) cols.push_back("coeff_" + std::to_string(j));
  cols.emplace_back("norm_H");
  cols.emplace_back("norm_V");
  CsvTable t(comment, cols);
  for (const auto& e : record.entries) {
    std::vector<std::string> row{format_double(e.time), e.kind == EntryKind::JumpPost ? "1" : "0"};
    for (Eigen::Index j = 0; j < e.coeffs.size(); ++j) row.push_back(format_double(e.coeffs[j]));
    row.push_back(format_double(e.norm_h));
    row.push_back(format_double(e.norm_v));
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable energy_table(const std::vector<EnergyStats>& stats, std::uint64_t seed, const std::string& comment) {
  CsvTable t(comment, {"quantity", "p", "m", "dt", "n_paths", "estimate", "ci99", "seed"});
  for (const auto& s : stats) {
    auto add = [&](const std::string& q, const Summary& v) {
      t.add_row({q, format_double(s.p), std::to_string(s.level), format_double(s.dt), std::to_string(s.n_paths),
                 format_double(v.mean), format_double(v.ci99), std::to_string(seed)});
    };
    add("sup_H_p", s.sup_H_p);
    add("int_V_beta_p2", s.int_V_beta_p2);
    add("mixed", s.mixed);
    add("ratio_r_m", s.ratio);
    add("median_sup_H_p", {s.sup_H_p.median, 0.0, 0.0, 0.0, s.sup_H_p.n});
    add("median_int_V_beta_p2", {s.int_V_beta_p2.median, 0.0, 0.0, 0.0, s.int_V_beta_p2.n});
  }
  return t;
}

nlohmann::json path_metadata(const PathRecord& record, const SolverConfig& config, const std::string& model_id) {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  return {{"model", model_id},
          {"seed", record.seed},
          {"config", to_json(config)},
          {"level", record.level},
          {"jump_count", record.jump_count()},
          {"truncated", record.truncated},
          {"failure", record.failure},
          {"stopped_at", record.stopped_at ? nlohmann::json(*record.stopped_at) : nlohmann::json(nullptr)},
          {"created_unix", std::chrono::duration_cast<std::chrono::seconds>(now).count()}};
}

}  // namespace levyspde
