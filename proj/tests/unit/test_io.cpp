#include <gtest/gtest.h>

#include "levyspde/io.hpp"
#include "levyspde/models.hpp"

#include <cstdlib>
#include <sstream>

namespace levyspde {
namespace {

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(CsvTable, CommentHeaderRows) {
  CsvTable t("a property in words", {"x", "y"});
  t.add_row({"1", "2"});
  t.add_row({"3", "4"});
  EXPECT_EQ(t.str(), "# a property in words\nx,y\n1,2\n3,4\n");
  EXPECT_THROW(t.add_row({"1"}), InvalidArgument);
  const auto j = t.to_json();
  EXPECT_EQ(j.at("columns").size(), 2u);
  EXPECT_EQ(j.at("rows")[1][0], "3");
}

TEST(PathTable, Columns) {
  const auto spec = builtin("heat");
  SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.level = 3;
  const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, cfg, 1);
  const auto csv = path_table(rec, "path").str();
  std::istringstream is(csv);
  std::string comment, header;
  std::getline(is, comment);
  std::getline(is, header);
  EXPECT_EQ(comment, "# path");
  EXPECT_EQ(header, "time,is_jump_post,coeff_1,coeff_2,coeff_3,norm_H,norm_V");
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  EXPECT_EQ(static_cast<std::size_t>(rows), rec.entries.size());
}

TEST(PathMetadata, CarriesTimestampAndSeed) {
  const auto spec = fixtures::zero_model(2);
  SolverConfig cfg;
  cfg.dt = 0.5;
  cfg.level = 2;
  const auto rec = solve_path(spec.bundle, spec.triple, spec.x0, cfg, 77);
  const auto meta = path_metadata(rec, cfg, spec.id);
  EXPECT_EQ(meta.at("seed"), 77u);
  EXPECT_EQ(meta.at("model"), spec.id);
  EXPECT_TRUE(meta.contains("created_unix"));
  EXPECT_EQ(meta.at("config").at("level"), 2);
}

TEST(EnergyTable, OneRowPerFunctional) {
  EnergyStats s;
  s.p = 2;
  s.level = 4;
  s.dt = 0.01;
  s.n_paths = 10;
  const auto t = energy_table({s, s}, 3, "energy");
  EXPECT_EQ(t.rows(), 12u);
  EXPECT_NE(t.str().find("quantity,p,m,dt,n_paths,estimate,ci99,seed"), std::string::npos);
}

}  // namespace
}  // namespace levyspde
