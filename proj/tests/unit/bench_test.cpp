#include "app/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "app/commands.hpp"
#include "tstruct/errors.hpp"
#include "tstruct/serialization.hpp"

namespace tstruct::app {
namespace {

namespace fs = std::filesystem;

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  EXPECT_NE(it, header.end()) << name;
  return static_cast<std::size_t>(it - header.begin());
}

// Small graphs keep this fast; the grid shape is what is under test.
Json small_base() { return Json::parse(R"({"graph": {"d": 3, "s": 1}, "optim": {"max_epochs": 20}})"); }

TEST(Summarize, MeanStdAndStandardError) {
  const Summary s = summarize({1.0, 2.0, 3.0, 6.0});
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(14.0 / 3.0));
  EXPECT_DOUBLE_EQ(s.se, std::sqrt(14.0 / 3.0) / 2.0);
  EXPECT_EQ(s.count, 4u);
  EXPECT_EQ(summarize({std::nan(""), 5.0}).count, 1u);
  EXPECT_EQ(summarize({}).count, 0u);
}

TEST(ParseGrid, AppliesBaseOverridesThenCellSettings) {
  Json grid = {{"base", small_base()},
               {"cells",
                {{{"name", "a"}, {"set", {{"n", 200}}}},
                 {{"name", "b"}, {"protocol", "transport"}, {"set", {{"K", 2}}}}}}};
  const auto cells = parse_grid(grid, {{"seed", "9"}, {"n", "300"}});
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].config.n, 200);
  EXPECT_EQ(cells[0].config.seed, 9u);
  EXPECT_EQ(cells[1].config.n, 300);
  EXPECT_EQ(cells[1].protocol, BenchProtocol::kTransport);
  EXPECT_EQ(cells[1].config.subsample, SubsampleMode::kRandomSplit);
  EXPECT_EQ(cells[0].config.d, 3);

  EXPECT_THROW(parse_grid(Json::parse(R"({"cells": [{"name": "x", "protocol": "speed"}]})")), InvalidInput);
  EXPECT_THROW(parse_grid(Json::parse(R"({"cells": [{"name": "x", "set": {"nope": 1}}]})")), InvalidInput);
  EXPECT_THROW(parse_grid(Json::parse(R"({"cells": 3})")), InvalidInput);
}

class BenchCli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tstruct_bench_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<std::vector<std::string>> bench(const Json& grid) {
    write_json_file((dir_ / "grid.json").string(), grid);
    const std::string grid_path = (dir_ / "grid.json").string();
    const std::string csv_path = (dir_ / "bench.csv").string();
    std::vector<const char*> argv{"tstruct", "bench", "--quiet", "--grid", grid_path.c_str(), "--csv", csv_path.c_str()};
    std::ostringstream out, err;
    EXPECT_EQ(run_cli(static_cast<int>(argv.size()), argv.data(), out, err), kExitOk) << err.str();
    return parse_csv(read_file(csv_path));
  }

  fs::path dir_;
};

TEST_F(BenchCli, SampleSizeGridHasRowsForBothMethods) {
  Json base = small_base();
  base["repeats"] = 5;
  const Json grid = {{"base", base},
                     {"cells", {{{"name", "n200"}, {"set", {{"n", 200}}}}, {{"name", "n1000"}, {"set", {{"n", 1000}}}}}}};
  const auto rows = bench(grid);
  ASSERT_EQ(rows.size(), 5u);
  const auto& h = rows[0];
  EXPECT_EQ(rows[0].size(), parse_csv(bench_csv_header())[0].size());
  const std::vector<std::pair<std::string, std::string>> expect{
      {"n200", "dstruct"}, {"n200", "baseline"}, {"n1000", "dstruct"}, {"n1000", "baseline"}};
  for (std::size_t i = 0; i < expect.size(); ++i) {
    const auto& r = rows[i + 1];
    ASSERT_EQ(r.size(), h.size());
    EXPECT_EQ(r[column(h, "cell")], expect[i].first);
    EXPECT_EQ(r[column(h, "method")], expect[i].second);
    EXPECT_EQ(r[column(h, "completed")], "5");
    EXPECT_FALSE(r[column(h, "shd_se")].empty());
    EXPECT_GE(std::stod(r[column(h, "shd_mean")]), 0.0);
  }
  EXPECT_EQ(rows[3][column(h, "n")], "1000");
}

TEST_F(BenchCli, SingleRepeatLeavesSpreadEmpty) {
  const Json grid = {{"base", small_base()}, {"cells", {{{"name", "one"}, {"set", {{"n", 100}}}}}}};
  const auto rows = bench(grid);
  ASSERT_EQ(rows.size(), 3u);
  const auto& h = rows[0];
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][column(h, "shd_se")], "");
    EXPECT_EQ(rows[i][column(h, "shd_std")], "");
    EXPECT_EQ(rows[i][column(h, "completed")], "1");
  }
}

TEST_F(BenchCli, AblationAndTransportColumns) {
  Json base = small_base();
  base["repeats"] = 2;
  const Json grid = {{"base", base},
                     {"cells",
                      {{{"name", "alpha0"}, {"set", {{"alpha", 0}, {"n", 200}}}},
                       {{"name", "split"}, {"protocol", "transport"}, {"set", {{"K", 2}, {"n", 200}}}}}}};
  const auto rows = bench(grid);
  ASSERT_EQ(rows.size(), 5u);
  const auto& h = rows[0];
  const int nondag = std::stoi(rows[1][column(h, "nondag_before_repair")]);
  EXPECT_GE(nondag, 0);
  EXPECT_LE(nondag, 2);
  EXPECT_EQ(rows[1][column(h, "alpha")], "0");
  EXPECT_EQ(rows[3][column(h, "protocol")], "transport");
  EXPECT_FALSE(rows[3][column(h, "transport_shd_mean")].empty());
  EXPECT_FALSE(rows[4][column(h, "transport_shd_mean")].empty());
  EXPECT_EQ(rows[3][column(h, "subsample")], "random-split");
}

}  // namespace
}  // namespace tstruct::app
