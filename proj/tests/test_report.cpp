#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tlr/experiment.hpp"

using namespace tlr;

namespace {

ExperimentReport sample_report() {
  ExperimentReport r;
  r.pair_id = "A->W";
  r.records = {{1e-5, 1e-3, 10, {0.25, 0.5}}, {1.0, 0.1, 20, {0.75, 0.8125}}};
  r.grid_size = 2;
  r.best = 1;
  return r;
}

}  // namespace

TEST_CASE("CSV with one record and one run has two lines") {
  ExperimentReport r;
  r.pair_id = "p";
  r.records = {{0.5, 2.0, 7, {0.125}}};
  r.grid_size = 1;
  CHECK(format_report_csv(r) == "pair,alpha,beta,k,run,accuracy\np,0.5,2,7,1,0.125\n");
}

TEST_CASE("CSV round-trips") {
  const auto r = sample_report();
  const auto back = parse_report_csv(format_report_csv(r));
  REQUIRE(back.size() == 1);
  CHECK(back[0].pair_id == r.pair_id);
  REQUIRE(back[0].records.size() == r.records.size());
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    CHECK(back[0].records[i].alpha == r.records[i].alpha);
    CHECK(back[0].records[i].beta == r.records[i].beta);
    CHECK(back[0].records[i].k == r.records[i].k);
    CHECK(back[0].records[i].accuracies == r.records[i].accuracies);
  }
  CHECK(back[0].best == 1);
}

TEST_CASE("CSV parse errors") {
  CHECK_THROWS_AS(parse_report_csv("wrong\n"), ParseError);
  CHECK_THROWS_AS(parse_report_csv("pair,alpha,beta,k,run,accuracy\np,1,1,1,1\n"), ParseError);
  CHECK_THROWS_AS(parse_report_csv("pair,alpha,beta,k,run,accuracy\np,x,1,1,1,1\n"), ParseError);
  CHECK_THROWS_AS(parse_report_csv("pair,alpha,beta,k,run,accuracy\np,1,1,1,2,1\n"), ParseError);
}

TEST_CASE("pair ids with commas are rejected") {
  auto r = sample_report();
  r.pair_id = "a,b";
  CHECK_THROWS(format_report_csv(r));
}

TEST_CASE("markdown bolds the best row") {
  const auto text = format_report_markdown({sample_report()});
  CHECK(text.find("| **1** | **0.1** | **20** | **78.1** |") != std::string::npos);
  CHECK(text.find("| 1e-05 | 0.001 | 10 | 37.5 |") != std::string::npos);
  CHECK(text.find("| A->W | **78.1** | 1 | 0.1 | 20 |") != std::string::npos);
}

TEST_CASE("emit_report writes files") {
  const auto dir = std::filesystem::temp_directory_path() / "tlr_test_report";
  std::filesystem::create_directories(dir);
  const auto r = sample_report();
  emit_report(r, ReportFormat::kCsv, dir / "r.csv");
  std::ifstream in(dir / "r.csv");
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == format_report_csv(r));
  emit_report(r, ReportFormat::kMarkdown, dir / "r.md");
  CHECK(std::filesystem::file_size(dir / "r.md") > 0);
  CHECK_THROWS(emit_report(ExperimentReport{}, ReportFormat::kCsv, dir / "empty.csv"));
  CHECK_THROWS_AS(emit_report(r, ReportFormat::kCsv, dir / "no" / "such" / "dir.csv"), Error);
}

TEST_CASE("format_number is the shortest round-trip form") {
  CHECK(format_number(1e-5) == "1e-05");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(30.0) == "30");
  const double third = 1.0 / 3.0;
  CHECK(std::stod(format_number(third)) == third);
}
