#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pace/report.hpp"

using namespace pace;

namespace {

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("ascii rendering puts the top row first") {
  Grid g = place_block(Grid{}, {Orientation::Horizontal, {0, 0}});
  const std::string art = ascii_grid(g);
  REQUIRE(art.size() == 90);  // 9 rows of 9 plus newlines
  CHECK(art.substr(0, 9) == ".........");
  CHECK(art.substr(80, 9) == "##.......");
}

TEST_CASE("line charts embed one point per data row and stay well formed") {
  ChartSeries s{"series", "#000000", {{0, 1.0}, {1, 2.0}, {2, 1.5}}};
  const std::string svg = svg_line_chart("t", "x", "y", {s});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count_occurrences(svg, "<polyline") == 1);

  const std::size_t start = svg.find("points=\"");
  const std::size_t end = svg.find('"', start + 8);
  const std::string points = svg.substr(start + 8, end - start - 8);
  CHECK(count_occurrences(points, ",") == 3);  // one x,y pair per row
}

TEST_CASE("report generation requires metrics and is byte stable") {
  const auto dir = std::filesystem::temp_directory_path() / "pace_report_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  CHECK_THROWS_AS(render_report(dir), MissingMetrics);

  {
    std::ofstream out(dir / "metrics.csv");
    out << "step,epoch,train_loss,train_reward,test_reward,avg_complexity,lexicon_size,"
           "cumulative_regret\n";
    out << "0,0,0.7,0.1,0.05,9.0,2,100\n";
    out << "0,1,0.6,0.2,0.15,9.0,2,180\n";
    out << "1,0,0.5,0.4,0.30,8.5,3,230\n";
  }
  render_report(dir);
  const auto complexity = dir / "report" / "complexity.svg";
  REQUIRE(std::filesystem::exists(complexity));
  const std::string first = slurp(complexity);
  CHECK(count_occurrences(first, "<svg") == 1);
  CHECK(count_occurrences(first, "</svg>") == 1);

  const auto rows = load_metrics(dir / "metrics.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].avg_complexity == 8.5);
  CHECK(rows[2].lexicon_size == 3);

  // Point count equals row count.
  const std::size_t start = first.find("points=\"");
  const std::size_t end = first.find('"', start + 8);
  const std::string points = first.substr(start + 8, end - start - 8);
  CHECK(count_occurrences(points, ",") == rows.size());

  render_report(dir);
  CHECK(slurp(complexity) == first);

  std::filesystem::remove_all(dir);
}
