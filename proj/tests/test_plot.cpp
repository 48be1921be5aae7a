#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rmcf/csv.hpp"
#include "rmcf/error.hpp"
#include "rmcf/plot.hpp"

using namespace rmcf;

namespace {

CsvTable table() {
  std::istringstream in("t,maxE,rbar\n0,1,6\n0.5,0.1,6.01\n1,0.01,6\n");
  return read_csv(in);
}

}  // namespace

TEST_CASE("csv write and read") {
  std::ostringstream out;
  CsvWriter w(out, {"t", "x"});
  w.row({0.0, 1.0 / 3.0});
  w.row(std::vector<double>{1.0, -2.5e-8});
  CHECK_THROWS_AS(w.row({1.0}), InvalidArgument);
  std::istringstream in(out.str());
  const auto t = read_csv(in);
  CHECK(t.columns == std::vector<std::string>{"t", "x"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(t.column("x") == 1);
  CHECK_THROWS_AS(t.column("y"), FormatError);
  std::istringstream bad("t,x\n0,abc\n");
  CHECK_THROWS_AS(read_csv(bad), FormatError);
  std::istringstream ragged("t,x\n0\n");
  CHECK_THROWS_AS(read_csv(ragged), FormatError);
}

TEST_CASE("default plot specs use log axes for positive decay quantities") {
  const auto specs = default_plot_specs(table());
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].column == "maxE");
  CHECK(specs[0].log_scale);
  CHECK(specs[1].column == "rbar");
  CHECK_FALSE(specs[1].log_scale);
}

TEST_CASE("svg output is deterministic and well formed") {
  const auto a = render_svg(table(), {"maxE", true});
  CHECK(a == render_svg(table(), {"maxE", true}));
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("<polyline") != std::string::npos);
  CHECK(a.find("maxE") != std::string::npos);
  CHECK(a.find("</svg>") != std::string::npos);
  CHECK(a != render_svg(table(), {"maxE", false}));
}

TEST_CASE("plot errors") {
  std::istringstream one("t,maxE\n0,1\n");
  CHECK_THROWS_AS(render_svg(read_csv(one), {"maxE", false}), InvalidArgument);
  std::istringstream neg("t,maxE\n0,1\n1,-1\n");
  CHECK_THROWS_AS(render_svg(read_csv(neg), {"maxE", true}), InvalidArgument);
  CHECK_THROWS_AS(render_svg(table(), {"missing", false}), FormatError);
}

TEST_CASE("emit_plots writes one file per spec") {
  const auto dir = std::filesystem::temp_directory_path() / "rmcf_test_plot";
  std::filesystem::remove_all(dir);
  const auto files = emit_plots(table(), default_plot_specs(table()), dir.string(), "run");
  REQUIRE(files.size() == 2);
  CHECK(std::filesystem::path(files[0]).filename() == "run_maxE.svg");
  for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 100);
  std::filesystem::remove_all(dir);
}
