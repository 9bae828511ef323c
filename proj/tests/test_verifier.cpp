#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "ibvs/io.hpp"
#include "ibvs/verifier.hpp"

using namespace ibvs;

namespace {

GridSpec small_grid(int p_count = 101, int cz_count = 60) {
  GridSpec g;
  g.p_count = p_count;
  g.cz_count = cz_count;
  return g;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("closed-form controller has no violations off the zero line") {
  const GridSpec grid = small_grid(101, 50);  // odd p count -> p = 0 included
  const RoaReport report =
      verify_axis(closed_form_controller(Axis::X, 2.0), Axis::X, grid);
  CHECK(report.points.size() == grid.total());
  CHECK(report.violations == 0);
  // The degenerate line contributes exactly one boundary row.
  CHECK(report.boundary == static_cast<std::size_t>(grid.cz_count));
  CHECK(report.violation_fraction() == 0.0);
}

TEST_CASE("zero controller violates almost everywhere") {
  const Controller zero = [](double, double, double) { return 0.0; };
  const GridSpec grid = small_grid(100, 40);  // even p count -> no exact zero
  const RoaReport report = verify_axis(zero, Axis::X, grid);
  // D = px^2 * vz / cz > 0 away from px = 0.
  CHECK(report.violations == report.points.size());
  CHECK(report.violation_fraction() == 1.0);
}

TEST_CASE("stored rows re-evaluate to the same D") {
  const MlpParams policy = mlp_init(kPolicyLayerSizes, 123,
                                    InputScaler::from_roi(Axis::X, Roi::defaults()));
  const GridSpec grid = small_grid(40, 30);
  const RoaReport report = verify_axis(policy, Axis::X, grid);
  for (std::size_t k = 0; k < report.points.size(); k += 7) {
    const RoaPoint& pt = report.points[k];
    InterceptState s;
    s.px = pt.p;
    s.py = grid.p_other;
    s.vz = grid.vz;
    s.cz = pt.cz;
    s.wy = grid.wy;
    const double u = forward(policy, pt.p, grid.vz, pt.cz);
    CHECK(u == doctest::Approx(pt.u).epsilon(1e-12));
    CHECK(d_x(s, u) == doctest::Approx(pt.d).epsilon(1e-10));
  }
}

TEST_CASE("violation fraction is stable under grid refinement") {
  // Constant-offset controller: D > 0 exactly where p * offset / cz > 0,
  // i.e. one half-plane; the fraction must stay near one half.
  const Controller biased = [](double p, double vz, double) {
    return vz * p - 0.5;
  };
  const RoaReport coarse = verify_axis(biased, Axis::X, small_grid(100, 50));
  const RoaReport fine = verify_axis(biased, Axis::X, small_grid(200, 100));
  CHECK(std::abs(coarse.violation_fraction() - fine.violation_fraction()) <
        0.02);
  CHECK(coarse.violation_fraction() == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("roa csv has one row per grid point plus headers") {
  const Controller zero = [](double, double, double) { return 0.0; };
  const RoaReport report = verify_axis(zero, Axis::X, small_grid(100, 100));
  const std::string csv = roa_to_csv(report);
  CHECK(count_lines(csv) == 10000 + 2);  // comment + header + rows
  CHECK(csv.rfind("# axis=x", 0) == 0);

  const std::string again = roa_to_csv(report);
  CHECK(csv == again);

  const auto dir = std::filesystem::temp_directory_path() / "ibvs_roa_test";
  std::filesystem::create_directories(dir);
  export_roa_csv(report, dir / "roa.csv");
  export_roa_csv(report, dir / "roa2.csv");
  CHECK(read_file(dir / "roa.csv") == read_file(dir / "roa2.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("degenerate grids are rejected") {
  GridSpec g;
  g.p_count = 1;
  const Controller zero = [](double, double, double) { return 0.0; };
  CHECK_THROWS_AS(verify_axis(zero, Axis::X, g), std::invalid_argument);
  g = GridSpec{};
  g.cz = {5.0, 1.0};
  CHECK_THROWS_AS(verify_axis(zero, Axis::X, g), std::invalid_argument);
}

TEST_CASE("violation summary of a clean report") {
  const RoaReport report = verify_axis(closed_form_controller(Axis::X, 2.0),
                                       Axis::X, small_grid(100, 40));
  const ViolationSummary summary = violation_summary(report);
  CHECK(summary.violation_fraction == 0.0);
  CHECK_FALSE(summary.any_violation);
  for (const CzBinBound& bin : summary.per_cz) {
    CHECK(bin.max_violating_p == 0.0);
  }
  CHECK(summary.static_error_bound_at(1.0) == 0.0);
}

TEST_CASE("violation summary counts a single positive point") {
  RoaReport report;
  report.axis = Axis::X;
  report.grid = small_grid(2, 2);
  report.points = {{-1.0, 0.5, 0.0, -1.0, -1},
                   {-1.0, 50.0, 0.0, -1.0, -1},
                   {1.0, 0.5, 0.0, 0.5, 1},
                   {1.0, 50.0, 0.0, -2.0, -1}};
  report.violations = 1;
  const ViolationSummary summary = violation_summary(report);
  CHECK(summary.violation_fraction == doctest::Approx(0.25));
  CHECK(summary.any_violation);
  CHECK(summary.max_cz_with_violation == 0.5);
  CHECK(summary.max_violating_p == 1.0);
  CHECK(summary.static_error_bound_at(0.5) == 1.0);
  CHECK(summary.static_error_bound_at(50.0) == 0.0);
  const std::string text = summary.to_text();
  CHECK(text.find("violation_fraction") != std::string::npos);
}

TEST_CASE("y-axis verification uses the fixed off-axis coordinate") {
  // With wy != 0 the y-axis D picks up a px*py*wy term; a grid with nonzero
  // p_other and wy must change the result relative to the zeroed one.
  GridSpec with_coupling = small_grid(60, 20);
  with_coupling.wy = 0.2;
  with_coupling.p_other = 0.8;
  GridSpec without = small_grid(60, 20);
  const Controller policy = closed_form_controller(Axis::Y, 2.0);
  const RoaReport a = verify_axis(policy, Axis::Y, with_coupling);
  const RoaReport b = verify_axis(policy, Axis::Y, without);
  bool differs = false;
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    if (a.points[k].d != b.points[k].d) differs = true;
  }
  CHECK(differs);
}
