#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ibvs/dataset.hpp"
#include "ibvs/errors.hpp"
#include "ibvs/io.hpp"
#include "ibvs/rng.hpp"

using namespace ibvs;

namespace {

double eval_d(Axis axis, const InterceptState& s, double u) {
  return axis == Axis::X ? d_x(s, u) : d_y(s, u);
}

InterceptState random_state(Rng& rng, const Roi& roi) {
  InterceptState s;
  s.px = rng.uniform(roi.px.lo, roi.px.hi);
  s.py = rng.uniform(roi.py.lo, roi.py.hi);
  s.vz = rng.uniform(roi.vz.lo, roi.vz.hi);
  s.cz = rng.uniform(roi.cz.lo, roi.cz.hi);
  s.wy = rng.uniform(roi.wy.lo, roi.wy.hi);
  return s;
}

}  // namespace

TEST_CASE("closed-form solve hits the exact decrease rate") {
  const InterceptState s{0.5, 0.0, 15.0, 10.0, 0.0};
  const double vx = solve_input_closed_form(Axis::X, s, 2.0);
  CHECK(vx == doctest::Approx(17.5).epsilon(1e-12));
  CHECK(d_x(s, vx) == doctest::Approx(-0.5).epsilon(1e-12));

  // Brute-force scan: D + eta*W changes sign exactly once, at the root.
  int sign_changes = 0;
  double prev = d_x(s, -100.0) + 2.0 * w_value(s.px);
  for (double u = -99.9; u <= 100.0; u += 0.1) {
    const double cur = d_x(s, u) + 2.0 * w_value(s.px);
    if ((prev < 0.0) != (cur < 0.0)) ++sign_changes;
    prev = cur;
  }
  CHECK(sign_changes == 1);
}

TEST_CASE("closed-form solve with yaw-rate coupling") {
  const InterceptState s{0.5, 0.0, 15.0, 10.0, 0.2};
  const double vx = solve_input_closed_form(Axis::X, s, 2.0);
  CHECK(vx == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(d_x(s, vx) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("closed-form solve on the y axis") {
  const InterceptState s{0.0, -0.4, 10.0, 2.0, 0.0};
  // eta chosen so the target rate equals the worked d_y value -0.4.
  const double eta = 2.5;
  const double vy = solve_input_closed_form(Axis::Y, s, eta);
  CHECK(vy == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(d_y(s, vy) == doctest::Approx(-0.4).epsilon(1e-12));
}

TEST_CASE("closed-form solve rejects degenerate states") {
  const InterceptState s{0.0, 0.5, 10.0, 5.0, 0.0};
  CHECK_THROWS_AS(solve_input_closed_form(Axis::X, s, 2.0),
                  DegenerateStateError);
  const InterceptState sy{0.5, 0.0, 10.0, 5.0, 0.0};
  CHECK_THROWS_AS(solve_input_closed_form(Axis::Y, sy, 2.0),
                  DegenerateStateError);
  CHECK_THROWS_AS(
      solve_input_closed_form(Axis::X, InterceptState{0.5, 0, 10, -1, 0}, 2.0),
      std::domain_error);
}

TEST_CASE("numeric solve matches the closed form inside bounds") {
  SearchConfig cfg;
  cfg.eta = 2.0;
  const InterceptState s{0.5, 0.0, 15.0, 10.0, 0.0};
  const SolveResult res = solve_input_numeric(Axis::X, s, cfg);
  CHECK(res.status == SolveStatus::solved);
  CHECK(res.input == doctest::Approx(17.5).epsilon(1e-9));
  CHECK(std::abs(res.input - 17.5) <= 1e-6);
}

TEST_CASE("numeric solve is infeasible at a zero coordinate") {
  SearchConfig cfg;
  const InterceptState s{0.0, 0.3, 10.0, 5.0, 0.0};
  const SolveResult res = solve_input_numeric(Axis::X, s, cfg);
  CHECK(res.status == SolveStatus::infeasible);
}

TEST_CASE("numeric solve with bounds excluding the feasible set") {
  SearchConfig cfg;
  cfg.input_bounds = {-5.0, 5.0};
  const InterceptState s{0.5, 0.0, 15.0, 10.0, 0.0};
  // Dense-scan oracle: D >= 0 everywhere in the bounds.
  bool any_feasible = false;
  for (double u = -5.0; u <= 5.0; u += 0.001) {
    if (d_x(s, u) < 0.0) any_feasible = true;
  }
  CHECK_FALSE(any_feasible);
  const SolveResult res = solve_input_numeric(Axis::X, s, cfg);
  CHECK(res.status == SolveStatus::infeasible);
  CHECK(res.achieved_d >= 0.0);
}

TEST_CASE("numeric solve clamps at the feasible bound") {
  SearchConfig cfg;
  cfg.input_bounds = {8.0, 12.0};
  const InterceptState s{0.5, 0.0, 15.0, 10.0, 0.0};
  // Dense-scan oracle for the constrained minimizer of |D + eta*W|.
  double best_u = 0.0;
  double best_obj = 1e300;
  for (double u = 8.0; u <= 12.0; u += 1e-4) {
    const double d = d_x(s, u);
    if (d < 0.0) {
      const double obj = std::abs(d + cfg.eta * w_value(s.px));
      if (obj < best_obj) {
        best_obj = obj;
        best_u = u;
      }
    }
  }
  CHECK(best_u == doctest::Approx(12.0).epsilon(1e-3));
  const SolveResult res = solve_input_numeric(Axis::X, s, cfg);
  CHECK(res.status == SolveStatus::clamped);
  CHECK(res.input == doctest::Approx(12.0).epsilon(1e-7));
  CHECK(res.achieved_d < 0.0);
}

TEST_CASE("numeric and closed-form agree on random in-bounds states") {
  SearchConfig cfg;
  Rng rng(101);
  const Roi roi = Roi::defaults();
  int checked = 0;
  while (checked < 1000) {
    InterceptState s = random_state(rng, roi);
    if (std::abs(s.px) < 1e-3) continue;
    const double exact = solve_input_closed_form(Axis::X, s, cfg.eta);
    if (!cfg.input_bounds.contains(exact)) continue;
    const SolveResult res = solve_input_numeric(Axis::X, s, cfg);
    CHECK(std::abs(res.input - exact) <= 1e-6);
    ++checked;
  }
}

TEST_CASE("sample_roi stays inside the box and repeats with the seed") {
  const Roi roi = Roi::defaults();
  const auto a = sample_roi(roi, 1000, 9, SamplingScheme::uniform_random);
  REQUIRE(a.size() == 1000);
  for (const InterceptState& s : a) {
    CHECK(roi.contains(s));
  }
  const auto b = sample_roi(roi, 1000, 9, SamplingScheme::uniform_random);
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].px == b[i].px);
    CHECK(a[i].py == b[i].py);
    CHECK(a[i].vz == b[i].vz);
    CHECK(a[i].cz == b[i].cz);
    CHECK(a[i].wy == b[i].wy);
  }
}

TEST_CASE("grid sampling produces the fifth-power count") {
  const Roi roi = Roi::defaults();
  const auto states = sample_roi(roi, 243, 0, SamplingScheme::grid);
  CHECK(states.size() == 243);  // 3 points per dimension
  for (const InterceptState& s : states) {
    CHECK(roi.contains(s));
  }
}

TEST_CASE("generate_dataset keeps only decreasing samples") {
  SearchConfig cfg;
  GenerationReport rep;
  const Dataset ds =
      generate_dataset(Axis::X, Roi::defaults(), 10000, cfg, 31, &rep);
  CHECK(rep.requested == 10000);
  CHECK(rep.retained() + rep.infeasible == rep.requested);
  CHECK(rep.retained() == ds.samples.size());
  double max_d = -1e300;
  for (const LabeledSample& s : ds.samples) {
    const double re = eval_d(ds.axis, s.state, s.input);
    CHECK(re == doctest::Approx(s.achieved_d).epsilon(1e-12));
    if (s.status == SolveStatus::degenerate) {
      CHECK(s.state.px == 0.0);
    } else {
      CHECK(re < 0.0);
      max_d = std::max(max_d, re);
      if (s.status == SolveStatus::solved) {
        const double p = s.state.px;
        CHECK(std::abs(re + cfg.eta * w_value(p)) <= 1e-9);
      }
    }
    CHECK(cfg.input_bounds.contains(s.input));
  }
  CHECK(max_d < 0.0);
}

TEST_CASE("dataset inputs pull toward the image center when wy = 0") {
  SearchConfig cfg;
  Roi roi = Roi::defaults();
  roi.wy = {-1e-12, 1e-12};  // effectively zero yaw rate
  const Dataset ds = generate_dataset(Axis::Y, roi, 2000, cfg, 77, nullptr);
  for (const LabeledSample& s : ds.samples) {
    if (s.status == SolveStatus::degenerate) continue;
    // vz + eta*cz > 0 over the box, so the label has the coordinate's sign.
    CHECK((s.input > 0.0) == (s.state.py > 0.0));
  }
}

TEST_CASE("generate_dataset with n = 0 is empty but valid") {
  SearchConfig cfg;
  GenerationReport rep;
  const Dataset ds = generate_dataset(Axis::Y, Roi::defaults(), 0, cfg, 1, &rep);
  CHECK(ds.samples.empty());
  CHECK(rep.requested == 0);
}

TEST_CASE("numeric scheme agrees with closed-form scheme through generate") {
  SearchConfig closed;
  SearchConfig numeric;
  numeric.scheme = SearchScheme::numeric;
  const Dataset a = generate_dataset(Axis::X, Roi::defaults(), 300, closed, 5);
  const Dataset b = generate_dataset(Axis::X, Roi::defaults(), 300, numeric, 5);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(std::abs(a.samples[i].input - b.samples[i].input) <= 1e-6);
  }
}

TEST_CASE("dataset CSV is deterministic and round-trips") {
  SearchConfig cfg;
  const Dataset ds = generate_dataset(Axis::X, Roi::defaults(), 500, cfg, 13);
  const std::string csv1 = dataset_to_csv(ds);
  const std::string csv2 = dataset_to_csv(ds);
  CHECK(csv1 == csv2);

  const auto dir = std::filesystem::temp_directory_path() / "ibvs_ds_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "S_x.csv";
  write_dataset_csv(ds, path);
  const Dataset back = read_dataset_csv(path);
  REQUIRE(back.samples.size() == ds.samples.size());
  CHECK(back.axis == ds.axis);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    CHECK(back.samples[i].state.px == ds.samples[i].state.px);
    CHECK(back.samples[i].state.vz == ds.samples[i].state.vz);
    CHECK(back.samples[i].state.cz == ds.samples[i].state.cz);
    CHECK(back.samples[i].state.wy == ds.samples[i].state.wy);
    CHECK(back.samples[i].input == ds.samples[i].input);
    CHECK(back.samples[i].achieved_d == ds.samples[i].achieved_d);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("read_dataset_csv rejects malformed files") {
  const auto dir = std::filesystem::temp_directory_path() / "ibvs_ds_bad";
  std::filesystem::create_directories(dir);
  const auto path = dir / "bad.csv";
  {
    std::ofstream out(path);
    out << "not,a,dataset\n";
  }
  CHECK_THROWS_AS(read_dataset_csv(path), std::runtime_error);
  std::filesystem::remove_all(dir);
}
