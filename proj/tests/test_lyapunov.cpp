#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ibvs/camera_geometry.hpp"
#include "ibvs/lyapunov.hpp"
#include "ibvs/rng.hpp"

using namespace ibvs;

TEST_CASE("lyapunov_v quadratic values") {
  auto v = lyapunov_v(0.0, 0.0);
  CHECK(v.vx == 0.0);
  CHECK(v.vy == 0.0);
  CHECK(v.v == 0.0);

  v = lyapunov_v(1.0, -1.0);
  CHECK(v.vx == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(v.vy == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(v.v == doctest::Approx(1.0).epsilon(1e-15));

  v = lyapunov_v(0.2, 0.4);
  CHECK(v.vx == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(v.vy == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(v.v == doctest::Approx(0.10).epsilon(1e-12));
}

TEST_CASE("d_x values") {
  InterceptState s;
  s.px = 0.0;
  s.cz = 3.0;
  s.vz = 7.0;
  s.wy = 0.1;
  CHECK(d_x(s, 123.0) == 0.0);  // px factor

  s = InterceptState{0.5, 0.0, 15.0, 10.0, 0.0};
  CHECK(d_x(s, 17.5) == doctest::Approx(-0.5).epsilon(1e-12));

  s = InterceptState{0.5, 0.0, 15.0, 10.0, 0.2};
  CHECK(d_x(s, 0.0) == doctest::Approx(0.25).epsilon(1e-12));

  s.cz = 0.0;
  CHECK_THROWS_AS(d_x(s, 0.0), std::domain_error);
}

TEST_CASE("d_y values") {
  InterceptState s;
  s.py = 0.0;
  s.cz = 2.0;
  s.vz = 5.0;
  CHECK(d_y(s, -4.0) == 0.0);

  s = InterceptState{0.0, -0.4, 10.0, 2.0, 0.0};
  CHECK(d_y(s, -6.0) == doctest::Approx(-0.4).epsilon(1e-12));

  s = InterceptState{0.5, 0.5, 0.0, 1.0, 0.2};
  CHECK(d_y(s, 0.0) == doctest::Approx(-0.025).epsilon(1e-12));

  s.cz = -1.0;
  CHECK_THROWS_AS(d_y(s, 0.0), std::domain_error);
}

TEST_CASE("w_value") {
  CHECK(w_value(0.0) == 0.0);
  CHECK(w_value(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(w_value(-1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("W is positive definite over a sign-varied sample") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double p = rng.uniform(-1.0, 1.0);
    if (p == 0.0) continue;
    CHECK(w_value(p) > 0.0);
  }
  CHECK(w_value(0.0) == 0.0);
}

TEST_CASE("d_x + d_y equals the chain rule along the image dynamics") {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    InterceptState s;
    s.px = rng.uniform(-1.0, 1.0);
    s.py = rng.uniform(-1.0, 1.0);
    s.vz = rng.uniform(0.1, 15.0);
    s.cz = rng.uniform(0.5, 50.0);
    s.wy = rng.uniform(-0.2, 0.2);
    const double vx = rng.uniform(-30.0, 30.0);
    const double vy = rng.uniform(-30.0, 30.0);

    const Vec2 rate = image_point_dynamics({s.px, s.py}, s.cz,
                                           {vx, vy, s.vz, s.wy});
    const double v_dot = s.px * rate.x + s.py * rate.y;
    CHECK(d_x(s, vx) + d_y(s, vy) == doctest::Approx(v_dot).epsilon(1e-10));
  }
}

TEST_CASE("d_x is affine in vx with slope -px/cz") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    InterceptState s;
    s.px = rng.uniform(-1.0, 1.0);
    s.py = rng.uniform(-1.0, 1.0);
    s.vz = rng.uniform(0.1, 15.0);
    s.cz = rng.uniform(0.5, 50.0);
    s.wy = rng.uniform(-0.2, 0.2);
    const double u0 = rng.uniform(-30.0, 30.0);
    const double u1 = rng.uniform(-30.0, 30.0);
    if (u0 == u1) continue;
    const double slope = (d_x(s, u1) - d_x(s, u0)) / (u1 - u0);
    CHECK(slope == doctest::Approx(-s.px / s.cz).epsilon(1e-12));
  }
}
