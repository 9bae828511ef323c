#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ibvs/config.hpp"
#include "ibvs/errors.hpp"

using namespace ibvs;

TEST_CASE("defaults reproduce the case-study settings and validate") {
  const PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.search.eta == 2.0);
  CHECK(cfg.roi.px.lo == -1.0);
  CHECK(cfg.roi.px.hi == 1.0);
  CHECK(cfg.roi.wy.lo == -0.2);
  CHECK(cfg.roi.wy.hi == 0.2);
  CHECK(cfg.roi.vz.lo == 0.1);
  CHECK(cfg.roi.vz.hi == 15.0);
  CHECK(cfg.roi.cz.lo == 0.5);
  CHECK(cfg.roi.cz.hi == 50.0);
  CHECK(cfg.grid.vz == 15.0);
  CHECK(cfg.grid.wy == 0.0);
  CHECK(cfg.train.epochs == 5);
  CHECK(cfg.samples_per_axis == 100000);
  CHECK(cfg.sim.vz == 15.0);
  CHECK(cfg.initial_states.size() == 6);
}

TEST_CASE("config JSON round-trips") {
  PipelineConfig cfg;
  cfg.seed = 99;
  cfg.search.eta = 3.5;
  cfg.train.epochs = 7;
  cfg.grid.p_count = 50;
  cfg.sim.distance_mode = DistanceMode::fabricated;
  cfg.sim.yaw_mode = YawMode::proportional;
  cfg.initial_states = {{40.0, 0.5, -0.5}};
  const std::string text = config_to_json(cfg);
  const PipelineConfig back = config_from_json(text);
  CHECK(back.seed == 99);
  CHECK(back.search.eta == 3.5);
  CHECK(back.train.epochs == 7);
  CHECK(back.grid.p_count == 50);
  CHECK(back.sim.distance_mode == DistanceMode::fabricated);
  CHECK(back.sim.yaw_mode == YawMode::proportional);
  REQUIRE(back.initial_states.size() == 1);
  CHECK(back.initial_states[0].cz == 40.0);
  CHECK(config_to_json(back) == text);
}

TEST_CASE("partial config merges over defaults") {
  const PipelineConfig cfg =
      config_from_json(R"({"search": {"eta": 1.25}})");
  CHECK(cfg.search.eta == 1.25);
  CHECK(cfg.train.epochs == 5);           // untouched default
  CHECK(cfg.samples_per_axis == 100000);  // untouched default
}

TEST_CASE("config rejects bad values") {
  CHECK_THROWS_AS(config_from_json(R"({"search": {"eta": 0}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"search": {"eta": -2}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"train": {"epochs": 0}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"novel_key": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"roi": {"px": [1, -1]}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"grid": {"p_count": 1}})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"(not json)"), ConfigError);
  CHECK_THROWS_AS(
      config_from_json(R"({"sim": {"initial_states": [[0.1, 0, 0]]}})"),
      ConfigError);  // starts inside cz_stop
}

TEST_CASE("grid flag semantics live in GridSpec validation") {
  PipelineConfig cfg;
  cfg.grid.p_count = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = PipelineConfig{};
  cfg.violation_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
