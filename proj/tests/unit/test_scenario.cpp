#include "quadnav/scenario.hpp"
#include "support.hpp"

using namespace quadnav;
using namespace quadnav::sim;
using quadnav::testing::thrown_code;

TEST_CASE("shipped scenarios parse, validate and round trip") {
  for (const char* name :
       {"empty", "slalom", "aisle45", "aisle90", "aisle90_jump", "straight", "deadend"}) {
    CAPTURE(name);
    const Scenario sc = load_scenario(name);
    CHECK(sc.name == name);
    CHECK(validate(sc).empty());
    const std::string text = to_text(sc);
    const Scenario back = parse_scenario_text(text);
    CHECK(to_text(back) == text);
    CHECK(back.world.boxes.size() == sc.world.boxes.size());
    CHECK((back.goal() - sc.goal()).norm() < 1e-9);
  }
}

TEST_CASE("goal from bearing and range") {
  const Scenario sc = parse_scenario_text("start 1 2 1.5\ngoal_bearing_deg 90\ngoal_range 4\n");
  CHECK((sc.goal() - Vec3(1, 6, 1.5)).norm() < 1e-12);
  CHECK(sc.time_lower_bound() > 0.0);
  CHECK(sc.timeout() == doctest::Approx(sc.timeout_factor * sc.time_lower_bound()));
}

TEST_CASE("enclosure adds floor and ceiling slabs") {
  const Scenario sc = parse_scenario_text("global_origin 0 0\nglobal_dims 10 10\nenclosure 0 4\n");
  REQUIRE(sc.world.boxes.size() == 2);
  CHECK(sc.world.boxes[0].hi.z() == 0.0);
  CHECK(sc.world.boxes[1].lo.z() == 4.0);
}

TEST_CASE("parse errors carry the line number") {
  try {
    parse_scenario_text("name a\n\nbogus_key 3\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  CHECK(thrown_code([] { parse_scenario_text("v_max fast\n"); }) == ErrorCode::ParseError);
  CHECK(thrown_code([] { parse_scenario_text("start 1 2\n"); }) == ErrorCode::ParseError);
  CHECK(thrown_code([] { load_scenario("no_such_scenario"); }) == ErrorCode::ParseError);
}

TEST_CASE("invariant violations are reported") {
  Scenario sc = parse_scenario_text("v_max -1\ncontrol_hz 300\nbox 0.1 -1 0 1 1 3\n");
  const std::vector<std::string> v = validate(sc);
  CHECK(v.size() >= 3);
  CHECK(thrown_code([&] { require_valid(sc); }) == ErrorCode::InvalidScenario);
}
