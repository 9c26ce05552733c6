#include <filesystem>

#include "quadnav/artifacts.hpp"
#include "quadnav/nav.hpp"
#include "support.hpp"

using namespace quadnav;
using quadnav::testing::thrown_code;

namespace fs = std::filesystem;

TEST_CASE("global map text round trips") {
  mapping::GlobalInfoMap g(Eigen::Vector2d(-3, -2), Eigen::Vector2d(7, 5), 1.0);
  std::mt19937_64 rng(91);
  std::uniform_int_distribution<int> pick(0, 2);
  for (std::size_t i = 0; i < g.cells().size(); ++i) {
    g.set(g.unlinear(i), static_cast<mapping::InfoCell>(pick(rng)));
  }
  CHECK(io::parse_global_map(io::global_map_text(g)) == g);
  CHECK(thrown_code([] { io::parse_global_map("nonsense\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("local map text is run-length encoded") {
  mapping::LocalVoxelMap map(Vec3(1.0, 1.0, 1.0), 0.5, Vec3::Zero());
  map.set(mapping::Index3(0, 0, 0), mapping::Cell::Free);
  map.set(mapping::Index3(1, 0, 0), mapping::Cell::Occupied);
  const std::string text = io::local_map_text(map);
  CHECK(text.find("1F 1O 6U") != std::string::npos);
}

TEST_CASE("run artifacts are written, parsed and plotted deterministically") {
  sim::Scenario sc = sim::load_scenario("empty");
  sc.goal_range = 3.0;
  const sim::RunResult run = sim::run_scenario(sc);
  CHECK(run.metrics.status == sim::RunStatus::GoalReached);
  const fs::path dir = fs::temp_directory_path() / "quadnav_artifact_test";
  fs::remove_all(dir);
  io::write_run(run, dir);
  for (const char* f : {"scenario.txt", "navlog.csv", "replans.csv", "path.csv", "corridor.csv",
                        "trajectory.csv", "local_map.txt", "global_map.txt", "metrics.txt"}) {
    CHECK(fs::is_regular_file(dir / f));
  }
  io::plot_run(dir);
  CHECK(fs::is_regular_file(dir / "topdown.svg"));
  CHECK(fs::is_regular_file(dir / "timeseries.svg"));

  const io::LoggedTrack track = io::parse_navlog(io::navlog_csv(run.log));
  REQUIRE(track.t.size() == run.log.rows.size());
  CHECK((track.p_true.back() - run.log.rows.back().p_true).norm() < 1e-6);

  const sim::RunResult again = sim::run_scenario(sc);
  CHECK(io::navlog_csv(again.log) == io::navlog_csv(run.log));
  CHECK(io::topdown_svg(sc, again.global_map, io::parse_navlog(io::navlog_csv(again.log))) ==
        io::read_file(dir / "topdown.svg"));

  fs::remove(dir / "navlog.csv");
  CHECK(thrown_code([&] { io::plot_run(dir); }) == ErrorCode::MissingLog);
  fs::remove_all(dir);
}
