#include <oracles.hpp>

#include "quadnav/planner.hpp"
#include "support.hpp"

using namespace quadnav;
using namespace quadnav::mapping;
using namespace quadnav::planner;
using quadnav::testing::thrown_code;

namespace {

struct RandomWorld {
  DilatedMap local;
  GlobalInfoMap global;
};

// 20 x 20 x 5 voxels inside a 2D map whose known cells surround it.
RandomWorld random_world(std::mt19937_64& rng) {
  LocalVoxelMap map(Vec3(5.0, 5.0, 1.25), 0.25, Vec3(0.0, 0.0, 1.5));
  std::bernoulli_distribution occ(0.04), unknown(0.05), wall(0.15);
  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    const Index3 idx = map.unlinear(i);
    map.set(idx, occ(rng) ? Cell::Occupied : (unknown(rng) ? Cell::Unknown : Cell::Free));
  }
  GlobalInfoMap global(Eigen::Vector2d(-8.0, -8.0), Eigen::Vector2d(16.0, 16.0), 1.0);
  for (std::size_t i = 0; i < global.cells().size(); ++i) {
    global.set(global.unlinear(i), wall(rng) ? InfoCell::Wall : InfoCell::KnownFree);
  }
  return {dilate(map, 0.25), global};
}

}  // namespace

TEST_CASE("A* cost equals Dijkstra on random hybrid graphs") {
  std::mt19937_64 rng(41);
  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const RandomWorld w = random_world(rng);
    const HybridGraph g = build_graph(w.local, w.global, 1.5);
    REQUIRE(g.node_count() > 10);
    CHECK(g.bridge_edges > 0);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(g.node_count()) - 1);
    for (int q = 0; q < 5; ++q) {
      const int s = pick(rng), t = pick(rng);
      const double ref = oracle::dijkstra(g, s, t);
      if (std::isinf(ref)) {
        CHECK(thrown_code([&] { astar_search(g, s, t); }) == ErrorCode::NoPath);
        continue;
      }
      const SearchResult r = astar_search(g, s, t);
      CHECK(r.cost == ref);
      REQUIRE(!r.nodes.empty());
      CHECK(r.nodes.front() == s);
      CHECK(r.nodes.back() == t);
      ++compared;
    }
  }
  CHECK(compared > 50);
}

TEST_CASE("graph uses traversable voxels and known free cells only") {
  std::mt19937_64 rng(42);
  const RandomWorld w = random_world(rng);
  const HybridGraph g = build_graph(w.local, w.global, 1.5);
  for (const GraphNode& n : g.nodes) {
    if (n.kind == GraphNode::Kind::Voxel) {
      CHECK(w.local.traversable(w.local.map().unlinear(n.grid_index)));
    } else {
      CHECK(w.global.cells()[n.grid_index] == InfoCell::KnownFree);
      CHECK(n.position.z() == 1.5);
    }
  }
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    for (const Edge& e : g.neighbors(static_cast<int>(n))) CHECK(e.cost > 0.0);
  }
}

TEST_CASE("simplified paths keep collision-free segments") {
  LocalVoxelMap map(Vec3(6.0, 6.0, 1.5), 0.25, Vec3(0.0, 0.0, 1.5));
  for (std::size_t i = 0; i < map.cell_count(); ++i) map.set(map.unlinear(i), Cell::Free);
  for (int z = 0; z < map.size().z(); ++z)
    for (int y = 0; y < 16; ++y) map.set(Index3(12, y, z), Cell::Occupied);
  const DilatedMap d = dilate(map, 0.3);
  GlobalInfoMap global(Eigen::Vector2d(-10, -10), Eigen::Vector2d(20, 20), 1.0);
  const HybridGraph g = build_graph(d, global, 1.5);
  const Vec3 start(-2.0, -2.0, 1.5), goal(2.0, -2.0, 1.5);
  const PathPolyline path = astar(g, d, global, start, goal);
  REQUIRE(path.waypoints.size() >= 3);
  CHECK(path.waypoints.front() == start);
  for (std::size_t i = 1; i + 1 < path.waypoints.size(); ++i) {
    CHECK(segment_free(d, path.waypoints[i], path.waypoints[i + 1]));
  }
  CHECK(path.local_prefix().waypoints.size() == path.local_count);
  CHECK(path.length() > (goal - start).norm());
}

TEST_CASE("dead end: recorded wall sends the path back out of the aisle") {
  // Aisle along +x between walls at y = +-1.5, open at x = 0 and capped at x = 30.
  LocalVoxelMap map(Vec3(15.0, 10.0, 3.0), 0.25, Vec3(5.0, 0.0, 1.5));
  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    const Index3 idx = map.unlinear(i);
    const Vec3 c = map.cell_center(idx);
    const bool wall = c.x() > 0.0 && std::abs(c.y()) > 1.5 && std::abs(c.y()) < 1.8;
    map.set(idx, wall ? Cell::Occupied : Cell::Free);
  }
  const DilatedMap d = dilate(map, 0.63);
  auto global_with_cap = [](bool cap) {
    GlobalInfoMap g(Eigen::Vector2d(-10, -10), Eigen::Vector2d(60, 20), 1.0);
    for (std::size_t i = 0; i < g.cells().size(); ++i) {
      const Index2 idx = g.unlinear(i);
      const Eigen::Vector2d c = g.cell_center(idx);
      const bool side = c.x() > 0.0 && c.x() < 31.0 && std::abs(c.y()) > 1.0 && std::abs(c.y()) < 2.0;
      const bool end = cap && c.x() > 30.0 && c.x() < 31.0 && std::abs(c.y()) < 2.0;
      g.set(idx, side || end ? InfoCell::Wall : InfoCell::KnownFree);
    }
    return g;
  };
  const Vec3 start(8.0, 0.0, 1.5), goal(40.0, 0.0, 1.5);

  const GlobalInfoMap open = global_with_cap(false);
  const PathPolyline through = astar(build_graph(d, open, 1.5), d, open, start, goal);
  double min_x = 1e9;
  for (const Vec3& p : through.waypoints) min_x = std::min(min_x, p.x());
  CHECK(min_x > 0.0);

  const GlobalInfoMap capped = global_with_cap(true);
  const PathPolyline back = astar(build_graph(d, capped, 1.5), d, capped, start, goal);
  min_x = 1e9;
  for (const Vec3& p : back.waypoints) min_x = std::min(min_x, p.x());
  CHECK(min_x < 0.0);
  CHECK((back.waypoints.back() - goal).head<2>().norm() < 1.0);
}
