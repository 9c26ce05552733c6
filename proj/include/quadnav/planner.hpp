#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "quadnav/mapping.hpp"

namespace quadnav::planner {

struct PlannerParams {
  double penalty_2d = 2.0;    // cost multiplier on 2D cell-to-cell edges
  double boundary_band = 1.0; // 2D cells this close to the local footprint edge stay in the graph
  double start_search_radius = 1.0;
};

struct GraphNode {
  enum class Kind { Voxel, Cell } kind = Kind::Voxel;
  Vec3 position = Vec3::Zero();  // 2D nodes lifted to the flight altitude
  std::size_t grid_index = 0;    // linear index in the local or global grid
};

struct Edge {
  int to = 0;
  double cost = 0.0;
};

/// Voxels of the local 3D map and cells of the coarse 2D map joined by
/// bridge edges along the local map's horizontal boundary.
class HybridGraph {
 public:
  std::vector<GraphNode> nodes;
  std::vector<int> offsets;  // CSR adjacency: edges[offsets[n] .. offsets[n+1])
  std::vector<Edge> edges;
  std::vector<int> voxel_node;  // local linear index -> node id or -1
  std::vector<int> cell_node;   // global linear index -> node id or -1
  std::size_t voxel_edges = 0;
  std::size_t cell_edges = 0;
  std::size_t bridge_edges = 0;  // each counted once per direction
  double min_cost_multiplier = 1.0;

  std::size_t node_count() const { return nodes.size(); }
  std::span<const Edge> neighbors(int n) const {
    return {edges.data() + offsets[n], edges.data() + offsets[n + 1]};
  }
};

HybridGraph build_graph(const mapping::DilatedMap& local, const mapping::GlobalInfoMap& global,
                        double z_fly, const PlannerParams& params = {});

struct SearchResult {
  std::vector<int> nodes;
  double cost = 0.0;
  std::size_t expanded = 0;
};

/// A* with heuristic = straight-line distance scaled by the smallest edge cost
/// multiplier. Ties on f are broken by insertion order. Throws NoPath.
SearchResult astar_search(const HybridGraph& g, int start, int target);

/// Reachable node to aim for: the goal node itself when it is in the graph and
/// reachable, otherwise the reachable frontier node closest to the goal.
int select_target(const HybridGraph& g, const mapping::DilatedMap& local,
                  const mapping::GlobalInfoMap& global, int start, const Vec3& goal);

/// Node for a start position, falling back to the nearest traversable voxel
/// within `radius`. Returns -1 if none.
int start_node(const HybridGraph& g, const mapping::DilatedMap& local, const Vec3& start,
               double radius);

struct PathPolyline {
  std::vector<Vec3> waypoints;
  std::size_t local_count = 0;  // leading waypoints that lie in the local map

  double length() const;
  std::size_t segment_count() const { return waypoints.empty() ? 0 : waypoints.size() - 1; }
  /// The in-local-map prefix.
  PathPolyline local_prefix() const;
};

/// True if every voxel the segment passes through is traversable.
bool segment_free(const mapping::DilatedMap& local, const Vec3& a, const Vec3& b);

/// Greedy shortcutting of a voxel path to maximal collision-free segments.
PathPolyline simplify(const std::vector<Vec3>& raw, const mapping::DilatedMap& local);

/// Full planning query: start node, target selection, A*, simplification of
/// the 3D prefix. The first waypoint is `start` itself.
PathPolyline astar(const HybridGraph& g, const mapping::DilatedMap& local,
                   const mapping::GlobalInfoMap& global, const Vec3& start, const Vec3& goal,
                   const PlannerParams& params = {});

}  // namespace quadnav::planner
