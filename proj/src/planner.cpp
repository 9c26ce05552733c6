#include "quadnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

namespace quadnav::planner {

using mapping::Cell;
using mapping::DilatedMap;
using mapping::GlobalInfoMap;
using mapping::Index2;
using mapping::Index3;
using mapping::InfoCell;

namespace {

const Index3 kNeighbors3[6] = {Index3(-1, 0, 0), Index3(1, 0, 0), Index3(0, -1, 0),
                               Index3(0, 1, 0),  Index3(0, 0, -1), Index3(0, 0, 1)};
const Index2 kNeighbors2[4] = {Index2(-1, 0), Index2(1, 0), Index2(0, -1), Index2(0, 1)};

bool on_horizontal_boundary(const Index3& idx, const Index3& size) {
  return idx.x() == 0 || idx.y() == 0 || idx.x() == size.x() - 1 || idx.y() == size.y() - 1;
}

// Cells of the segment a-b in traversal order (every voxel the segment passes
// through, not just one per dominant-axis step).
std::vector<Index3> supercover(const mapping::LocalVoxelMap& map, const Vec3& a, const Vec3& b) {
  std::vector<Index3> out;
  const double res = map.resolution();
  const Vec3 o = (a - map.origin()) / res;
  const Vec3 d = (b - a) / res;
  Index3 cur = o.array().floor().cast<int>();
  const Index3 last = ((b - map.origin()) / res).array().floor().cast<int>();
  Index3 step;
  Vec3 t_max, t_delta;
  for (int k = 0; k < 3; ++k) {
    if (d(k) > 0) {
      step(k) = 1;
      t_delta(k) = 1.0 / d(k);
      t_max(k) = (std::floor(o(k)) + 1.0 - o(k)) / d(k);
    } else if (d(k) < 0) {
      step(k) = -1;
      t_delta(k) = -1.0 / d(k);
      t_max(k) = (o(k) - std::floor(o(k))) / -d(k);
    } else {
      step(k) = 0;
      t_delta(k) = std::numeric_limits<double>::infinity();
      t_max(k) = std::numeric_limits<double>::infinity();
    }
  }
  out.push_back(cur);
  const int max_steps = (last - cur).cwiseAbs().sum();
  for (int i = 0; i < max_steps; ++i) {
    int k = 0;
    if (t_max(1) < t_max(k)) k = 1;
    if (t_max(2) < t_max(k)) k = 2;
    if (t_max(k) > 1.0) break;
    cur(k) += step(k);
    t_max(k) += t_delta(k);
    out.push_back(cur);
  }
  return out;
}

}  // namespace

HybridGraph build_graph(const DilatedMap& local, const GlobalInfoMap& global, double z_fly,
                        const PlannerParams& params) {
  HybridGraph g;
  const mapping::LocalVoxelMap& map = local.map();
  const Index3 size = map.size();
  g.voxel_node.assign(map.cell_count(), -1);
  g.cell_node.assign(global.cells().size(), -1);
  g.min_cost_multiplier = std::min(1.0, params.penalty_2d);

  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    const Index3 idx = map.unlinear(i);
    if (!local.traversable(idx)) continue;
    g.voxel_node[i] = static_cast<int>(g.nodes.size());
    g.nodes.push_back({GraphNode::Kind::Voxel, map.cell_center(idx), i});
  }

  const Vec3 lo = map.origin();
  const Vec3 hi = lo + map.dims();
  const double band = params.boundary_band;
  for (std::size_t i = 0; i < global.cells().size(); ++i) {
    if (global.cells()[i] != InfoCell::KnownFree) continue;
    const Index2 idx = global.unlinear(i);
    const Eigen::Vector2d c = global.cell_center(idx);
    const bool deep_inside = c.x() > lo.x() + band && c.x() < hi.x() - band &&
                             c.y() > lo.y() + band && c.y() < hi.y() - band;
    if (deep_inside) continue;
    g.cell_node[i] = static_cast<int>(g.nodes.size());
    g.nodes.push_back({GraphNode::Kind::Cell, Vec3(c.x(), c.y(), z_fly), i});
  }

  std::vector<std::vector<Edge>> adj(g.nodes.size());
  for (int n = 0; n < static_cast<int>(g.nodes.size()); ++n) {
    const GraphNode& node = g.nodes[n];
    if (node.kind == GraphNode::Kind::Voxel) {
      const Index3 idx = map.unlinear(node.grid_index);
      for (const Index3& off : kNeighbors3) {
        const Index3 q = idx + off;
        if (!map.in_bounds(q)) continue;
        const int m = g.voxel_node[map.linear(q)];
        if (m < 0) continue;
        adj[n].push_back({m, map.resolution()});
        if (m > n) ++g.voxel_edges;
      }
      if (on_horizontal_boundary(idx, size)) {
        const Index2 c = global.index_of(node.position.head<2>());
        if (global.in_bounds(c)) {
          const int m = g.cell_node[global.linear(c)];
          if (m >= 0) {
            const double cost = (g.nodes[m].position - node.position).norm();
            adj[n].push_back({m, cost});
            adj[m].push_back({n, cost});
            ++g.bridge_edges;
          }
        }
      }
    } else {
      const Index2 idx = global.unlinear(node.grid_index);
      for (const Index2& off : kNeighbors2) {
        const Index2 q = idx + off;
        if (!global.in_bounds(q)) continue;
        const int m = g.cell_node[global.linear(q)];
        if (m < 0) continue;
        adj[n].push_back({m, params.penalty_2d * global.resolution()});
        if (m > n) ++g.cell_edges;
      }
    }
  }

  g.offsets.resize(g.nodes.size() + 1, 0);
  for (std::size_t n = 0; n < adj.size(); ++n) {
    // Deterministic neighbour order regardless of insertion path.
    std::stable_sort(adj[n].begin(), adj[n].end(),
                     [](const Edge& a, const Edge& b) { return a.to < b.to; });
    g.offsets[n + 1] = g.offsets[n] + static_cast<int>(adj[n].size());
  }
  g.edges.reserve(static_cast<std::size_t>(g.offsets.back()));
  for (const auto& list : adj) g.edges.insert(g.edges.end(), list.begin(), list.end());
  return g;
}

SearchResult astar_search(const HybridGraph& g, int start, int target) {
  const auto n = g.node_count();
  if (start < 0 || target < 0 || static_cast<std::size_t>(start) >= n ||
      static_cast<std::size_t>(target) >= n) {
    throw Error(ErrorCode::NoPath, "start or target not in graph");
  }
  const Vec3 goal = g.nodes[static_cast<std::size_t>(target)].position;
  const auto h = [&](int v) {
    return g.min_cost_multiplier * (g.nodes[static_cast<std::size_t>(v)].position - goal).norm();
  };

  struct Entry {
    double f;
    std::uint64_t seq;
    int node;
    bool operator>(const Entry& o) const { return f != o.f ? f > o.f : seq > o.seq; }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  std::vector<double> cost(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  std::uint64_t seq = 0;

  cost[static_cast<std::size_t>(start)] = 0.0;
  open.push({h(start), seq++, start});
  SearchResult res;
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    const auto u = static_cast<std::size_t>(e.node);
    if (closed[u]) continue;
    closed[u] = 1;
    ++res.expanded;
    if (e.node == target) break;
    for (const Edge& edge : g.neighbors(e.node)) {
      const auto v = static_cast<std::size_t>(edge.to);
      if (closed[v]) continue;
      const double c = cost[u] + edge.cost;
      if (c < cost[v]) {
        cost[v] = c;
        parent[v] = e.node;
        open.push({c + h(edge.to), seq++, edge.to});
      }
    }
  }
  if (!closed[static_cast<std::size_t>(target)]) {
    throw Error(ErrorCode::NoPath, "target unreachable");
  }
  res.cost = cost[static_cast<std::size_t>(target)];
  for (int v = target; v >= 0; v = parent[static_cast<std::size_t>(v)]) res.nodes.push_back(v);
  std::reverse(res.nodes.begin(), res.nodes.end());
  return res;
}

int start_node(const HybridGraph& g, const DilatedMap& local, const Vec3& start, double radius) {
  const mapping::LocalVoxelMap& map = local.map();
  const auto direct = map.find(start);
  if (direct && g.voxel_node[map.linear(*direct)] >= 0) return g.voxel_node[map.linear(*direct)];

  const Index3 c = map.index_of(start);
  const int reach = static_cast<int>(std::ceil(radius / map.resolution()));
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int dz = -reach; dz <= reach; ++dz) {
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        const Index3 q = c + Index3(dx, dy, dz);
        if (!map.in_bounds(q)) continue;
        const int node = g.voxel_node[map.linear(q)];
        if (node < 0) continue;
        const double d = (map.cell_center(q) - start).norm();
        if (d <= radius && (d < best_d || (d == best_d && node < best))) {
          best = node;
          best_d = d;
        }
      }
    }
  }
  return best;
}

int select_target(const HybridGraph& g, const DilatedMap& local, const GlobalInfoMap& global,
                  int start, const Vec3& goal) {
  const mapping::LocalVoxelMap& map = local.map();
  std::vector<std::uint8_t> reached(g.node_count(), 0);
  std::deque<int> queue{start};
  reached[static_cast<std::size_t>(start)] = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const Edge& e : g.neighbors(u)) {
      if (!reached[static_cast<std::size_t>(e.to)]) {
        reached[static_cast<std::size_t>(e.to)] = 1;
        queue.push_back(e.to);
      }
    }
  }

  if (const auto gi = map.find(goal)) {
    const int node = g.voxel_node[map.linear(*gi)];
    if (node >= 0 && reached[static_cast<std::size_t>(node)]) return node;
  } else {
    const Index2 gc = global.index_of(goal.head<2>());
    if (global.in_bounds(gc)) {
      const int node = g.cell_node[global.linear(gc)];
      if (node >= 0 && reached[static_cast<std::size_t>(node)]) return node;
    }
  }

  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if (!reached[n]) continue;
    const GraphNode& node = g.nodes[n];
    bool frontier = false;
    if (node.kind == GraphNode::Kind::Voxel) {
      const Index3 idx = map.unlinear(node.grid_index);
      for (const Index3& off : kNeighbors3) {
        const Index3 q = idx + off;
        if (map.in_bounds(q) && map.at(q) == Cell::Unknown) {
          frontier = true;
          break;
        }
      }
    } else {
      const Index2 idx = global.unlinear(node.grid_index);
      for (const Index2& off : kNeighbors2) {
        const Index2 q = idx + off;
        if (!global.in_bounds(q) || global.at(q) == InfoCell::Unknown) {
          frontier = true;
          break;
        }
      }
    }
    if (!frontier) continue;
    const double d = (node.position - goal).norm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(n);
    }
  }
  if (best < 0) throw Error(ErrorCode::NoPath, "no reachable frontier");
  return best;
}

double PathPolyline::length() const {
  double l = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) l += (waypoints[i] - waypoints[i - 1]).norm();
  return l;
}

PathPolyline PathPolyline::local_prefix() const {
  PathPolyline out;
  out.waypoints.assign(waypoints.begin(),
                       waypoints.begin() + static_cast<std::ptrdiff_t>(local_count));
  out.local_count = local_count;
  return out;
}

bool segment_free(const DilatedMap& local, const Vec3& a, const Vec3& b) {
  for (const Index3& idx : supercover(local.map(), a, b)) {
    if (!local.traversable(idx)) return false;
  }
  return true;
}

PathPolyline simplify(const std::vector<Vec3>& raw, const DilatedMap& local) {
  PathPolyline out;
  if (raw.empty()) return out;
  std::size_t i = 0;
  out.waypoints.push_back(raw.front());
  while (i + 1 < raw.size()) {
    std::size_t j = raw.size() - 1;
    while (j > i + 1 && !segment_free(local, raw[i], raw[j])) --j;
    out.waypoints.push_back(raw[j]);
    i = j;
  }
  // Drop consecutive duplicates.
  out.waypoints.erase(std::unique(out.waypoints.begin(), out.waypoints.end(),
                                  [](const Vec3& a, const Vec3& b) { return (a - b).norm() < 1e-12; }),
                      out.waypoints.end());
  out.local_count = out.waypoints.size();
  return out;
}

PathPolyline astar(const HybridGraph& g, const DilatedMap& local, const GlobalInfoMap& global,
                   const Vec3& start, const Vec3& goal, const PlannerParams& params) {
  const int s = start_node(g, local, start, params.start_search_radius);
  if (s < 0) throw Error(ErrorCode::NoPath, "start is not near a free voxel");
  const int t = select_target(g, local, global, s, goal);
  const SearchResult res = astar_search(g, s, t);

  std::vector<Vec3> raw{start};
  std::size_t k = 0;
  for (; k < res.nodes.size(); ++k) {
    const GraphNode& node = g.nodes[static_cast<std::size_t>(res.nodes[k])];
    if (node.kind != GraphNode::Kind::Voxel) break;
    if ((node.position - raw.back()).norm() > 1e-12) raw.push_back(node.position);
  }
  // A goal inside a free voxel is hit exactly rather than at the voxel centre.
  if (k == res.nodes.size() && local.map().find(goal) &&
      g.voxel_node[local.map().linear(*local.map().find(goal))] == res.nodes.back() &&
      segment_free(local, raw.back(), goal) && (goal - raw.back()).norm() > 1e-12) {
    raw.push_back(goal);
  }
  PathPolyline path = simplify(raw, local);
  for (; k < res.nodes.size(); ++k) {
    path.waypoints.push_back(g.nodes[static_cast<std::size_t>(res.nodes[k])].position);
  }
  return path;
}

}  // namespace quadnav::planner
