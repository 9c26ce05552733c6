#include "quadnav/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace quadnav::mapping {

Vec3 LidarScan::ray_direction(const LidarRay& r) const {
  return rotation * Vec3(std::cos(r.azimuth), std::sin(r.azimuth), 0.0);
}

LocalVoxelMap::LocalVoxelMap(const Vec3& dims, double resolution, const Vec3& center)
    : res_(resolution), center_(snap(center, resolution)) {
  for (int a = 0; a < 3; ++a) size_(a) = static_cast<int>(std::ceil(dims(a) / res_ - 1e-9));
  cells_.assign(static_cast<std::size_t>(size_.prod()), Cell::Unknown);
}

Vec3 LocalVoxelMap::snap(const Vec3& p, double resolution) {
  return (p / resolution).array().round().matrix() * resolution;
}

bool LocalVoxelMap::in_bounds(const Index3& idx) const {
  return (idx.array() >= 0).all() && (idx.array() < size_.array()).all();
}

Index3 LocalVoxelMap::index_of(const Vec3& p) const {
  const Vec3 rel = (p - origin()) / res_;
  return rel.array().floor().cast<int>();
}

std::optional<Index3> LocalVoxelMap::find(const Vec3& p) const {
  const Index3 idx = index_of(p);
  if (!in_bounds(idx)) return std::nullopt;
  return idx;
}

Vec3 LocalVoxelMap::cell_center(const Index3& idx) const {
  return origin() + res_ * (idx.cast<double>() + Vec3::Constant(0.5));
}

Index3 LocalVoxelMap::unlinear(std::size_t i) const {
  const auto nx = static_cast<std::size_t>(size_.x());
  const auto ny = static_cast<std::size_t>(size_.y());
  return Index3(static_cast<int>(i % nx), static_cast<int>((i / nx) % ny),
                static_cast<int>(i / (nx * ny)));
}

std::vector<Index3> raycast_cells(const LocalVoxelMap& map, const Vec3& from, const Vec3& to) {
  const Index3 a = map.index_of(from);
  const Index3 b = map.index_of(to);
  const Index3 d = b - a;
  const Index3 ad = d.cwiseAbs();
  const int n = ad.maxCoeff();

  std::vector<Index3> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  // Integer DDA: one step along the dominant axis per cell, error terms for
  // the other two.
  int major = 0;
  if (ad(1) > ad(major)) major = 1;
  if (ad(2) > ad(major)) major = 2;
  Index3 step;
  for (int k = 0; k < 3; ++k) step(k) = d(k) > 0 ? 1 : (d(k) < 0 ? -1 : 0);
  Index3 cur = a;
  Index3 err = Index3::Zero();
  out.push_back(cur);
  for (int i = 0; i < n; ++i) {
    cur(major) += step(major);
    for (int k = 0; k < 3; ++k) {
      if (k == major) continue;
      err(k) += 2 * ad(k);
      if (err(k) > n) {
        cur(k) += step(k);
        err(k) -= 2 * n;
      }
    }
    out.push_back(cur);
  }
  return out;
}

void integrate_scan(LocalVoxelMap& map, const LidarScan& scan) {
  std::vector<std::size_t> free_cells;
  std::vector<std::size_t> hit_cells;
  for (const LidarRay& ray : scan.rays) {
    if (!ray.valid) continue;
    const Vec3 end = scan.origin + ray.range * scan.ray_direction(ray);
    const std::vector<Index3> cells = raycast_cells(map, scan.origin, end);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      if (map.in_bounds(cells[i])) free_cells.push_back(map.linear(cells[i]));
    }
    if (map.in_bounds(cells.back())) hit_cells.push_back(map.linear(cells.back()));
  }
  for (std::size_t i : free_cells) {
    const Index3 idx = map.unlinear(i);
    if (map.at(idx) == Cell::Unknown) map.set(idx, Cell::Free);
  }
  for (std::size_t i : hit_cells) map.set(map.unlinear(i), Cell::Occupied);
}

void recenter(LocalVoxelMap& map, const Vec3& new_center) {
  const Vec3 snapped = LocalVoxelMap::snap(new_center, map.resolution());
  const Index3 shift =
      ((snapped - map.center()) / map.resolution()).array().round().cast<int>();
  if (shift.isZero()) return;
  LocalVoxelMap moved(map.dims(), map.resolution(), snapped);
  const Index3& n = map.size();
  for (int z = 0; z < n.z(); ++z) {
    for (int y = 0; y < n.y(); ++y) {
      for (int x = 0; x < n.x(); ++x) {
        const Index3 dst(x, y, z);
        const Index3 src = dst + shift;
        if (map.in_bounds(src)) moved.set(dst, map.at(src));
      }
    }
  }
  map = std::move(moved);
}

DilatedMap::DilatedMap(LocalVoxelMap map, double radius)
    : map_(std::move(map)), radius_(radius), blocked_(map_.cell_count(), 0) {
  const double res = map_.resolution();
  const int reach = static_cast<int>(std::floor(radius / res + 1e-9));
  std::vector<Index3> ball;
  for (int dz = -reach; dz <= reach; ++dz) {
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        if (res * std::sqrt(double(dx * dx + dy * dy + dz * dz)) <= radius + 1e-12) {
          ball.emplace_back(dx, dy, dz);
        }
      }
    }
  }
  for (std::size_t i = 0; i < map_.cell_count(); ++i) {
    if (map_.cells()[i] != Cell::Occupied) continue;
    const Index3 c = map_.unlinear(i);
    for (const Index3& off : ball) {
      const Index3 q = c + off;
      if (map_.in_bounds(q)) blocked_[map_.linear(q)] = 1;
    }
  }
}

std::size_t DilatedMap::blocked_count() const {
  return static_cast<std::size_t>(std::count(blocked_.begin(), blocked_.end(), 1));
}

namespace {

template <typename Pred>
std::vector<Vec3> centers_in_box(const LocalVoxelMap& map, const Vec3& lo, const Vec3& hi,
                                 Pred pred) {
  std::vector<Vec3> out;
  const Index3 a = map.index_of(lo).cwiseMax(Index3::Zero());
  const Index3 b = map.index_of(hi).cwiseMin(map.size() - Index3::Ones());
  for (int z = a.z(); z <= b.z(); ++z) {
    for (int y = a.y(); y <= b.y(); ++y) {
      for (int x = a.x(); x <= b.x(); ++x) {
        const Index3 idx(x, y, z);
        if (!pred(idx)) continue;
        const Vec3 c = map.cell_center(idx);
        if ((c.array() >= lo.array()).all() && (c.array() <= hi.array()).all()) out.push_back(c);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Vec3> DilatedMap::blocked_centers(const Vec3& lo, const Vec3& hi) const {
  return centers_in_box(map_, lo, hi, [this](const Index3& i) { return blocked(i); });
}

std::vector<Vec3> DilatedMap::occupied_centers(const Vec3& lo, const Vec3& hi) const {
  return centers_in_box(map_, lo, hi,
                        [this](const Index3& i) { return map_.at(i) == Cell::Occupied; });
}

DilatedMap dilate(const LocalVoxelMap& map, double radius) { return DilatedMap(map, radius); }

GlobalInfoMap::GlobalInfoMap(const Eigen::Vector2d& origin, const Eigen::Vector2d& dims,
                             double resolution)
    : origin_(origin), res_(resolution) {
  size_ = (dims / resolution).array().ceil().cast<int>();
  cells_.assign(static_cast<std::size_t>(size_.prod()), InfoCell::Unknown);
}

bool GlobalInfoMap::in_bounds(const Index2& idx) const {
  return (idx.array() >= 0).all() && (idx.array() < size_.array()).all();
}

Index2 GlobalInfoMap::index_of(const Eigen::Vector2d& p) const {
  return ((p - origin_) / res_).array().floor().cast<int>();
}

Eigen::Vector2d GlobalInfoMap::cell_center(const Index2& idx) const {
  return origin_ + res_ * (idx.cast<double>() + Eigen::Vector2d::Constant(0.5));
}

Index2 GlobalInfoMap::unlinear(std::size_t i) const {
  const auto nx = static_cast<std::size_t>(size_.x());
  return Index2(static_cast<int>(i % nx), static_cast<int>(i / nx));
}

std::size_t GlobalInfoMap::known_count() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](InfoCell c) { return c != InfoCell::Unknown; }));
}

void update_global(GlobalInfoMap& global, const LocalVoxelMap& local, double wall_height) {
  const Index3& n = local.size();
  const double res = local.resolution();
  std::vector<std::uint8_t> observed(global.cells().size(), 0);
  std::vector<std::uint8_t> wall(global.cells().size(), 0);
  for (int y = 0; y < n.y(); ++y) {
    for (int x = 0; x < n.x(); ++x) {
      bool seen = false;
      int kmin = n.z(), kmax = -1;
      for (int z = 0; z < n.z(); ++z) {
        const Cell c = local.at(Index3(x, y, z));
        if (c != Cell::Unknown) seen = true;
        if (c == Cell::Occupied) {
          kmin = std::min(kmin, z);
          kmax = std::max(kmax, z);
        }
      }
      if (!seen) continue;
      const Vec3 c = local.cell_center(Index3(x, y, 0));
      const Index2 g = global.index_of(c.head<2>());
      if (!global.in_bounds(g)) continue;
      const std::size_t li = global.linear(g);
      observed[li] = 1;
      if (kmax >= 0 && (kmax - kmin + 1) * res >= wall_height - 1e-9) wall[li] = 1;
    }
  }
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!observed[i]) continue;
    const Index2 g = global.unlinear(i);
    if (wall[i]) {
      global.set(g, InfoCell::Wall);
    } else if (global.at(g) == InfoCell::Unknown) {
      global.set(g, InfoCell::KnownFree);
    }
  }
}

}  // namespace quadnav::mapping
