#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "quadnav/geom.hpp"

namespace quadnav::mapping {

using Index3 = Eigen::Vector3i;
using Index2 = Eigen::Vector2i;

enum class Cell : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

struct LidarRay {
  double azimuth = 0.0;  // in the scan plane, radians from sensor +x
  double range = 0.0;
  bool valid = false;
};

struct LidarScan {
  std::vector<LidarRay> rays;
  double gimbal_pitch = 0.0;
  Mat3 rotation = Mat3::Identity();  // world-from-sensor, gimbal included
  Vec3 origin = Vec3::Zero();

  Vec3 ray_direction(const LidarRay& r) const;
};

/// Robot-centred, world-axis-aligned voxel grid with ternary occupancy.
class LocalVoxelMap {
 public:
  LocalVoxelMap(const Vec3& dims, double resolution, const Vec3& center);

  static Vec3 snap(const Vec3& p, double resolution);

  const Index3& size() const { return size_; }
  double resolution() const { return res_; }
  const Vec3& center() const { return center_; }
  Vec3 origin() const { return center_ - 0.5 * res_ * size_.cast<double>(); }
  Vec3 dims() const { return res_ * size_.cast<double>(); }
  std::size_t cell_count() const { return cells_.size(); }

  bool in_bounds(const Index3& idx) const;
  /// Cell index containing p, unchecked against bounds.
  Index3 index_of(const Vec3& p) const;
  std::optional<Index3> find(const Vec3& p) const;
  Vec3 cell_center(const Index3& idx) const;
  std::size_t linear(const Index3& idx) const {
    return (static_cast<std::size_t>(idx.z()) * size_.y() + idx.y()) * size_.x() + idx.x();
  }
  Index3 unlinear(std::size_t i) const;

  Cell at(const Index3& idx) const { return cells_[linear(idx)]; }
  void set(const Index3& idx, Cell c) { cells_[linear(idx)] = c; }
  const std::vector<Cell>& cells() const { return cells_; }

  bool operator==(const LocalVoxelMap& o) const = default;

 private:
  Index3 size_;
  double res_;
  Vec3 center_;
  std::vector<Cell> cells_;
};

/// Cells a ray from `from` to `to` touches, endpoint last. One cell per step
/// along the dominant axis (3D DDA), so at most ceil(range/res)+1 cells.
std::vector<Index3> raycast_cells(const LocalVoxelMap& map, const Vec3& from, const Vec3& to);

/// Traversed voxels become Free and endpoints Occupied. Occupied wins inside a
/// scan and is never downgraded by later scans.
void integrate_scan(LocalVoxelMap& map, const LidarScan& scan);

/// Moves the grid to the snapped `new_center`; overlap is preserved and newly
/// exposed cells are Unknown.
void recenter(LocalVoxelMap& map, const Vec3& new_center);

/// Planning view: occupancy plus the set of cells within `radius` of an
/// Occupied cell centre.
class DilatedMap {
 public:
  DilatedMap(LocalVoxelMap map, double radius);

  const LocalVoxelMap& map() const { return map_; }
  double radius() const { return radius_; }
  bool blocked(const Index3& idx) const { return blocked_[map_.linear(idx)] != 0; }
  /// Observed free and not blocked.
  bool traversable(const Index3& idx) const {
    return map_.in_bounds(idx) && !blocked(idx) && map_.at(idx) == Cell::Free;
  }
  std::size_t blocked_count() const;
  /// Centres of blocked cells inside the axis-aligned box [lo, hi].
  std::vector<Vec3> blocked_centers(const Vec3& lo, const Vec3& hi) const;
  std::vector<Vec3> occupied_centers(const Vec3& lo, const Vec3& hi) const;

 private:
  LocalVoxelMap map_;
  double radius_;
  std::vector<std::uint8_t> blocked_;
};

DilatedMap dilate(const LocalVoxelMap& map, double radius);

enum class InfoCell : std::uint8_t { Unknown = 0, KnownFree = 1, Wall = 2 };

/// Coarse 2D world-frame map of explored space and walls.
class GlobalInfoMap {
 public:
  GlobalInfoMap(const Eigen::Vector2d& origin, const Eigen::Vector2d& dims, double resolution);

  const Index2& size() const { return size_; }
  double resolution() const { return res_; }
  const Eigen::Vector2d& origin() const { return origin_; }
  bool in_bounds(const Index2& idx) const;
  Index2 index_of(const Eigen::Vector2d& p) const;
  Eigen::Vector2d cell_center(const Index2& idx) const;
  std::size_t linear(const Index2& idx) const {
    return static_cast<std::size_t>(idx.y()) * size_.x() + idx.x();
  }
  Index2 unlinear(std::size_t i) const;

  InfoCell at(const Index2& idx) const { return cells_[linear(idx)]; }
  void set(const Index2& idx, InfoCell c) { cells_[linear(idx)] = c; }
  bool known(const Index2& idx) const { return at(idx) != InfoCell::Unknown; }
  std::size_t known_count() const;
  const std::vector<InfoCell>& cells() const { return cells_; }

  bool operator==(const GlobalInfoMap& o) const = default;

 private:
  Eigen::Vector2d origin_;
  Index2 size_;
  double res_;
  std::vector<InfoCell> cells_;
};

/// Folds the local map into the global one. A local column is a wall when
/// its occupied voxels span at least `wall_height` vertically.
void update_global(GlobalInfoMap& global, const LocalVoxelMap& local, double wall_height = 2.5);

}  // namespace quadnav::mapping
