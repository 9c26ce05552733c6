#pragma once

#include <span>
#include <vector>

#include "quadnav/mapping.hpp"
#include "quadnav/planner.hpp"

namespace quadnav::corridor {

/// {E x + d : |x| <= 1}.
struct Ellipsoid {
  Mat3 E = Mat3::Identity();
  Vec3 d = Vec3::Zero();

  /// |E^-1 (x - d)|; <= 1 inside.
  double metric(const Vec3& x) const;
  Vec3 aabb_half_extent() const;
};

/// {x : a^T x <= b}.
struct HalfSpace {
  Vec3 a = Vec3::UnitX();
  double b = 0.0;

  double violation(const Vec3& x) const { return a.dot(x) - b; }
};

struct Polyhedron {
  std::vector<HalfSpace> faces;

  double max_violation(const Vec3& x) const;
  bool contains(const Vec3& x, double tol = 1e-9) const { return max_violation(x) <= tol; }
  bool excludes(const Vec3& x) const;  // some face has a^T x >= b
};

struct SafeCorridor {
  std::vector<Polyhedron> polyhedra;
};

/// Spheroid around the segment: semi-major axis half the segment length, the
/// two minor semi-axes grown together until an obstacle point touches the
/// surface or `bound` is reached.
Ellipsoid grow_ellipsoid(const Vec3& pa, const Vec3& pb, std::span<const Vec3> obstacles,
                         double bound);

/// Tangent half-space at the obstacle point x_r: A = 2 E^-T E^-1 (x_r - d),
/// b = A^T x_r.
HalfSpace tangent_halfspace(const Ellipsoid& e, const Vec3& x_r);

/// Repeatedly cuts at the closest remaining obstacle (in the ellipsoid metric)
/// and drops every point the cut excludes; closed by world-axis-aligned faces
/// `bound` beyond the ellipsoid's bounding box.
Polyhedron inflate_to_polyhedron(const Ellipsoid& e, std::span<const Vec3> obstacles, double bound);

/// One polyhedron per path segment from the blocked voxel centres of `view`
/// within `bound` of the segment's bounding box. Throws EmptyCorridor.
SafeCorridor build_corridor(const planner::PathPolyline& path, const mapping::DilatedMap& view,
                            double bound = 3.0);

/// Convex polygon (in 3D) cut from C_a ∩ C_b by the plane through `p` with
/// normal `n`. Empty if the intersection is empty.
std::vector<Vec3> section_polygon(const Polyhedron& c_a, const Polyhedron& c_b, const Vec3& p,
                                  const Vec3& n);

/// Moves each interior waypoint to the centroid of its bisector-plane
/// section of the two adjacent polyhedra.
planner::PathPolyline modify_path(const planner::PathPolyline& path, const SafeCorridor& corridor);

}  // namespace quadnav::corridor
