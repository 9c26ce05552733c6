#include "quadnav/corridor.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace quadnav::corridor {

namespace {

// Orthonormal frame whose first column is `u`.
Mat3 frame_from_direction(const Vec3& u) {
  const Vec3 helper = std::abs(u.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 v = helper.cross(u).normalized();
  const Vec3 w = u.cross(v);
  Mat3 r;
  r << u, v, w;
  return r;
}

using Point2 = Eigen::Vector2d;

std::vector<Point2> clip(const std::vector<Point2>& poly, const Point2& a, double b) {
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    const double fp = a.dot(p) - b;
    const double fq = a.dot(q) - b;
    if (fp <= 0) out.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
      const double t = fp / (fp - fq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

}  // namespace

double Ellipsoid::metric(const Vec3& x) const { return E.partialPivLu().solve(x - d).norm(); }

Vec3 Ellipsoid::aabb_half_extent() const {
  return Vec3(E.row(0).norm(), E.row(1).norm(), E.row(2).norm());
}

double Polyhedron::max_violation(const Vec3& x) const {
  double v = -std::numeric_limits<double>::infinity();
  for (const HalfSpace& h : faces) v = std::max(v, h.violation(x));
  return v;
}

bool Polyhedron::excludes(const Vec3& x) const {
  return std::any_of(faces.begin(), faces.end(),
                     [&](const HalfSpace& h) { return h.violation(x) >= 0.0; });
}

Ellipsoid grow_ellipsoid(const Vec3& pa, const Vec3& pb, std::span<const Vec3> obstacles,
                         double bound) {
  const Vec3 axis = pb - pa;
  const double len = axis.norm();
  if (len < 1e-9) throw Error(ErrorCode::DegenerateSegment, "segment endpoints coincide");
  const double a = 0.5 * len;
  const Vec3 d = 0.5 * (pa + pb);
  const Mat3 frame = frame_from_direction(axis / len);

  double r = bound;
  for (const Vec3& x : obstacles) {
    const Vec3 local = frame.transpose() * (x - d);
    const double u = local.x() / a;
    if (std::abs(u) >= 1.0) continue;  // beyond the segment ends: never inside
    const double w = local.tail<2>().norm();
    if (w < 1e-12) throw Error(ErrorCode::ObstacleOnSegment, "obstacle point lies on the segment");
    r = std::min(r, w / std::sqrt(1.0 - u * u));
  }
  Ellipsoid e;
  e.E = frame * Vec3(a, r, r).asDiagonal();
  e.d = d;
  return e;
}

HalfSpace tangent_halfspace(const Ellipsoid& e, const Vec3& x_r) {
  const Mat3 e_inv = e.E.inverse();
  HalfSpace h;
  h.a = 2.0 * e_inv.transpose() * e_inv * (x_r - e.d);
  h.b = h.a.dot(x_r);
  return h;
}

Polyhedron inflate_to_polyhedron(const Ellipsoid& e, std::span<const Vec3> obstacles,
                                 double bound) {
  const Mat3 e_inv = e.E.inverse();
  std::vector<Vec3> remaining(obstacles.begin(), obstacles.end());
  std::vector<double> dist(remaining.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    dist[i] = (e_inv * (remaining[i] - e.d)).norm();
  }

  Polyhedron poly;
  while (!remaining.empty()) {
    const auto it = std::min_element(dist.begin(), dist.end());
    const auto k = static_cast<std::size_t>(it - dist.begin());
    const HalfSpace h = tangent_halfspace(e, remaining[k]);
    poly.faces.push_back(h);

    std::size_t keep = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (i == k || h.violation(remaining[i]) >= 0.0) continue;
      remaining[keep] = remaining[i];
      dist[keep] = dist[i];
      ++keep;
    }
    remaining.resize(keep);
    dist.resize(keep);
  }

  const Vec3 half = e.aabb_half_extent() + Vec3::Constant(bound);
  for (int k = 0; k < 3; ++k) {
    HalfSpace up;
    up.a = Vec3::Unit(k);
    up.b = e.d(k) + half(k);
    HalfSpace down;
    down.a = -Vec3::Unit(k);
    down.b = -(e.d(k) - half(k));
    poly.faces.push_back(up);
    poly.faces.push_back(down);
  }
  return poly;
}

SafeCorridor build_corridor(const planner::PathPolyline& path, const mapping::DilatedMap& view,
                            double bound) {
  SafeCorridor out;
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    const Vec3& pa = path.waypoints[i];
    const Vec3& pb = path.waypoints[i + 1];
    const Vec3 lo = pa.cwiseMin(pb) - Vec3::Constant(2.0 * bound);
    const Vec3 hi = pa.cwiseMax(pb) + Vec3::Constant(2.0 * bound);
    const std::vector<Vec3> obstacles = view.blocked_centers(lo, hi);
    Polyhedron poly;
    try {
      const Ellipsoid e = grow_ellipsoid(pa, pb, obstacles, bound);
      poly = inflate_to_polyhedron(e, obstacles, bound);
    } catch (const Error& err) {
      throw Error(ErrorCode::EmptyCorridor, err.what());
    }
    // Keep the corridor inside the mapped volume, shrunk by the robot radius
    // unless that would cut the segment itself.
    const Vec3 map_lo = view.map().origin();
    const Vec3 map_hi = map_lo + view.map().resolution() * view.map().size().cast<double>();
    const Vec3 shrink = Vec3::Constant(view.radius());
    const Vec3 box_lo = (map_lo + shrink).cwiseMin(pa.cwiseMin(pb));
    const Vec3 box_hi = (map_hi - shrink).cwiseMax(pa.cwiseMax(pb));
    for (int k = 0; k < 3; ++k) {
      poly.faces.push_back(HalfSpace{Vec3::Unit(k), box_hi(k)});
      poly.faces.push_back(HalfSpace{-Vec3::Unit(k), -box_lo(k)});
    }
    if (!poly.contains(pa) || !poly.contains(pb)) {
      throw Error(ErrorCode::EmptyCorridor, "polyhedron does not contain its segment");
    }
    out.polyhedra.push_back(std::move(poly));
  }
  return out;
}

std::vector<Vec3> section_polygon(const Polyhedron& c_a, const Polyhedron& c_b, const Vec3& p,
                                  const Vec3& n) {
  const Mat3 frame = frame_from_direction(n.normalized());
  const Vec3 e1 = frame.col(1), e2 = frame.col(2);
  constexpr double kHalf = 1e3;
  std::vector<Point2> poly{Point2(-kHalf, -kHalf), Point2(kHalf, -kHalf), Point2(kHalf, kHalf),
                           Point2(-kHalf, kHalf)};
  for (const Polyhedron* c : {&c_a, &c_b}) {
    for (const HalfSpace& h : c->faces) {
      const Point2 a(h.a.dot(e1), h.a.dot(e2));
      const double b = h.b - h.a.dot(p);
      if (a.norm() < 1e-12 * h.a.norm()) {
        if (b < 0) return {};
        continue;
      }
      poly = clip(poly, a, b);
      if (poly.empty()) return {};
    }
  }
  std::vector<Vec3> out;
  out.reserve(poly.size());
  for (const Point2& q : poly) out.push_back(p + q.x() * e1 + q.y() * e2);
  return out;
}

planner::PathPolyline modify_path(const planner::PathPolyline& path, const SafeCorridor& corridor) {
  planner::PathPolyline out = path;
  for (std::size_t i = 1; i + 1 < path.waypoints.size(); ++i) {
    const Vec3& p = path.waypoints[i];
    const Vec3 u1 = (p - path.waypoints[i - 1]).normalized();
    const Vec3 u2 = (path.waypoints[i + 1] - p).normalized();
    const Vec3 n = u1 + u2;
    if (n.norm() < 1e-6) continue;
    const std::vector<Vec3> poly3 =
        section_polygon(corridor.polyhedra[i - 1], corridor.polyhedra[i], p, n);
    if (poly3.size() < 3) continue;

    // Area-weighted centroid in plane coordinates.
    const Mat3 frame = frame_from_direction(n.normalized());
    const Vec3 e1 = frame.col(1), e2 = frame.col(2);
    double area = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t k = 0; k < poly3.size(); ++k) {
      const Vec3 qa = poly3[k] - p, qb = poly3[(k + 1) % poly3.size()] - p;
      const double xa = qa.dot(e1), ya = qa.dot(e2), xb = qb.dot(e1), yb = qb.dot(e2);
      const double cross = xa * yb - xb * ya;
      area += cross;
      cx += (xa + xb) * cross;
      cy += (ya + yb) * cross;
    }
    area *= 0.5;
    if (std::abs(area) < 1e-10) continue;
    cx /= 6.0 * area;
    cy /= 6.0 * area;
    out.waypoints[i] = p + cx * e1 + cy * e2;
  }
  return out;
}

}  // namespace quadnav::corridor
