#include "quadnav/trajopt.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "quadnav/error.hpp"
#include "quadnav/geom.hpp"

namespace quadnav::trajopt {

namespace {

// Speed bound along the 26 lattice directions, slightly inside v_max so the
// polytope's outer vertices rarely poke past the sphere.
constexpr double kDirectionalMargin = 0.97;

const std::array<Vec3, 26>& lattice_directions() {
  static const std::array<Vec3, 26> dirs = [] {
    std::array<Vec3, 26> out;
    int n = 0;
    for (int x = -1; x <= 1; ++x)
      for (int y = -1; y <= 1; ++y)
        for (int z = -1; z <= 1; ++z) {
          if (x == 0 && y == 0 && z == 0) continue;
          out[n++] = Vec3(x, y, z).normalized();
        }
    return out;
  }();
  return dirs;
}

// Time to reach arc position s along a trapezoidal profile.
struct SpeedProfile {
  double L, v0, a, vp, d1, d2, T;
  bool decel_only = false;
  double a_dec = 0.0;

  SpeedProfile(double length, double v_start, double v_max, double a_max)
      : L(length), v0(std::min(v_start, v_max)), a(a_max) {
    if (v0 > 0.0 && v0 * v0 / (2.0 * a) >= L) {
      decel_only = true;
      a_dec = v0 * v0 / (2.0 * L);
      vp = v0;
      d1 = d2 = 0.0;
      T = 2.0 * L / v0;
      return;
    }
    vp = v_max;
    if ((2.0 * vp * vp - v0 * v0) / (2.0 * a) > L) vp = std::sqrt((2.0 * a * L + v0 * v0) / 2.0);
    d1 = (vp * vp - v0 * v0) / (2.0 * a);
    const double d3 = vp * vp / (2.0 * a);
    d2 = std::max(0.0, L - d1 - d3);
    T = (vp - v0) / a + d2 / vp + vp / a;
  }

  double time_at(double s) const {
    s = std::clamp(s, 0.0, L);
    if (decel_only) return (v0 - std::sqrt(std::max(0.0, v0 * v0 - 2.0 * a_dec * s))) / a_dec;
    if (s <= d1) return (-v0 + std::sqrt(v0 * v0 + 2.0 * a * s)) / a;
    if (s <= d1 + d2) return (vp - v0) / a + (s - d1) / vp;
    return T - std::sqrt(2.0 * (L - s) / a);
  }
};

double pow_neg(double delta, int q) { return std::pow(delta, -q); }

// Fixes origin-relative geometry for the solve.
corridor::Polyhedron shifted(const corridor::Polyhedron& p, const Vec3& o) {
  corridor::Polyhedron out = p;
  for (corridor::HalfSpace& h : out.faces) h.b -= h.a.dot(o);
  return out;
}

Eigen::VectorXd solve_once(const std::vector<double>& durations, const BoundaryState& start,
                           const BoundaryState& goal,
                           const std::vector<const corridor::Polyhedron*>& polys,
                           const std::vector<SegmentLine>& lines, const DynLimits& limits,
                           const TrajectoryOptions& opt) {
  const QuadraticCost cost = assemble_cost(durations, lines, opt.eps, opt.samples);
  qp::Problem pr;
  pr.H = 2.0 * cost.Q;
  pr.g = cost.c;
  assemble_constraints(durations, start, goal, polys, limits, opt.samples, pr);
  return qp::solve(pr).x;
}

bool within_limits(const SplineTrajectory& tr, const DynLimits& limits) {
  for (int q = 1; q <= 3; ++q) {
    if (!(max_derivative_norm(tr, q) <= limits.limit(q) * (1.0 + 1e-9))) return false;
  }
  return true;
}

}  // namespace

double SplineTrajectory::total_time() const {
  double t = 0.0;
  for (double d : durations) t += d;
  return t;
}

std::vector<double> SplineTrajectory::knots() const {
  std::vector<double> k(durations.size() + 1, 0.0);
  for (std::size_t j = 0; j < durations.size(); ++j) k[j + 1] = k[j] + durations[j];
  return k;
}

std::vector<double> allocate_times(const planner::PathPolyline& path, const DynLimits& limits,
                                   double v0) {
  const auto& w = path.waypoints;
  if (w.size() < 2) throw Error(ErrorCode::ZeroLengthSegment, "path has no segments");
  std::vector<double> arc(w.size(), 0.0);
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    const double l = (w[j + 1] - w[j]).norm();
    if (l < 1e-9) throw Error(ErrorCode::ZeroLengthSegment, "zero-length path segment");
    arc[j + 1] = arc[j] + l;
  }
  const SpeedProfile profile(arc.back(), std::max(0.0, v0), limits.v_max, limits.a_max);
  std::vector<double> out(w.size() - 1);
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    out[j] = profile.time_at(arc[j + 1]) - profile.time_at(arc[j]);
    out[j] = std::max(out[j], 1e-3);
  }
  return out;
}

Eigen::MatrixXd snap_cost_matrix(const std::vector<double>& durations) {
  const int m = static_cast<int>(durations.size());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m * kSegmentVars, m * kSegmentVars);
  for (int j = 0; j < m; ++j) {
    const double w = pow_neg(durations[j], 7);
    for (int k = 0; k < kDims; ++k)
      for (int i = 0; i < 4; ++i) {
        const int idx = var_index(j, k, i + 4);
        Q(idx, idx) = w / (2.0 * i + 1.0);
      }
  }
  return Q;
}

QuadraticCost assemble_cost(const std::vector<double>& durations,
                            const std::vector<SegmentLine>& lines, double eps, int samples) {
  QuadraticCost cost;
  cost.Q = snap_cost_matrix(durations);
  cost.c = Eigen::VectorXd::Zero(cost.Q.rows());
  if (eps <= 0.0) return cost;
  const int m = static_cast<int>(durations.size());
  for (int j = 0; j < m && j < static_cast<int>(lines.size()); ++j) {
    const Vec3 dir = lines[j].second - lines[j].first;
    if (dir.norm() < 1e-12) continue;
    const Vec3 l = dir.normalized();
    const Mat3 P = Mat3::Identity() - l * l.transpose();
    const Vec3 Pa = P * lines[j].first;
    for (int g = 0; g < samples; ++g) {
      const double s = static_cast<double>(g) / (samples - 1);
      const BasisRow r = basis().row(0, s);
      const Eigen::Matrix<double, kBasisSize, kBasisSize> rr = r * r.transpose();
      for (int k1 = 0; k1 < kDims; ++k1) {
        cost.c.segment<kBasisSize>(var_index(j, k1, 0)) += -2.0 * eps * Pa(k1) * r;
        for (int k2 = 0; k2 < kDims; ++k2) {
          cost.Q.block<kBasisSize, kBasisSize>(var_index(j, k1, 0), var_index(j, k2, 0)) +=
              eps * P(k1, k2) * rr;
        }
      }
    }
  }
  return cost;
}

void assemble_constraints(const std::vector<double>& durations, const BoundaryState& start,
                          const BoundaryState& goal,
                          const std::vector<const corridor::Polyhedron*>& polys,
                          const DynLimits& limits, int samples, qp::Problem& out) {
  const int m = static_cast<int>(durations.size());
  const int n = m * kSegmentVars;
  const BasisSet& b = basis();

  const int n_eq = 2 * 4 * kDims + 4 * (m - 1) * kDims;
  out.A_eq = Eigen::MatrixXd::Zero(n_eq, n);
  out.b_eq = Eigen::VectorXd::Zero(n_eq);
  int row = 0;
  for (int q = 0; q < 4; ++q) {
    const BasisRow r0 = b.row(q, 0.0) * pow_neg(durations.front(), q);
    const BasisRow r1 = b.row(q, 1.0) * pow_neg(durations.back(), q);
    for (int k = 0; k < kDims; ++k) {
      out.A_eq.row(row).segment<kBasisSize>(var_index(0, k, 0)) = r0.transpose();
      out.b_eq(row++) = start.derivative(q)(k);
      out.A_eq.row(row).segment<kBasisSize>(var_index(m - 1, k, 0)) = r1.transpose();
      out.b_eq(row++) = goal.derivative(q)(k);
    }
  }
  for (int j = 0; j + 1 < m; ++j) {
    for (int q = 0; q < 4; ++q) {
      const BasisRow end = b.row(q, 1.0) * pow_neg(durations[j], q);
      const BasisRow begin = b.row(q, 0.0) * pow_neg(durations[j + 1], q);
      for (int k = 0; k < kDims; ++k) {
        out.A_eq.row(row).segment<kBasisSize>(var_index(j, k, 0)) = end.transpose();
        out.A_eq.row(row).segment<kBasisSize>(var_index(j + 1, k, 0)) = -begin.transpose();
        ++row;
      }
    }
  }

  int n_in = 0;
  for (int j = 0; j < m; ++j) {
    const int faces = polys.size() > static_cast<std::size_t>(j) && polys[j]
                          ? static_cast<int>(polys[j]->faces.size())
                          : 0;
    n_in += samples * (faces + 26 + 2 * 2 * kDims);
  }
  out.A_in = Eigen::MatrixXd::Zero(n_in, n);
  out.b_in = Eigen::VectorXd::Zero(n_in);
  row = 0;
  const auto& dirs = lattice_directions();
  for (int j = 0; j < m; ++j) {
    const double dt = durations[j];
    for (int g = 0; g < samples; ++g) {
      const double s = static_cast<double>(g) / (samples - 1);
      const BasisRow r0 = b.row(0, s);
      // An interior knot sample repeats the previous segment's end sample
      // (continuity), so only the rows that differ are kept.
      const bool knot = j > 0 && g == 0;
      const bool same_poly = knot && polys.size() > static_cast<std::size_t>(j) &&
                             polys[j] == polys[j - 1];
      if (!same_poly && polys.size() > static_cast<std::size_t>(j) && polys[j]) {
        for (const corridor::HalfSpace& h : polys[j]->faces) {
          for (int k = 0; k < kDims; ++k) {
            out.A_in.row(row).segment<kBasisSize>(var_index(j, k, 0)) = h.a(k) * r0.transpose();
          }
          out.b_in(row++) = h.b;
        }
      }
      // Derivatives at the two clamped ends are fixed by the boundary rows.
      const bool clamped = (j == 0 && g == 0) || (j == m - 1 && g == samples - 1);
      if (clamped || knot) continue;
      const BasisRow r1 = b.row(1, s) / dt;
      for (const Vec3& d : dirs) {
        for (int k = 0; k < kDims; ++k) {
          out.A_in.row(row).segment<kBasisSize>(var_index(j, k, 0)) = d(k) * r1.transpose();
        }
        out.b_in(row++) = kDirectionalMargin * limits.v_max;
      }
      for (int q = 2; q <= 3; ++q) {
        const BasisRow rq = b.row(q, s) * pow_neg(dt, q);
        const double bound = limits.limit(q) / std::sqrt(3.0);
        for (int k = 0; k < kDims; ++k) {
          out.A_in.row(row).segment<kBasisSize>(var_index(j, k, 0)) = rq.transpose();
          out.b_in(row++) = bound;
          out.A_in.row(row).segment<kBasisSize>(var_index(j, k, 0)) = -rq.transpose();
          out.b_in(row++) = bound;
        }
      }
    }
  }
  out.A_in.conservativeResize(row, n);
  out.b_in.conservativeResize(row);
}

SplineTrajectory unpack(const Eigen::VectorXd& x, const std::vector<double>& durations,
                        const Vec3& origin) {
  SplineTrajectory tr;
  tr.durations = durations;
  tr.origin = origin;
  const int m = static_cast<int>(durations.size());
  tr.coeffs.resize(m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < kDims; ++k) tr.coeffs[j].col(k) = x.segment<kBasisSize>(var_index(j, k, 0));
  return tr;
}

SplineTrajectory generate_trajectory(const planner::PathPolyline& path,
                                     const corridor::SafeCorridor& corridor,
                                     const DynLimits& limits, const BoundaryState& start,
                                     const TrajectoryOptions& opt) {
  const auto& w = path.waypoints;
  if (w.size() < 2) throw Error(ErrorCode::ZeroLengthSegment, "path has no segments");
  if (corridor.polyhedra.size() != w.size() - 1) {
    throw Error(ErrorCode::TrajectoryInfeasible, "corridor does not match path");
  }
  const Vec3 origin = start.p;

  std::vector<corridor::Polyhedron> local_polys;
  local_polys.reserve(corridor.polyhedra.size());
  for (const auto& p : corridor.polyhedra) local_polys.push_back(shifted(p, origin));

  planner::PathPolyline sub;
  std::vector<const corridor::Polyhedron*> polys;
  std::vector<SegmentLine> lines;
  sub.waypoints.push_back(w.front() - origin);
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    const Vec3 a = w[j] - origin, b = w[j + 1] - origin;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / opt.max_subsegment)));
    for (int p = 1; p <= pieces; ++p) {
      sub.waypoints.push_back(a + (b - a) * (static_cast<double>(p) / pieces));
      polys.push_back(&local_polys[j]);
      lines.emplace_back(a, b);
    }
  }

  DynLimits alloc = limits;
  alloc.v_max *= opt.alloc_speed_ratio;
  alloc.a_max *= opt.alloc_accel_ratio;
  std::vector<double> durations = allocate_times(sub, alloc, start.v.norm());

  BoundaryState s0 = start;
  s0.p = Vec3::Zero();
  const BoundaryState goal = BoundaryState::rest(w.back() - origin);

  bool stretched = false;
  int rescales = 0;
  while (true) {
    Eigen::VectorXd x;
    try {
      x = solve_once(durations, s0, goal, polys, lines, limits, opt);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Infeasible && e.code() != ErrorCode::MaxIterations) throw;
      if (stretched) throw Error(ErrorCode::TrajectoryInfeasible, e.what());
      stretched = true;
      for (double& d : durations) d *= 1.5;
      continue;
    }
    SplineTrajectory tr = unpack(x, durations, origin);
    if (within_limits(tr, limits)) return tr;
    if (++rescales > opt.limit_retries) {
      throw Error(ErrorCode::TrajectoryInfeasible, "dynamic limits exceeded between samples");
    }
    for (double& d : durations) d *= 1.12;
  }
}

SplineTrajectory generate_trajectory(const planner::PathPolyline& path,
                                     const corridor::SafeCorridor& corridor,
                                     const DynLimits& limits, double eps) {
  TrajectoryOptions opt;
  opt.eps = eps;
  return generate_trajectory(path, corridor, limits, BoundaryState::rest(path.waypoints.front()),
                             opt);
}

Vec3 eval_trajectory(const SplineTrajectory& tr, double t, int q) {
  const double T = tr.total_time();
  if (tr.durations.empty() || q < 0 || q > kPolyOrder) {
    throw Error(ErrorCode::OutOfDomain, "invalid trajectory query");
  }
  const double tol = 1e-9 * std::max(1.0, T);
  if (t < -tol || t > T + tol) throw Error(ErrorCode::OutOfDomain, "time outside trajectory");
  t = std::clamp(t, 0.0, T);

  std::size_t j = 0;
  double t0 = 0.0;
  while (j + 1 < tr.durations.size() && t >= t0 + tr.durations[j]) {
    t0 += tr.durations[j];
    ++j;
  }
  const double dt = tr.durations[j];
  const double s = std::clamp((t - t0) / dt, 0.0, 1.0);
  const BasisRow r = basis().row(q, s) * pow_neg(dt, q);
  Vec3 out = tr.coeffs[j].transpose() * r;
  if (q == 0) out += tr.origin;
  return out;
}

double max_derivative_norm(const SplineTrajectory& tr, int q, int samples_per_segment) {
  double best = 0.0;
  for (std::size_t j = 0; j < tr.durations.size(); ++j) {
    const double scale = pow_neg(tr.durations[j], q);
    for (int g = 0; g < samples_per_segment; ++g) {
      const double s = static_cast<double>(g) / (samples_per_segment - 1);
      const double n = (tr.coeffs[j].transpose() * basis().row(q, s) * scale).norm();
      if (std::isnan(n)) return n;
      best = std::max(best, n);
    }
  }
  return best;
}

SplineTrajectory emergency_stop(const BoundaryState& state, const DynLimits& limits) {
  const BasisSet& b = basis();
  const double a_cap = std::max(limits.a_max, state.a.norm());
  const double j_cap = std::max(limits.j_max, state.j.norm());
  double T = std::max(0.2, state.v.norm() / limits.a_max);
  SplineTrajectory tr;
  for (int attempt = 0; attempt < 40; ++attempt, T *= 1.15) {
    const std::vector<double> durations{T};
    qp::Problem pr;
    pr.H = 2.0 * snap_cost_matrix(durations);
    pr.g = Eigen::VectorXd::Zero(kSegmentVars);
    pr.A_eq = Eigen::MatrixXd::Zero(21, kSegmentVars);
    pr.b_eq = Eigen::VectorXd::Zero(21);
    int row = 0;
    for (int q = 0; q < 4; ++q) {
      for (int k = 0; k < kDims; ++k) {
        pr.A_eq.row(row).segment<kBasisSize>(var_index(0, k, 0)) =
            b.row(q, 0.0).transpose() * pow_neg(T, q);
        pr.b_eq(row++) = q == 0 ? 0.0 : state.derivative(q)(k);
        if (q == 0) continue;
        pr.A_eq.row(row).segment<kBasisSize>(var_index(0, k, 0)) =
            b.row(q, 1.0).transpose() * pow_neg(T, q);
        pr.b_eq(row++) = 0.0;
      }
    }
    tr = unpack(qp::solve(pr).x, durations, state.p);
    if (max_derivative_norm(tr, 2) <= a_cap * (1.0 + 1e-9) &&
        max_derivative_norm(tr, 3) <= j_cap * (1.0 + 1e-9)) {
      return tr;
    }
  }
  return tr;
}

double yaw_toward_velocity(double yaw, const Vec3& v, double dt, double max_rate,
                           double min_speed) {
  const double speed = v.head<2>().norm();
  if (speed < min_speed) return yaw;
  const double target = std::atan2(v.y(), v.x());
  const double step = std::clamp(geom::wrap_angle(target - yaw), -max_rate * dt, max_rate * dt);
  return geom::wrap_angle(yaw + step);
}

}  // namespace quadnav::trajopt
