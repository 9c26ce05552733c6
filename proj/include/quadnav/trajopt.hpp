#pragma once

#include <Eigen/Core>

#include <vector>

#include "quadnav/basis.hpp"
#include "quadnav/corridor.hpp"
#include "quadnav/planner.hpp"
#include "quadnav/qp.hpp"

namespace quadnav::trajopt {

inline constexpr int kDims = 3;
inline constexpr int kSegmentVars = kDims * kBasisSize;

/// Index of coefficient i, axis k, segment j in the stacked variable vector.
inline int var_index(int j, int k, int i) { return (j * kDims + k) * kBasisSize + i; }

struct DynLimits {
  double v_max = 2.0;
  double a_max = 2.0;
  double j_max = 10.0;

  double limit(int q) const { return q == 1 ? v_max : (q == 2 ? a_max : j_max); }
};

/// Position and its first three time derivatives.
struct BoundaryState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Vec3 j = Vec3::Zero();

  static BoundaryState rest(const Vec3& p) {
    BoundaryState s;
    s.p = p;
    return s;
  }
  const Vec3& derivative(int q) const { return q == 0 ? p : (q == 1 ? v : (q == 2 ? a : j)); }
};

struct SplineTrajectory {
  std::vector<double> durations;
  std::vector<Eigen::Matrix<double, kBasisSize, kDims>> coeffs;  // relative to origin
  Vec3 origin = Vec3::Zero();

  std::size_t segment_count() const { return durations.size(); }
  double total_time() const;
  /// Segment start times, size m + 1.
  std::vector<double> knots() const;
};

/// Trapezoidal speed profile over the whole path (accelerating from speed v0,
/// ending at rest), apportioned to segments by arc length.
std::vector<double> allocate_times(const planner::PathPolyline& path, const DynLimits& limits,
                                   double v0 = 0.0);

/// x^T Q x + c^T x: snap cost plus eps times the squared distance of g uniform
/// samples per segment to that segment's line.
struct QuadraticCost {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
};

/// Segment lines as (point, point) pairs.
using SegmentLine = std::pair<Vec3, Vec3>;

QuadraticCost assemble_cost(const std::vector<double>& durations,
                            const std::vector<SegmentLine>& lines, double eps, int samples = 10);

/// Snap-only block (eps = 0, no lines needed).
Eigen::MatrixXd snap_cost_matrix(const std::vector<double>& durations);

/// Equality rows: boundary states at both ends and continuity of derivatives
/// 0..3 at interior knots. Inequality rows: corridor faces at g samples per
/// segment, speed along 26 directions, and per-axis acceleration and jerk
/// boxes at limit / sqrt(3).
void assemble_constraints(const std::vector<double>& durations, const BoundaryState& start,
                          const BoundaryState& goal,
                          const std::vector<const corridor::Polyhedron*>& polys,
                          const DynLimits& limits, int samples, qp::Problem& out);

SplineTrajectory unpack(const Eigen::VectorXd& x, const std::vector<double>& durations,
                        const Vec3& origin);

struct TrajectoryOptions {
  double eps = 20.0;
  int samples = 10;
  double max_subsegment = 3.0;       // long segments are split for cruising
  double alloc_speed_ratio = 0.95;   // of v_max, for time allocation
  double alloc_accel_ratio = 0.3;    // of a_max, for time allocation
  int limit_retries = 4;             // dense-check rescaling passes
};

/// Spline through the corridor from `start` to rest at the last waypoint.
/// On an infeasible QP, retries once with all durations scaled by 1.5; then
/// throws Error(TrajectoryInfeasible).
SplineTrajectory generate_trajectory(const planner::PathPolyline& path,
                                     const corridor::SafeCorridor& corridor,
                                     const DynLimits& limits, const BoundaryState& start,
                                     const TrajectoryOptions& options = {});

/// Rest-to-rest convenience overload (start at the first waypoint).
SplineTrajectory generate_trajectory(const planner::PathPolyline& path,
                                     const corridor::SafeCorridor& corridor,
                                     const DynLimits& limits, double eps);

/// q-th time derivative at t in [0, T]. Throws OutOfDomain.
Vec3 eval_trajectory(const SplineTrajectory& tr, double t, int q);

/// Largest |d^q/dt^q| over n uniform samples per segment.
double max_derivative_norm(const SplineTrajectory& tr, int q, int samples_per_segment = 50);

/// Single-segment stop from `state` to rest with free end position, as short
/// as the dense limit check allows.
SplineTrajectory emergency_stop(const BoundaryState& state, const DynLimits& limits);

/// Yaw that turns toward the horizontal velocity at no more than max_rate.
double yaw_toward_velocity(double yaw, const Vec3& v, double dt, double max_rate,
                           double min_speed = 0.3);

}  // namespace quadnav::trajopt
