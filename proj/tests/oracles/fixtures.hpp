#pragma once

#include <random>
#include <vector>

#include "quadnav/trajopt.hpp"

// Randomized problem instances shared by the unit and acceptance tests.
namespace quadnav::fixture {

struct CorridorInstance {
  planner::PathPolyline path;
  corridor::SafeCorridor corridor;
  std::vector<double> durations;
  trajopt::BoundaryState start;
  trajopt::BoundaryState goal;
  trajopt::DynLimits limits;
};

/// Random-walk path of m segments, each wrapped in a padded box cut by a few
/// tilted faces that keep the segment inside.
CorridorInstance random_corridor(std::mt19937_64& rng, int m);

/// Trajectory QP for the instance with the given centering weight.
qp::Problem corridor_qp(const CorridorInstance& inst, double eps, int samples = 10);

/// q-th derivative of segment j at normalized time s.
Vec3 segment_derivative(const trajopt::SplineTrajectory& tr, std::size_t j, int q, double s);

}  // namespace quadnav::fixture
