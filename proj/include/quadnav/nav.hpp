#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quadnav/corridor.hpp"
#include "quadnav/mapping.hpp"
#include "quadnav/planner.hpp"
#include "quadnav/scenario.hpp"
#include "quadnav/trajopt.hpp"

namespace quadnav::sim {

struct NavLogRow {
  double t = 0.0;
  Vec3 p_true, v_true;
  geom::Euler e_true;
  Vec3 p_est, v_est;
  geom::Euler e_est;
  control::DesiredFlatState des;
  double thrust = 0.0;
  Vec3 moments = Vec3::Zero();
  Eigen::Vector4d rotor_cmd = Eigen::Vector4d::Zero();
  int replan = -1;  // id of a replan accepted on this row
  bool collision = false;
};

enum class ReplanStatus { Ok, Emergency, Skipped, Failed };

struct ReplanEvent {
  int id = 0;
  double t = 0.0;
  ReplanStatus status = ReplanStatus::Ok;
  std::string detail;  // error code name on failure
  double path_length = 0.0;
  int path_waypoints = 0;
  int local_waypoints = 0;
  int segments = 0;
  double duration = 0.0;
  double splice_residual = 0.0;  // max |d^q| mismatch, q = 0..3, at the splice
  double wall_ms = 0.0;          // not part of the deterministic log
};

struct NavLog {
  std::vector<NavLogRow> rows;
  std::vector<ReplanEvent> replans;
};

enum class RunStatus { GoalReached, Collision, Timeout };
const char* to_string(RunStatus s);
const char* to_string(ReplanStatus s);

struct Metrics {
  RunStatus status = RunStatus::Timeout;
  double sim_time = 0.0;
  double goal_error = 0.0;  // true position to goal at the end
  double max_speed = 0.0;   // true
  double max_desired_speed = 0.0;
  double min_clearance = 0.0;  // true position to the nearest box surface
  double max_estimation_error = 0.0;
  double final_estimation_error = 0.0;
  int replan_count = 0;
  int failed_replans = 0;
  int emergency_stops = 0;
  double mean_replan_ms = 0.0;
  double max_replan_ms = 0.0;
  double wall_seconds = 0.0;
};

struct RunResult {
  Scenario scenario;
  NavLog log;
  Metrics metrics;
  mapping::LocalVoxelMap local_map{Vec3::Ones(), 1.0, Vec3::Zero()};
  mapping::GlobalInfoMap global_map{Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones(), 1.0};
  planner::PathPolyline last_path;
  planner::PathPolyline last_modified_path;
  corridor::SafeCorridor last_corridor;
  std::optional<trajopt::SplineTrajectory> last_trajectory;
  double last_trajectory_start = 0.0;
};

/// Closed-loop run on a deterministic single-threaded schedule: plant and
/// attitude loop at the tick rate, estimation and position control at the
/// control rate, sensors and replanning at their own rates.
RunResult run_scenario(const Scenario& sc);

}  // namespace quadnav::sim
