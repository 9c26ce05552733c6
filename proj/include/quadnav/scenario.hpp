#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "quadnav/controller.hpp"
#include "quadnav/dynamics.hpp"
#include "quadnav/planner.hpp"
#include "quadnav/sensors.hpp"
#include "quadnav/trajopt.hpp"

namespace quadnav::sim {

struct Rates {
  int tick_hz = 400;
  int control_hz = 200;
  int odom_hz = 40;
  int height_hz = 20;
  int lidar_hz = 40;
  int replan_hz = 4;
};

struct Scenario {
  std::string name = "unnamed";
  std::uint64_t seed = 1;

  World world;
  Vec3 start = Vec3(0.0, 0.0, 1.5);
  double start_yaw = 0.0;
  // Goal either as a point or as bearing (from start, world frame) + range.
  std::optional<Vec3> goal_point;
  double goal_bearing = 0.0;
  double goal_range = 10.0;

  trajopt::DynLimits limits;
  trajopt::TrajectoryOptions traj;
  double yaw_rate_max = 1.5;

  Vec3 local_dims = Vec3(15.0, 10.0, 3.0);
  double resolution = 0.25;
  double dilation = 0.63;
  double robot_radius = 0.38;
  Eigen::Vector2d global_origin = Eigen::Vector2d(-20.0, -40.0);
  Eigen::Vector2d global_dims = Eigen::Vector2d(80.0, 80.0);
  double wall_height = 2.5;
  planner::PlannerParams planner;

  Rates rates;
  LidarConfig lidar;
  OdometryConfig odom;
  ImuConfig imu;
  double height_sigma = 0.02;
  double ukf_min_sigma = 1e-3;

  double goal_tolerance = 0.3;
  double stop_speed = 0.2;
  double timeout_factor = 3.0;
  double max_time = 0.0;  // 0: derived from timeout_factor

  QuadrotorParams quad;
  control::ControlGains gains;

  Vec3 goal() const;
  /// Straight-line trapezoid lower bound on the time to goal.
  double time_lower_bound() const;
  double timeout() const;
};

/// Parses the key-value scenario text. Throws Error(ParseError) with the
/// offending line number.
Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_text(const std::string& text);
/// A path to a file, or the name of a shipped scenario.
Scenario load_scenario(const std::string& name_or_path);
std::string shipped_scenario_dir();

/// Human-readable invariant violations; empty when valid.
std::vector<std::string> validate(const Scenario& sc);
/// Throws Error(InvalidScenario) listing the first violation.
void require_valid(const Scenario& sc);

/// Canonical text form; parses back to an equivalent scenario.
std::string to_text(const Scenario& sc);

}  // namespace quadnav::sim
