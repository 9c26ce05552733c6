#pragma once

#include <optional>
#include <random>
#include <vector>

#include "quadnav/dynamics.hpp"
#include "quadnav/mapping.hpp"
#include "quadnav/ukf.hpp"

namespace quadnav::sim {

using Rng = std::mt19937_64;

struct Aabb {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  bool contains(const Vec3& p) const;
  double distance(const Vec3& p) const;
  /// Entry distance along the unit ray, if it hits within max_range.
  std::optional<double> raycast(const Vec3& origin, const Vec3& dir, double max_range) const;
};

struct World {
  std::vector<Aabb> boxes;

  double distance(const Vec3& p) const;  // to the nearest box, +inf if none
  std::optional<double> raycast(const Vec3& origin, const Vec3& dir, double max_range) const;
  bool collides(const Vec3& p, double radius) const { return distance(p) < radius; }
};

struct LidarConfig {
  int rays = 720;
  double fov = 1.5 * 3.14159265358979323846;  // 270 degrees, centred on +x
  double max_range = 30.0;
  double noise_sigma = 0.01;
  double nod_amplitude = 0.6;  // rad
  double nod_frequency = 0.5;  // Hz
};

/// Triangle wave between -amplitude and +amplitude.
double nod_pitch(double t, const LidarConfig& cfg);

/// Planar scanner pitched by `gimbal_pitch` about the body y axis. Ranges are
/// the nearest box hit plus Gaussian noise; misses are invalid.
mapping::LidarScan simulate_lidar(const World& world, const Vec3& position, const Mat3& body_rot,
                                  double gimbal_pitch, const LidarConfig& cfg, Rng& rng);

struct YawJump {
  double time = 0.0;
  double angle = 0.0;  // rad
};

struct OdometryConfig {
  double drift_rate = 0.0;   // position offset per metre travelled
  double walk_sigma = 0.0;   // random-walk std per sqrt(metre)
  double position_sigma = 0.0;
  double angle_sigma = 0.0;
  double min_sigma = 1e-3;   // floor on the reported covariance
  std::vector<YawJump> jumps;
};

/// Visual-odometry stand-in: true pose seen through a drifting frame.
class OdometrySim {
 public:
  OdometrySim(OdometryConfig cfg, Rng& rng);

  /// Advances drift by the distance moved since the last call and returns a
  /// pose measurement stamped at t.
  ukf::Measurement measure(const RigidBodyState& truth, double t, Rng& rng);
  /// Odometry-frame position for a true position (noise-free).
  Vec3 to_odom(const Vec3& p) const;
  const Vec3& drift() const { return drift_; }
  int jumps_applied() const { return jumps_applied_; }

 private:
  OdometryConfig cfg_;
  Vec3 drift_dir_ = Vec3::UnitX();
  Vec3 drift_ = Vec3::Zero();
  Vec3 walk_ = Vec3::Zero();
  Mat3 frame_R_ = Mat3::Identity();
  Vec3 frame_t_ = Vec3::Zero();
  double yaw_offset_ = 0.0;
  std::optional<Vec3> last_p_;
  double travelled_ = 0.0;
  std::size_t next_jump_ = 0;
  int jumps_applied_ = 0;
};

struct ImuConfig {
  double accel_sigma = 0.0;
  double gyro_sigma = 0.0;
  double accel_bias_walk = 0.0;  // per sqrt(s)
  double gyro_bias_walk = 0.0;
};

class ImuSim {
 public:
  explicit ImuSim(ImuConfig cfg) : cfg_(cfg) {}
  ukf::ImuSample sample(const PlantState& s, const QuadrotorParams& params, double t, double dt,
                        Rng& rng);

 private:
  ImuConfig cfg_;
  Vec3 accel_bias_ = Vec3::Zero();
  Vec3 gyro_bias_ = Vec3::Zero();
};

/// Downward range to a flat floor at z = 0.
ukf::Measurement simulate_height(const RigidBodyState& truth, double sigma, double min_sigma,
                                 double t, Rng& rng);

}  // namespace quadnav::sim
