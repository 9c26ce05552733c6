#pragma once

#include <array>
#include <optional>

#include "quadnav/geom.hpp"

namespace quadnav::control {

inline constexpr double kGravity = 9.81;

struct DesiredFlatState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Vec3 j = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
};

struct AttitudeCommand {
  double thrust = 0.0;
  Mat3 R_des = Mat3::Identity();
  Vec3 omega_des = Vec3::Zero();
  Vec3 force = Vec3::Zero();  // world-frame desired force f
};

// Per-axis diagonal gains. Attitude gains act on moments in N m.
struct ControlGains {
  Vec3 k_pos = Vec3::Constant(6.0);
  Vec3 k_vel = Vec3::Constant(4.0);
  Vec3 k_R = Vec3(5.0, 5.0, 2.2);
  Vec3 k_omega = Vec3(0.4, 0.4, 0.35);
  double mass = 1.282;
  double f_min_ratio = 0.05;  // DegenerateThrust below f_min_ratio * m * g
};

// X configuration: rotor i sits at 45 + 90 i degrees from +x, spinning in
// direction spin[i] (+1 produces +z reaction moment per unit thrust).
struct MixerGeometry {
  double arm_length = 0.225;
  double k_f = 1.2576e-5;     // N / (rad/s)^2
  double k_m = 1.2576e-5 * 0.016;  // N m / (rad/s)^2
  double omega_max = 1000.0;  // rad/s
  std::array<double, 4> spin{1.0, -1.0, 1.0, -1.0};

  /// Rows map per-rotor thrusts to [T, Mx, My, Mz].
  Eigen::Matrix4d allocation() const;
  Vec3 rotor_position(int i) const;
};

struct MotorCommand {
  Eigen::Vector4d omega = Eigen::Vector4d::Zero();
  Eigen::Vector4d thrusts = Eigen::Vector4d::Zero();
  bool saturated = false;
};

/// Outer position loop. `r_hat` and the velocity/position come from the
/// estimator. Throws DegenerateThrust / DegenerateYaw.
AttitudeCommand position_control(const Vec3& p_hat, const Vec3& v_hat, const Mat3& r_hat,
                                 const DesiredFlatState& des, const ControlGains& gains);

/// Inner attitude loop: M = -k_R e_R - k_omega e_omega.
Vec3 attitude_control(const Mat3& r_hat, const Vec3& omega_hat, const AttitudeCommand& cmd,
                      const ControlGains& gains);

/// Attitude error vector e_R from the skew difference of the two rotations.
Vec3 attitude_error(const Mat3& r_hat, const Mat3& r_des);

MotorCommand mix_motors(double thrust, const Vec3& moments, const MixerGeometry& geom);

/// Position controller with the degenerate-thrust fallback: on failure it
/// repeats the last valid attitude with thrust clamped to the minimum.
class PositionController {
 public:
  explicit PositionController(ControlGains gains) : gains_(std::move(gains)) {}

  AttitudeCommand compute(const Vec3& p_hat, const Vec3& v_hat, const Mat3& r_hat,
                          const DesiredFlatState& des);
  bool last_was_fallback() const { return fallback_; }
  const ControlGains& gains() const { return gains_; }

 private:
  ControlGains gains_;
  std::optional<AttitudeCommand> last_valid_;
  bool fallback_ = false;
};

}  // namespace quadnav::control
