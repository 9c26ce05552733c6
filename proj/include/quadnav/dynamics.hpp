#pragma once

#include <Eigen/Core>

#include "quadnav/controller.hpp"
#include "quadnav/geom.hpp"

namespace quadnav::sim {

struct RigidBodyState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Mat3 R = Mat3::Identity();  // world-from-body
  Vec3 omega = Vec3::Zero();  // body rates
};

struct QuadrotorParams {
  double mass = 1.282;
  Vec3 inertia = Vec3(0.0125, 0.0125, 0.022);
  control::MixerGeometry mixer;
  double motor_tau = 0.015;
};

/// Rigid body plus first-order rotor speed states.
struct PlantState {
  RigidBodyState body;
  Eigen::Vector4d rotor_speed = Eigen::Vector4d::Zero();
};

/// One RK4 step with body-frame collective thrust and moments held constant.
RigidBodyState rigid_body_step(const RigidBodyState& s, double thrust, const Vec3& moments,
                               const QuadrotorParams& params, double dt);

/// Rotor speeds relax toward the commanded speeds (exact first-order lag over
/// dt), then the body is integrated with the resulting forces.
PlantState dynamics_step(const PlantState& s, const control::MotorCommand& cmd,
                         const QuadrotorParams& params, double dt);

/// Collective thrust and body moments produced by the current rotor speeds.
std::pair<double, Vec3> rotor_wrench(const Eigen::Vector4d& rotor_speed,
                                     const QuadrotorParams& params);

/// Rotor speed giving thrust m g / 4 on every rotor.
double hover_rotor_speed(const QuadrotorParams& params);

}  // namespace quadnav::sim
