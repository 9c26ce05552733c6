#include "quadnav/controller.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace quadnav::control {

Vec3 MixerGeometry::rotor_position(int i) const {
  const double ang = std::numbers::pi / 4 + i * std::numbers::pi / 2;
  return {arm_length * std::cos(ang), arm_length * std::sin(ang), 0.0};
}

Eigen::Matrix4d MixerGeometry::allocation() const {
  Eigen::Matrix4d a;
  for (int i = 0; i < 4; ++i) {
    const Vec3 r = rotor_position(i);
    a(0, i) = 1.0;
    a(1, i) = r.y();
    a(2, i) = -r.x();
    a(3, i) = spin[i] * k_m / k_f;
  }
  return a;
}

AttitudeCommand position_control(const Vec3& p_hat, const Vec3& v_hat, const Mat3& r_hat,
                                 const DesiredFlatState& des, const ControlGains& gains) {
  const double m = gains.mass;
  const Vec3 e3 = Vec3::UnitZ();
  const Vec3 e_pos = p_hat - des.p;
  const Vec3 e_vel = v_hat - des.v;

  const Vec3 f = m * (-gains.k_pos.cwiseProduct(e_pos) - gains.k_vel.cwiseProduct(e_vel) +
                      kGravity * e3 + des.a);
  const double f_norm = f.norm();
  if (f_norm <= gains.f_min_ratio * m * kGravity) {
    throw Error(ErrorCode::DegenerateThrust, "commanded force too small");
  }

  AttitudeCommand cmd;
  cmd.force = f;
  cmd.thrust = f.dot(r_hat * e3);

  const double cy = std::cos(des.yaw), sy = std::sin(des.yaw);
  const Vec3 b2_des(-sy, cy, 0.0);
  const Vec3 b3 = f / f_norm;
  const Vec3 c = b2_des.cross(b3);
  const double c_norm = c.norm();
  if (c_norm <= 1e-6) {
    throw Error(ErrorCode::DegenerateYaw, "heading parallel to thrust axis");
  }
  const Vec3 b1 = c / c_norm;
  const Vec3 b2 = b3.cross(b1);
  cmd.R_des.col(0) = b1;
  cmd.R_des.col(1) = b2;
  cmd.R_des.col(2) = b3;

  // f_dot from the control law itself, using the commanded acceleration
  // a_hat = f/m - g e3 in place of a measured one.
  const Vec3 a_hat = f / m - kGravity * e3;
  const Vec3 f_dot = m * (-gains.k_pos.cwiseProduct(e_vel) -
                          gains.k_vel.cwiseProduct(a_hat - des.a) + des.j);

  const Vec3 b2_des_dot(-cy * des.yaw_rate, -sy * des.yaw_rate, 0.0);
  const Vec3 b3_dot = b3.cross((f_dot / f_norm).cross(b3));
  const Vec3 c_dot = b2_des_dot.cross(b3) + b2_des.cross(b3_dot);
  const Vec3 b1_dot = b1.cross((c_dot / c_norm).cross(b1));
  const Vec3 b2_dot = b3_dot.cross(b1) + b3.cross(b1_dot);

  Mat3 r_dot;
  r_dot.col(0) = b1_dot;
  r_dot.col(1) = b2_dot;
  r_dot.col(2) = b3_dot;
  cmd.omega_des = geom::vee_skew_part(cmd.R_des.transpose() * r_dot);
  return cmd;
}

Vec3 attitude_error(const Mat3& r_hat, const Mat3& r_des) {
  return geom::vee_skew_part(0.5 * (r_des.transpose() * r_hat - r_hat.transpose() * r_des));
}

Vec3 attitude_control(const Mat3& r_hat, const Vec3& omega_hat, const AttitudeCommand& cmd,
                      const ControlGains& gains) {
  const Vec3 e_r = attitude_error(r_hat, cmd.R_des);
  const Vec3 e_omega = omega_hat - r_hat.transpose() * cmd.R_des * cmd.omega_des;
  return -gains.k_R.cwiseProduct(e_r) - gains.k_omega.cwiseProduct(e_omega);
}

MotorCommand mix_motors(double thrust, const Vec3& moments, const MixerGeometry& geom) {
  Eigen::Vector4d wrench(std::max(thrust, 0.0), moments.x(), moments.y(), moments.z());
  MotorCommand out;
  out.thrusts = geom.allocation().partialPivLu().solve(wrench);
  const double f_max = geom.k_f * geom.omega_max * geom.omega_max;
  for (int i = 0; i < 4; ++i) {
    double f = out.thrusts(i);
    if (f < 0.0 || f > f_max) {
      out.saturated = true;
      f = std::clamp(f, 0.0, f_max);
    }
    out.omega(i) = std::sqrt(f / geom.k_f);
  }
  return out;
}

AttitudeCommand PositionController::compute(const Vec3& p_hat, const Vec3& v_hat,
                                            const Mat3& r_hat, const DesiredFlatState& des) {
  try {
    AttitudeCommand cmd = position_control(p_hat, v_hat, r_hat, des, gains_);
    last_valid_ = cmd;
    fallback_ = false;
    return cmd;
  } catch (const Error&) {
    fallback_ = true;
    AttitudeCommand cmd = last_valid_.value_or(AttitudeCommand{});
    cmd.omega_des.setZero();
    cmd.thrust = gains_.f_min_ratio * gains_.mass * kGravity;
    return cmd;
  }
}

}  // namespace quadnav::control
