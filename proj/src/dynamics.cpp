#include "quadnav/dynamics.hpp"

#include <cmath>

namespace quadnav::sim {

namespace {

struct Deriv {
  Vec3 dp, dv;
  Mat3 dR;
  Vec3 domega;
};

Deriv derivative(const RigidBodyState& s, double thrust, const Vec3& moments,
                 const QuadrotorParams& prm) {
  const Vec3 J = prm.inertia;
  Deriv d;
  d.dp = s.v;
  d.dv = s.R.col(2) * (thrust / prm.mass) - control::kGravity * Vec3::UnitZ();
  d.dR = s.R * geom::hat(s.omega);
  const Vec3 jw = J.cwiseProduct(s.omega);
  d.domega = (moments - s.omega.cross(jw)).cwiseQuotient(J);
  return d;
}

RigidBodyState advance(const RigidBodyState& s, const Deriv& d, double h) {
  RigidBodyState o;
  o.p = s.p + h * d.dp;
  o.v = s.v + h * d.dv;
  o.R = s.R + h * d.dR;
  o.omega = s.omega + h * d.domega;
  return o;
}

}  // namespace

RigidBodyState rigid_body_step(const RigidBodyState& s, double thrust, const Vec3& moments,
                               const QuadrotorParams& params, double dt) {
  const Deriv k1 = derivative(s, thrust, moments, params);
  const Deriv k2 = derivative(advance(s, k1, 0.5 * dt), thrust, moments, params);
  const Deriv k3 = derivative(advance(s, k2, 0.5 * dt), thrust, moments, params);
  const Deriv k4 = derivative(advance(s, k3, dt), thrust, moments, params);
  RigidBodyState o;
  o.p = s.p + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  o.v = s.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  o.R = geom::orthonormalize(s.R + dt / 6.0 * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR));
  o.omega = s.omega + dt / 6.0 * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);
  return o;
}

std::pair<double, Vec3> rotor_wrench(const Eigen::Vector4d& rotor_speed,
                                     const QuadrotorParams& params) {
  const Eigen::Vector4d thrusts = params.mixer.k_f * rotor_speed.cwiseAbs2();
  const Eigen::Vector4d w = params.mixer.allocation() * thrusts;
  return {w(0), w.tail<3>()};
}

PlantState dynamics_step(const PlantState& s, const control::MotorCommand& cmd,
                         const QuadrotorParams& params, double dt) {
  PlantState out = s;
  const double blend = params.motor_tau > 0.0 ? 1.0 - std::exp(-dt / params.motor_tau) : 1.0;
  out.rotor_speed = s.rotor_speed + blend * (cmd.omega - s.rotor_speed);
  const auto [thrust, moments] = rotor_wrench(out.rotor_speed, params);
  out.body = rigid_body_step(s.body, thrust, moments, params, dt);
  return out;
}

double hover_rotor_speed(const QuadrotorParams& params) {
  return std::sqrt(params.mass * control::kGravity / (4.0 * params.mixer.k_f));
}

}  // namespace quadnav::sim
