#include "quadnav/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace quadnav::sim {

bool Aabb::contains(const Vec3& p) const {
  return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

double Aabb::distance(const Vec3& p) const {
  const Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec3::Zero());
  return d.norm();
}

std::optional<double> Aabb::raycast(const Vec3& origin, const Vec3& dir, double max_range) const {
  double t0 = 0.0, t1 = max_range;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(dir(k)) < 1e-15) {
      if (origin(k) < lo(k) || origin(k) > hi(k)) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / dir(k);
    double ta = (lo(k) - origin(k)) * inv;
    double tb = (hi(k) - origin(k)) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

double World::distance(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Aabb& b : boxes) best = std::min(best, b.distance(p));
  return best;
}

std::optional<double> World::raycast(const Vec3& origin, const Vec3& dir, double max_range) const {
  std::optional<double> best;
  for (const Aabb& b : boxes) {
    const auto t = b.raycast(origin, dir, best ? *best : max_range);
    if (t && (!best || *t < *best)) best = t;
  }
  return best;
}

double nod_pitch(double t, const LidarConfig& cfg) {
  if (cfg.nod_frequency <= 0.0) return 0.0;
  const double phase = t * cfg.nod_frequency - std::floor(t * cfg.nod_frequency);
  // 0 -> +A -> 0 -> -A -> 0 over one period
  const double tri = phase < 0.25   ? 4.0 * phase
                     : phase < 0.75 ? 2.0 - 4.0 * phase
                                    : 4.0 * phase - 4.0;
  return cfg.nod_amplitude * tri;
}

mapping::LidarScan simulate_lidar(const World& world, const Vec3& position, const Mat3& body_rot,
                                  double gimbal_pitch, const LidarConfig& cfg, Rng& rng) {
  mapping::LidarScan scan;
  scan.gimbal_pitch = gimbal_pitch;
  scan.rotation = body_rot * geom::rot_y(gimbal_pitch);
  scan.origin = position;
  scan.rays.resize(cfg.rays);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < cfg.rays; ++i) {
    mapping::LidarRay& ray = scan.rays[i];
    ray.azimuth = cfg.rays > 1 ? -0.5 * cfg.fov + cfg.fov * i / (cfg.rays - 1) : 0.0;
    const Vec3 dir = scan.ray_direction(ray);
    const auto hit = world.raycast(position, dir, cfg.max_range);
    const double n = noise(rng);  // drawn for every ray to keep the stream aligned
    if (!hit) continue;
    const double r = *hit + cfg.noise_sigma * n;
    if (r <= 0.0) continue;
    ray.range = std::min(r, cfg.max_range);
    ray.valid = true;
  }
  return scan;
}

OdometrySim::OdometrySim(OdometryConfig cfg, Rng& rng) : cfg_(std::move(cfg)) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double a = angle(rng);
  drift_dir_ = Vec3(std::cos(a), std::sin(a), 0.0);
  std::sort(cfg_.jumps.begin(), cfg_.jumps.end(),
            [](const YawJump& x, const YawJump& y) { return x.time < y.time; });
}

Vec3 OdometrySim::to_odom(const Vec3& p) const { return frame_R_ * p + frame_t_ + drift_ + walk_; }

ukf::Measurement OdometrySim::measure(const RigidBodyState& truth, double t, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  if (last_p_) {
    const double step = (truth.p - *last_p_).norm();
    travelled_ += step;
    drift_ = drift_dir_ * cfg_.drift_rate * travelled_;
    const double s = cfg_.walk_sigma * std::sqrt(step);
    const double wx = n01(rng), wy = n01(rng);
    walk_ += Vec3(s * wx, s * wy, 0.0);
  } else {
    n01(rng);
    n01(rng);
  }
  last_p_ = truth.p;

  while (next_jump_ < cfg_.jumps.size() && cfg_.jumps[next_jump_].time <= t) {
    const double psi = cfg_.jumps[next_jump_].angle;
    const Vec3 q = frame_R_ * truth.p + frame_t_;
    const Mat3 rz = geom::rot_z(psi);
    frame_R_ = rz * frame_R_;
    frame_t_ = rz * (frame_t_ - q) + q;
    yaw_offset_ += psi;
    ++next_jump_;
    ++jumps_applied_;
  }

  Vec3 p = to_odom(truth.p);
  geom::Euler e = geom::rot_to_euler(truth.R);
  e.yaw = geom::wrap_angle(e.yaw + yaw_offset_);
  for (int k = 0; k < 3; ++k) p(k) += cfg_.position_sigma * n01(rng);
  const double nr = n01(rng), np = n01(rng), ny = n01(rng);
  e.roll += cfg_.angle_sigma * nr;
  e.pitch += cfg_.angle_sigma * np;
  e.yaw = geom::wrap_angle(e.yaw + cfg_.angle_sigma * ny);

  const double sp = std::max(cfg_.position_sigma, cfg_.min_sigma);
  const double sa = std::max(cfg_.angle_sigma, cfg_.min_sigma);
  Eigen::Matrix<double, 6, 6> cov = Eigen::Matrix<double, 6, 6>::Zero();
  cov.diagonal() << sp * sp, sp * sp, sp * sp, sa * sa, sa * sa, sa * sa;
  return ukf::Measurement::odom_pose(p, e, cov, t);
}

ukf::ImuSample ImuSim::sample(const PlantState& s, const QuadrotorParams& params, double t,
                              double dt, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double sa = cfg_.accel_bias_walk * std::sqrt(dt);
  const double sg = cfg_.gyro_bias_walk * std::sqrt(dt);
  for (int k = 0; k < 3; ++k) accel_bias_(k) += sa * n01(rng);
  for (int k = 0; k < 3; ++k) gyro_bias_(k) += sg * n01(rng);

  const auto wrench = rotor_wrench(s.rotor_speed, params);
  ukf::ImuSample u;
  u.stamp = t;
  u.accel = Vec3(0.0, 0.0, wrench.first / params.mass) + accel_bias_;
  u.gyro = s.body.omega + gyro_bias_;
  for (int k = 0; k < 3; ++k) u.accel(k) += cfg_.accel_sigma * n01(rng);
  for (int k = 0; k < 3; ++k) u.gyro(k) += cfg_.gyro_sigma * n01(rng);
  return u;
}

ukf::Measurement simulate_height(const RigidBodyState& truth, double sigma, double min_sigma,
                                 double t, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double z = truth.p.z() + sigma * n01(rng);
  const double s = std::max(sigma, min_sigma);
  return ukf::Measurement::height(z, s * s, t);
}

}  // namespace quadnav::sim
