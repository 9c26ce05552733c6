#include "quadnav/nav.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "quadnav/error.hpp"
#include "quadnav/ukf.hpp"

namespace quadnav::sim {

namespace {

using Clock = std::chrono::steady_clock;

double sq(double x) { return x * x; }

ukf::UkfParams filter_params(const Scenario& sc) {
  ukf::UkfParams p;
  p.process_noise.setZero();
  const double acc = std::max(sc.imu.accel_sigma, 0.01);
  const double gyr = std::max(sc.imu.gyro_sigma, 1e-3);
  const double abw = std::max(sc.imu.accel_bias_walk, 1e-4);
  const double gbw = std::max(sc.imu.gyro_bias_walk, 1e-5);
  p.process_noise.diagonal() << Vec3::Constant(sq(acc)), Vec3::Constant(sq(gyr)),
      Vec3::Constant(sq(abw)), Vec3::Constant(sq(gbw));
  return p;
}

ukf::StateGaussian initial_estimate(const Scenario& sc) {
  ukf::StateGaussian g;
  g.mean.p = sc.start;
  g.mean.euler.yaw = sc.start_yaw;
  g.cov.setZero();
  g.cov.diagonal() << Vec3::Constant(1e-4), Vec3::Constant(1e-4), Vec3::Constant(1e-4),
      Vec3::Constant(1e-4), Vec3::Constant(1e-6);
  return g;
}

struct Active {
  std::optional<trajopt::SplineTrajectory> traj;
  double t0 = 0.0;
  Vec3 hold = Vec3::Zero();  // hover point when there is no trajectory
};

control::DesiredFlatState sample_desired(const Active& act, double t, double yaw) {
  control::DesiredFlatState d;
  d.yaw = yaw;
  if (!act.traj) {
    d.p = act.hold;
    return d;
  }
  const double tau = std::clamp(t - act.t0, 0.0, act.traj->total_time());
  d.p = trajopt::eval_trajectory(*act.traj, tau, 0);
  d.v = trajopt::eval_trajectory(*act.traj, tau, 1);
  d.a = trajopt::eval_trajectory(*act.traj, tau, 2);
  d.j = trajopt::eval_trajectory(*act.traj, tau, 3);
  return d;
}

}  // namespace

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::GoalReached: return "goal_reached";
    case RunStatus::Collision: return "collision";
    case RunStatus::Timeout: return "timeout";
  }
  return "unknown";
}

const char* to_string(ReplanStatus s) {
  switch (s) {
    case ReplanStatus::Ok: return "ok";
    case ReplanStatus::Emergency: return "emergency";
    case ReplanStatus::Skipped: return "skipped";
    case ReplanStatus::Failed: return "failed";
  }
  return "unknown";
}

RunResult run_scenario(const Scenario& sc) {
  require_valid(sc);
  const auto wall_start = Clock::now();

  RunResult res;
  res.scenario = sc;
  Rng rng(sc.seed);

  const Rates& rt = sc.rates;
  const double dt = 1.0 / rt.tick_hz;
  const double dt_ctrl = 1.0 / rt.control_hz;
  const int ctrl_div = rt.tick_hz / rt.control_hz;
  const int odom_div = rt.tick_hz / rt.odom_hz;
  const int height_div = rt.tick_hz / rt.height_hz;
  const int lidar_div = rt.tick_hz / rt.lidar_hz;
  const int replan_div = rt.tick_hz / rt.replan_hz;
  const long max_ticks = static_cast<long>(std::ceil(sc.timeout() * rt.tick_hz));

  const Vec3 goal = sc.goal();
  const double z_fly = sc.start.z();

  PlantState plant;
  plant.body.p = sc.start;
  plant.body.R = geom::rot_z(sc.start_yaw);
  plant.rotor_speed.setConstant(hover_rotor_speed(sc.quad));

  ukf::Filter filter(initial_estimate(sc), filter_params(sc));
  OdometryConfig odom_cfg = sc.odom;
  odom_cfg.min_sigma = sc.ukf_min_sigma;
  OdometrySim odom(odom_cfg, rng);
  ImuSim imu(sc.imu);

  mapping::LocalVoxelMap local(sc.local_dims, sc.resolution, sc.start);
  mapping::GlobalInfoMap global(sc.global_origin, sc.global_dims, 1.0);

  control::PositionController pos_ctrl(sc.gains);
  control::AttitudeCommand att_cmd;
  att_cmd.thrust = sc.quad.mass * control::kGravity;
  att_cmd.R_des = plant.body.R;
  control::MotorCommand motors;
  motors.omega = plant.rotor_speed;

  Active act;
  act.hold = sc.start;
  double yaw_des = sc.start_yaw;
  control::DesiredFlatState des = sample_desired(act, 0.0, yaw_des);
  ukf::ImuSample last_imu;
  last_imu.stamp = 0.0;
  filter.predict(last_imu);

  Metrics& m = res.metrics;
  m.min_clearance = sc.world.distance(plant.body.p);
  double replan_ms_total = 0.0;
  int pending_replan = -1;

  auto replan = [&](double t) {
    ReplanEvent ev;
    ev.id = static_cast<int>(res.log.replans.size());
    ev.t = t;
    const auto t_begin = Clock::now();
    const control::DesiredFlatState ds = sample_desired(act, t, yaw_des);
    const trajopt::BoundaryState bs{ds.p, ds.v, ds.a, ds.j};
    try {
      const mapping::DilatedMap dmap = mapping::dilate(local, sc.dilation);
      mapping::update_global(global, local, sc.wall_height);
      const planner::HybridGraph graph = planner::build_graph(dmap, global, z_fly, sc.planner);
      const planner::PathPolyline path = planner::astar(graph, dmap, global, ds.p, goal, sc.planner);
      const planner::PathPolyline prefix = path.local_prefix();
      ev.path_length = path.length();
      ev.path_waypoints = static_cast<int>(path.waypoints.size());
      ev.local_waypoints = static_cast<int>(prefix.waypoints.size());
      if (prefix.waypoints.size() < 2 || prefix.length() < 0.5 * sc.resolution) {
        ev.status = ReplanStatus::Skipped;
        ev.detail = "short";
      } else {
        const corridor::SafeCorridor cor = corridor::build_corridor(prefix, dmap);
        const planner::PathPolyline modified = corridor::modify_path(prefix, cor);
        try {
          trajopt::SplineTrajectory tr =
              trajopt::generate_trajectory(modified, cor, sc.limits, bs, sc.traj);
          res.last_path = path;
          res.last_modified_path = modified;
          res.last_corridor = cor;
          act.traj = std::move(tr);
          act.t0 = t;
          ev.status = ReplanStatus::Ok;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::TrajectoryInfeasible) throw;
          act.traj = trajopt::emergency_stop(bs, sc.limits);
          act.t0 = t;
          ev.status = ReplanStatus::Emergency;
          ev.detail = to_string(e.code());
          ++m.emergency_stops;
        }
        ev.segments = static_cast<int>(act.traj->segment_count());
        ev.duration = act.traj->total_time();
        for (int q = 0; q < 4; ++q) {
          const Vec3 v = trajopt::eval_trajectory(*act.traj, 0.0, q);
          ev.splice_residual = std::max(ev.splice_residual, (v - bs.derivative(q)).cwiseAbs().maxCoeff());
        }
        res.last_trajectory = act.traj;
        res.last_trajectory_start = t;
        pending_replan = ev.id;
      }
    } catch (const Error& e) {
      ev.status = ReplanStatus::Failed;
      ev.detail = to_string(e.code());
      ++m.failed_replans;
    }
    ev.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t_begin).count();
    replan_ms_total += ev.wall_ms;
    m.max_replan_ms = std::max(m.max_replan_ms, ev.wall_ms);
    res.log.replans.push_back(ev);
  };

  auto estimate = [&]() -> const ukf::NavState& { return filter.state().mean; };

  m.status = RunStatus::Timeout;
  for (long tick = 1; tick <= max_ticks; ++tick) {
    const double t = static_cast<double>(tick) / rt.tick_hz;
    plant = dynamics_step(plant, motors, sc.quad, dt);

    const double clearance = sc.world.distance(plant.body.p);
    m.min_clearance = std::min(m.min_clearance, clearance);
    const bool collided = clearance < sc.robot_radius;

    last_imu = imu.sample(plant, sc.quad, t, dt, rng);
    const bool ctrl_tick = tick % ctrl_div == 0;
    if (ctrl_tick) filter.predict(last_imu);
    if (tick % odom_div == 0) filter.push(odom.measure(plant.body, t, rng));
    if (tick % height_div == 0) {
      filter.push(simulate_height(plant.body, sc.height_sigma, sc.ukf_min_sigma, t, rng));
    }
    if (ctrl_tick) filter.flush(t);

    if (tick % lidar_div == 0) {
      const double pitch = nod_pitch(t, sc.lidar);
      mapping::LidarScan scan =
          simulate_lidar(sc.world, plant.body.p, plant.body.R, pitch, sc.lidar, rng);
      const ukf::NavState& est = estimate();
      scan.origin = est.p;
      scan.rotation = est.rotation() * geom::rot_y(pitch);
      mapping::recenter(local, Vec3(est.p.x(), est.p.y(), z_fly));
      mapping::integrate_scan(local, scan);
    }

    if (tick % replan_div == 0 && !collided) replan(t);

    const ukf::NavState& est = estimate();
    if (ctrl_tick) {
      des = sample_desired(act, t, yaw_des);
      const double next_yaw =
          trajopt::yaw_toward_velocity(yaw_des, des.v, dt_ctrl, sc.yaw_rate_max);
      des.yaw_rate = geom::wrap_angle(next_yaw - yaw_des) / dt_ctrl;
      yaw_des = next_yaw;
      des.yaw = yaw_des;
      att_cmd = pos_ctrl.compute(est.p, est.v, est.rotation(), des);
    }
    const Vec3 omega_hat = last_imu.gyro - est.gyro_bias;
    const Vec3 moments = control::attitude_control(est.rotation(), omega_hat, att_cmd, sc.gains);
    motors = control::mix_motors(att_cmd.thrust, moments, sc.quad.mixer);

    const double est_err = (est.p - plant.body.p).norm();
    if (ctrl_tick || collided) {
      NavLogRow row;
      row.t = t;
      row.p_true = plant.body.p;
      row.v_true = plant.body.v;
      row.e_true = geom::rot_to_euler(plant.body.R);
      row.p_est = est.p;
      row.v_est = est.v;
      row.e_est = est.euler;
      row.des = des;
      row.thrust = att_cmd.thrust;
      row.moments = moments;
      row.rotor_cmd = motors.omega;
      row.replan = pending_replan;
      row.collision = collided;
      pending_replan = -1;
      res.log.rows.push_back(row);

      m.max_speed = std::max(m.max_speed, plant.body.v.norm());
      m.max_desired_speed = std::max(m.max_desired_speed, des.v.norm());
      m.max_estimation_error = std::max(m.max_estimation_error, est_err);
    }
    m.sim_time = t;

    if (collided) {
      m.status = RunStatus::Collision;
      break;
    }
    if (ctrl_tick && (est.p - goal).norm() < sc.goal_tolerance && est.v.norm() < sc.stop_speed) {
      m.status = RunStatus::GoalReached;
      break;
    }
  }

  m.goal_error = (plant.body.p - goal).norm();
  m.final_estimation_error = (estimate().p - plant.body.p).norm();
  m.replan_count = static_cast<int>(res.log.replans.size());
  m.mean_replan_ms = m.replan_count > 0 ? replan_ms_total / m.replan_count : 0.0;
  m.wall_seconds = std::chrono::duration<double>(Clock::now() - wall_start).count();
  res.local_map = local;
  res.global_map = global;
  return res;
}

}  // namespace quadnav::sim
