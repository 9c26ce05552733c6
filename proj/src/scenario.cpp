#include "quadnav/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "quadnav/error.hpp"

namespace quadnav::sim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt(const Vec3& v) { return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z()); }

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

struct Args {
  int line;
  std::string key;
  std::vector<std::string> tokens;

  void expect(std::size_t n) const {
    if (tokens.size() != n) {
      parse_fail(line, "'" + key + "' expects " + std::to_string(n) + " value(s), got " +
                           std::to_string(tokens.size()));
    }
  }
  double num(std::size_t i) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(tokens[i], &used);
      if (used != tokens[i].size() || !std::isfinite(v)) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      parse_fail(line, "'" + key + "': '" + tokens[i] + "' is not a number");
    }
  }
  int integer(std::size_t i) const {
    const double v = num(i);
    if (v != std::floor(v)) parse_fail(line, "'" + key + "' expects an integer");
    return static_cast<int>(v);
  }
  double one() const {
    expect(1);
    return num(0);
  }
  Vec3 vec3() const {
    expect(3);
    return Vec3(num(0), num(1), num(2));
  }
  Eigen::Vector2d vec2() const {
    expect(2);
    return Eigen::Vector2d(num(0), num(1));
  }
};

using Handler = std::function<void(Scenario&, const Args&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"name", [](Scenario& s, const Args& a) { a.expect(1); s.name = a.tokens[0]; }},
      {"seed",
       [](Scenario& s, const Args& a) {
         a.expect(1);
         try {
           s.seed = std::stoull(a.tokens[0]);
         } catch (const std::exception&) {
           parse_fail(a.line, "'seed' expects a non-negative integer");
         }
       }},
      {"box",
       [](Scenario& s, const Args& a) {
         a.expect(6);
         Aabb b;
         b.lo = Vec3(a.num(0), a.num(1), a.num(2));
         b.hi = Vec3(a.num(3), a.num(4), a.num(5));
         s.world.boxes.push_back(b);
       }},
      {"start", [](Scenario& s, const Args& a) { s.start = a.vec3(); }},
      {"start_yaw_deg", [](Scenario& s, const Args& a) { s.start_yaw = a.one() * kDeg; }},
      {"goal", [](Scenario& s, const Args& a) { s.goal_point = a.vec3(); }},
      {"goal_bearing_deg",
       [](Scenario& s, const Args& a) {
         s.goal_bearing = a.one() * kDeg;
         s.goal_point.reset();
       }},
      {"goal_range",
       [](Scenario& s, const Args& a) {
         s.goal_range = a.one();
         s.goal_point.reset();
       }},
      {"v_max", [](Scenario& s, const Args& a) { s.limits.v_max = a.one(); }},
      {"a_max", [](Scenario& s, const Args& a) { s.limits.a_max = a.one(); }},
      {"j_max", [](Scenario& s, const Args& a) { s.limits.j_max = a.one(); }},
      {"eps", [](Scenario& s, const Args& a) { s.traj.eps = a.one(); }},
      {"samples", [](Scenario& s, const Args& a) { a.expect(1); s.traj.samples = a.integer(0); }},
      {"max_subsegment", [](Scenario& s, const Args& a) { s.traj.max_subsegment = a.one(); }},
      {"alloc_speed_ratio", [](Scenario& s, const Args& a) { s.traj.alloc_speed_ratio = a.one(); }},
      {"alloc_accel_ratio", [](Scenario& s, const Args& a) { s.traj.alloc_accel_ratio = a.one(); }},
      {"yaw_rate_max", [](Scenario& s, const Args& a) { s.yaw_rate_max = a.one(); }},
      {"local_dims", [](Scenario& s, const Args& a) { s.local_dims = a.vec3(); }},
      {"resolution", [](Scenario& s, const Args& a) { s.resolution = a.one(); }},
      {"dilation", [](Scenario& s, const Args& a) { s.dilation = a.one(); }},
      {"robot_radius", [](Scenario& s, const Args& a) { s.robot_radius = a.one(); }},
      {"global_origin", [](Scenario& s, const Args& a) { s.global_origin = a.vec2(); }},
      {"global_dims", [](Scenario& s, const Args& a) { s.global_dims = a.vec2(); }},
      {"wall_height", [](Scenario& s, const Args& a) { s.wall_height = a.one(); }},
      {"penalty_2d", [](Scenario& s, const Args& a) { s.planner.penalty_2d = a.one(); }},
      {"tick_hz", [](Scenario& s, const Args& a) { a.expect(1); s.rates.tick_hz = a.integer(0); }},
      {"control_hz", [](Scenario& s, const Args& a) { a.expect(1); s.rates.control_hz = a.integer(0); }},
      {"odom_hz", [](Scenario& s, const Args& a) { a.expect(1); s.rates.odom_hz = a.integer(0); }},
      {"height_hz", [](Scenario& s, const Args& a) { a.expect(1); s.rates.height_hz = a.integer(0); }},
      {"lidar_hz", [](Scenario& s, const Args& a) { a.expect(1); s.rates.lidar_hz = a.integer(0); }},
      {"replan_hz", [](Scenario& s, const Args& a) { a.expect(1); s.rates.replan_hz = a.integer(0); }},
      {"lidar_rays", [](Scenario& s, const Args& a) { a.expect(1); s.lidar.rays = a.integer(0); }},
      {"lidar_fov_deg", [](Scenario& s, const Args& a) { s.lidar.fov = a.one() * kDeg; }},
      {"lidar_range", [](Scenario& s, const Args& a) { s.lidar.max_range = a.one(); }},
      {"lidar_noise", [](Scenario& s, const Args& a) { s.lidar.noise_sigma = a.one(); }},
      {"nod_amplitude", [](Scenario& s, const Args& a) { s.lidar.nod_amplitude = a.one(); }},
      {"nod_frequency", [](Scenario& s, const Args& a) { s.lidar.nod_frequency = a.one(); }},
      {"odom_drift", [](Scenario& s, const Args& a) { s.odom.drift_rate = a.one(); }},
      {"odom_walk", [](Scenario& s, const Args& a) { s.odom.walk_sigma = a.one(); }},
      {"odom_noise",
       [](Scenario& s, const Args& a) {
         a.expect(2);
         s.odom.position_sigma = a.num(0);
         s.odom.angle_sigma = a.num(1);
       }},
      {"yaw_jump",
       [](Scenario& s, const Args& a) {
         a.expect(2);
         s.odom.jumps.push_back(YawJump{a.num(0), a.num(1) * kDeg});
       }},
      {"imu_noise",
       [](Scenario& s, const Args& a) {
         a.expect(2);
         s.imu.accel_sigma = a.num(0);
         s.imu.gyro_sigma = a.num(1);
       }},
      {"imu_bias_walk",
       [](Scenario& s, const Args& a) {
         a.expect(2);
         s.imu.accel_bias_walk = a.num(0);
         s.imu.gyro_bias_walk = a.num(1);
       }},
      {"height_noise", [](Scenario& s, const Args& a) { s.height_sigma = a.one(); }},
      {"ukf_min_sigma", [](Scenario& s, const Args& a) { s.ukf_min_sigma = a.one(); }},
      {"goal_tolerance", [](Scenario& s, const Args& a) { s.goal_tolerance = a.one(); }},
      {"stop_speed", [](Scenario& s, const Args& a) { s.stop_speed = a.one(); }},
      {"timeout_factor", [](Scenario& s, const Args& a) { s.timeout_factor = a.one(); }},
      {"max_time", [](Scenario& s, const Args& a) { s.max_time = a.one(); }},
      {"mass",
       [](Scenario& s, const Args& a) {
         s.quad.mass = a.one();
         s.gains.mass = s.quad.mass;
       }},
  };
  return h;
}

}  // namespace

Vec3 Scenario::goal() const {
  if (goal_point) return *goal_point;
  return start + goal_range * Vec3(std::cos(goal_bearing), std::sin(goal_bearing), 0.0);
}

double Scenario::time_lower_bound() const {
  const double L = (goal() - start).norm();
  const double v = limits.v_max, a = limits.a_max;
  if (v * v / a <= L) return L / v + v / a;
  return 2.0 * std::sqrt(L / a);
}

double Scenario::timeout() const {
  return max_time > 0.0 ? max_time : timeout_factor * time_lower_bound();
}

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::optional<std::pair<double, double>> enclosure;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Args args{line, {}, {}};
    if (!(ls >> args.key)) continue;
    for (std::string tok; ls >> tok;) args.tokens.push_back(tok);
    if (args.key == "enclosure") {
      args.expect(2);
      enclosure = {args.num(0), args.num(1)};
      continue;
    }
    const auto it = handlers().find(args.key);
    if (it == handlers().end()) parse_fail(line, "unknown key '" + args.key + "'");
    it->second(sc, args);
  }
  if (enclosure) {
    // Floor and ceiling slabs over the whole global map footprint.
    const Eigen::Vector2d lo = sc.global_origin, hi = sc.global_origin + sc.global_dims;
    sc.world.boxes.push_back(
        Aabb{Vec3(lo.x(), lo.y(), enclosure->first - 0.2), Vec3(hi.x(), hi.y(), enclosure->first)});
    sc.world.boxes.push_back(Aabb{Vec3(lo.x(), lo.y(), enclosure->second),
                                  Vec3(hi.x(), hi.y(), enclosure->second + 0.2)});
  }
  return sc;
}

Scenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

std::string shipped_scenario_dir() {
  if (const char* env = std::getenv("QUADNAV_SCENARIO_DIR")) return env;
  return QUADNAV_SCENARIO_DIR;
}

Scenario load_scenario(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  fs::path p(name_or_path);
  if (!fs::is_regular_file(p)) {
    const fs::path shipped = fs::path(shipped_scenario_dir()) / (name_or_path + ".scn");
    if (!fs::is_regular_file(shipped)) {
      throw Error(ErrorCode::ParseError, "scenario not found: " + name_or_path);
    }
    p = shipped;
  }
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + p.string());
  try {
    return parse_scenario(in);
  } catch (const Error& e) {
    throw Error(e.code(), p.string() + ": " + e.what());
  }
}

std::vector<std::string> validate(const Scenario& sc) {
  std::vector<std::string> out;
  if (!(sc.limits.v_max > 0.0)) out.push_back("v_max must be positive");
  if (!(sc.limits.a_max > 0.0)) out.push_back("a_max must be positive");
  if (!(sc.limits.j_max > 0.0)) out.push_back("j_max must be positive");
  if (!(sc.resolution > 0.0)) out.push_back("resolution must be positive");
  if (!(sc.dilation >= 0.0)) out.push_back("dilation must be non-negative");
  if (!(sc.robot_radius > 0.0)) out.push_back("robot_radius must be positive");
  if (!(sc.local_dims.minCoeff() > 0.0)) out.push_back("local_dims must be positive");
  if (!(sc.global_dims.minCoeff() > 0.0)) out.push_back("global_dims must be positive");
  if (sc.traj.samples < 2) out.push_back("samples must be at least 2");
  if (!(sc.traj.eps >= 0.0)) out.push_back("eps must be non-negative");
  if (sc.lidar.rays <= 0) out.push_back("lidar_rays must be positive");
  if (!(sc.timeout_factor > 0.0)) out.push_back("timeout_factor must be positive");

  const std::pair<const char*, int> rates[] = {{"control_hz", sc.rates.control_hz},
                                               {"odom_hz", sc.rates.odom_hz},
                                               {"height_hz", sc.rates.height_hz},
                                               {"lidar_hz", sc.rates.lidar_hz},
                                               {"replan_hz", sc.rates.replan_hz}};
  if (sc.rates.tick_hz <= 0) {
    out.push_back("tick_hz must be positive");
  } else {
    for (const auto& [name, hz] : rates) {
      if (hz <= 0 || sc.rates.tick_hz % hz != 0) {
        out.push_back(std::string(name) + " must be a positive divisor of tick_hz");
      }
    }
    if (sc.rates.tick_hz < 400) out.push_back("tick_hz must be at least 400");
  }

  for (std::size_t i = 0; i < sc.world.boxes.size(); ++i) {
    const Aabb& b = sc.world.boxes[i];
    if (!((b.hi.array() > b.lo.array()).all())) {
      out.push_back("box " + std::to_string(i) + " has non-positive extent");
    }
  }
  if (sc.world.distance(sc.start) < sc.robot_radius) {
    out.push_back("start is inside or within robot radius of an obstacle");
  }
  const Vec3 goal = sc.goal();
  if (sc.world.distance(goal) < sc.robot_radius) {
    out.push_back("goal is inside or within robot radius of an obstacle");
  }
  const Eigen::Vector2d glo = sc.global_origin, ghi = sc.global_origin + sc.global_dims;
  for (const auto& [label, p] : {std::pair<const char*, Vec3>{"start", sc.start},
                                 std::pair<const char*, Vec3>{"goal", goal}}) {
    if (p.x() < glo.x() || p.y() < glo.y() || p.x() > ghi.x() || p.y() > ghi.y()) {
      out.push_back(std::string(label) + " lies outside the global map");
    }
  }
  return out;
}

void require_valid(const Scenario& sc) {
  const auto v = validate(sc);
  if (!v.empty()) throw Error(ErrorCode::InvalidScenario, v.front());
}

std::string to_text(const Scenario& sc) {
  std::ostringstream o;
  o << "name " << sc.name << "\n";
  o << "seed " << sc.seed << "\n";
  o << "start " << fmt(sc.start) << "\n";
  o << "start_yaw_deg " << fmt(sc.start_yaw / kDeg) << "\n";
  if (sc.goal_point) {
    o << "goal " << fmt(*sc.goal_point) << "\n";
  } else {
    o << "goal_bearing_deg " << fmt(sc.goal_bearing / kDeg) << "\n";
    o << "goal_range " << fmt(sc.goal_range) << "\n";
  }
  o << "v_max " << fmt(sc.limits.v_max) << "\n";
  o << "a_max " << fmt(sc.limits.a_max) << "\n";
  o << "j_max " << fmt(sc.limits.j_max) << "\n";
  o << "eps " << fmt(sc.traj.eps) << "\n";
  o << "samples " << sc.traj.samples << "\n";
  o << "max_subsegment " << fmt(sc.traj.max_subsegment) << "\n";
  o << "alloc_speed_ratio " << fmt(sc.traj.alloc_speed_ratio) << "\n";
  o << "alloc_accel_ratio " << fmt(sc.traj.alloc_accel_ratio) << "\n";
  o << "yaw_rate_max " << fmt(sc.yaw_rate_max) << "\n";
  o << "local_dims " << fmt(sc.local_dims) << "\n";
  o << "resolution " << fmt(sc.resolution) << "\n";
  o << "dilation " << fmt(sc.dilation) << "\n";
  o << "robot_radius " << fmt(sc.robot_radius) << "\n";
  o << "global_origin " << fmt(sc.global_origin.x()) << " " << fmt(sc.global_origin.y()) << "\n";
  o << "global_dims " << fmt(sc.global_dims.x()) << " " << fmt(sc.global_dims.y()) << "\n";
  o << "wall_height " << fmt(sc.wall_height) << "\n";
  o << "penalty_2d " << fmt(sc.planner.penalty_2d) << "\n";
  o << "tick_hz " << sc.rates.tick_hz << "\n";
  o << "control_hz " << sc.rates.control_hz << "\n";
  o << "odom_hz " << sc.rates.odom_hz << "\n";
  o << "height_hz " << sc.rates.height_hz << "\n";
  o << "lidar_hz " << sc.rates.lidar_hz << "\n";
  o << "replan_hz " << sc.rates.replan_hz << "\n";
  o << "lidar_rays " << sc.lidar.rays << "\n";
  o << "lidar_fov_deg " << fmt(sc.lidar.fov / kDeg) << "\n";
  o << "lidar_range " << fmt(sc.lidar.max_range) << "\n";
  o << "lidar_noise " << fmt(sc.lidar.noise_sigma) << "\n";
  o << "nod_amplitude " << fmt(sc.lidar.nod_amplitude) << "\n";
  o << "nod_frequency " << fmt(sc.lidar.nod_frequency) << "\n";
  o << "odom_drift " << fmt(sc.odom.drift_rate) << "\n";
  o << "odom_walk " << fmt(sc.odom.walk_sigma) << "\n";
  o << "odom_noise " << fmt(sc.odom.position_sigma) << " " << fmt(sc.odom.angle_sigma) << "\n";
  for (const YawJump& j : sc.odom.jumps) {
    o << "yaw_jump " << fmt(j.time) << " " << fmt(j.angle / kDeg) << "\n";
  }
  o << "imu_noise " << fmt(sc.imu.accel_sigma) << " " << fmt(sc.imu.gyro_sigma) << "\n";
  o << "imu_bias_walk " << fmt(sc.imu.accel_bias_walk) << " " << fmt(sc.imu.gyro_bias_walk)
    << "\n";
  o << "height_noise " << fmt(sc.height_sigma) << "\n";
  o << "ukf_min_sigma " << fmt(sc.ukf_min_sigma) << "\n";
  o << "goal_tolerance " << fmt(sc.goal_tolerance) << "\n";
  o << "stop_speed " << fmt(sc.stop_speed) << "\n";
  o << "timeout_factor " << fmt(sc.timeout_factor) << "\n";
  o << "max_time " << fmt(sc.max_time) << "\n";
  o << "mass " << fmt(sc.quad.mass) << "\n";
  for (const Aabb& b : sc.world.boxes) o << "box " << fmt(b.lo) << " " << fmt(b.hi) << "\n";
  return o.str();
}

}  // namespace quadnav::sim
