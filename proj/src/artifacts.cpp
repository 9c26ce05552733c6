#include "quadnav/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "quadnav/error.hpp"

namespace quadnav::io {

namespace {

void put(std::string& out, const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), f, v);
  out += buf;
}

void put_num(std::string& out, double v) { put(out, "%.6f", v); }

void put_vec(std::string& out, const Vec3& v) {
  for (int k = 0; k < 3; ++k) {
    out += ',';
    put_num(out, v(k));
  }
}

template <class Cells, class Letter>
std::string rle(const Cells& cells, Letter letter) {
  std::string out;
  std::size_t i = 0;
  int on_line = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    while (j < cells.size() && cells[j] == cells[i]) ++j;
    out += std::to_string(j - i);
    out += letter(cells[i]);
    out += (++on_line % 16 == 0) ? '\n' : ' ';
    i = j;
  }
  if (!out.empty()) out.back() = '\n';
  return out;
}

}  // namespace

std::string navlog_csv(const sim::NavLog& log) {
  std::string out =
      "t,px,py,pz,vx,vy,vz,roll,pitch,yaw,"
      "est_px,est_py,est_pz,est_vx,est_vy,est_vz,est_roll,est_pitch,est_yaw,"
      "des_px,des_py,des_pz,des_vx,des_vy,des_vz,des_ax,des_ay,des_az,des_jx,des_jy,des_jz,"
      "des_yaw,thrust,mx,my,mz,w1,w2,w3,w4,replan,collision\n";
  out.reserve(log.rows.size() * 400);
  for (const sim::NavLogRow& r : log.rows) {
    put(out, "%.4f", r.t);
    put_vec(out, r.p_true);
    put_vec(out, r.v_true);
    put_vec(out, r.e_true.as_vector());
    put_vec(out, r.p_est);
    put_vec(out, r.v_est);
    put_vec(out, r.e_est.as_vector());
    put_vec(out, r.des.p);
    put_vec(out, r.des.v);
    put_vec(out, r.des.a);
    put_vec(out, r.des.j);
    out += ',';
    put_num(out, r.des.yaw);
    out += ',';
    put_num(out, r.thrust);
    put_vec(out, r.moments);
    for (int k = 0; k < 4; ++k) {
      out += ',';
      put(out, "%.3f", r.rotor_cmd(k));
    }
    out += ',' + std::to_string(r.replan) + ',' + (r.collision ? "1" : "0") + '\n';
  }
  return out;
}

std::string replans_csv(const sim::NavLog& log) {
  std::string out =
      "id,t,status,detail,path_length,path_waypoints,local_waypoints,segments,duration,"
      "splice_residual\n";
  for (const sim::ReplanEvent& e : log.replans) {
    out += std::to_string(e.id) + ',';
    put(out, "%.4f", e.t);
    out += std::string(",") + sim::to_string(e.status) + ',' + e.detail + ',';
    put_num(out, e.path_length);
    out += ',' + std::to_string(e.path_waypoints) + ',' + std::to_string(e.local_waypoints) + ',' +
           std::to_string(e.segments) + ',';
    put_num(out, e.duration);
    out += ',';
    put(out, "%.3e", e.splice_residual);
    out += '\n';
  }
  return out;
}

std::string path_csv(const planner::PathPolyline& raw, const planner::PathPolyline& modified) {
  std::string out = "kind,index,x,y,z,local\n";
  auto dump = [&](const char* kind, const planner::PathPolyline& p) {
    for (std::size_t i = 0; i < p.waypoints.size(); ++i) {
      out += std::string(kind) + ',' + std::to_string(i);
      put_vec(out, p.waypoints[i]);
      out += i < p.local_count ? ",1\n" : ",0\n";
    }
  };
  dump("raw", raw);
  dump("modified", modified);
  return out;
}

std::string corridor_csv(const corridor::SafeCorridor& c) {
  std::string out = "polyhedron,face,ax,ay,az,b\n";
  for (std::size_t i = 0; i < c.polyhedra.size(); ++i) {
    const auto& faces = c.polyhedra[i].faces;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      out += std::to_string(i) + ',' + std::to_string(f);
      put_vec(out, faces[f].a);
      out += ',';
      put_num(out, faces[f].b);
      out += '\n';
    }
  }
  return out;
}

std::string trajectory_csv(const trajopt::SplineTrajectory& tr, double t0, double step) {
  std::string out = "t,px,py,pz,vx,vy,vz,ax,ay,az\n";
  const double T = tr.total_time();
  const int n = static_cast<int>(std::floor(T / step));
  for (int i = 0; i <= n + 1; ++i) {
    const double tau = i <= n ? i * step : T;
    if (i == n + 1 && n * step >= T) break;
    put(out, "%.4f", t0 + tau);
    for (int q = 0; q < 3; ++q) put_vec(out, trajopt::eval_trajectory(tr, tau, q));
    out += '\n';
  }
  return out;
}

std::string metrics_text(const sim::Metrics& m) {
  std::ostringstream o;
  o << "status " << sim::to_string(m.status) << "\n";
  o << "sim_time_s " << m.sim_time << "\n";
  o << "goal_error_m " << m.goal_error << "\n";
  o << "max_speed_mps " << m.max_speed << "\n";
  o << "max_desired_speed_mps " << m.max_desired_speed << "\n";
  o << "min_clearance_m " << m.min_clearance << "\n";
  o << "max_estimation_error_m " << m.max_estimation_error << "\n";
  o << "final_estimation_error_m " << m.final_estimation_error << "\n";
  o << "replans " << m.replan_count << "\n";
  o << "failed_replans " << m.failed_replans << "\n";
  o << "emergency_stops " << m.emergency_stops << "\n";
  o << "mean_replan_ms " << m.mean_replan_ms << "\n";
  o << "max_replan_ms " << m.max_replan_ms << "\n";
  o << "wall_seconds " << m.wall_seconds << "\n";
  return o.str();
}

std::string local_map_text(const mapping::LocalVoxelMap& map) {
  std::string out = "quadnav-local-map 1\n";
  out += "size " + std::to_string(map.size().x()) + ' ' + std::to_string(map.size().y()) + ' ' +
         std::to_string(map.size().z()) + '\n';
  out += "resolution ";
  put(out, "%.6f", map.resolution());
  out += "\ncenter";
  for (int k = 0; k < 3; ++k) {
    out += ' ';
    put_num(out, map.center()(k));
  }
  out += "\ncells\n";
  out += rle(map.cells(), [](mapping::Cell c) {
    return c == mapping::Cell::Free ? 'F' : (c == mapping::Cell::Occupied ? 'O' : 'U');
  });
  return out;
}

std::string global_map_text(const mapping::GlobalInfoMap& map) {
  std::string out = "quadnav-global-map 1\n";
  out += "size " + std::to_string(map.size().x()) + ' ' + std::to_string(map.size().y()) + '\n';
  out += "resolution ";
  put(out, "%.6f", map.resolution());
  out += "\norigin ";
  put_num(out, map.origin().x());
  out += ' ';
  put_num(out, map.origin().y());
  out += "\ncells\n";
  out += rle(map.cells(), [](mapping::InfoCell c) {
    return c == mapping::InfoCell::KnownFree ? 'K' : (c == mapping::InfoCell::Wall ? 'W' : 'U');
  });
  return out;
}

mapping::GlobalInfoMap parse_global_map(const std::string& text) {
  std::istringstream in(text);
  std::string magic, key;
  int version = 0, nx = 0, ny = 0;
  double res = 0.0, ox = 0.0, oy = 0.0;
  in >> magic >> version;
  if (magic != "quadnav-global-map") throw Error(ErrorCode::ParseError, "not a global map file");
  in >> key >> nx >> ny >> key >> res >> key >> ox >> oy >> key;
  if (!in || key != "cells" || nx <= 0 || ny <= 0 || res <= 0.0) {
    throw Error(ErrorCode::ParseError, "bad global map header");
  }
  mapping::GlobalInfoMap map(Eigen::Vector2d(ox, oy), Eigen::Vector2d(nx * res, ny * res), res);
  std::size_t i = 0;
  for (std::string tok; in >> tok;) {
    const char c = tok.back();
    const std::size_t count = std::stoul(tok.substr(0, tok.size() - 1));
    const mapping::InfoCell cell = c == 'K'   ? mapping::InfoCell::KnownFree
                                   : c == 'W' ? mapping::InfoCell::Wall
                                              : mapping::InfoCell::Unknown;
    for (std::size_t k = 0; k < count && i < map.cells().size(); ++k, ++i) {
      map.set(map.unlinear(i), cell);
    }
  }
  return map;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingLog, "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

void write_run(const sim::RunResult& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "scenario.txt", sim::to_text(run.scenario));
  write_file(dir / "navlog.csv", navlog_csv(run.log));
  write_file(dir / "replans.csv", replans_csv(run.log));
  write_file(dir / "path.csv", path_csv(run.last_path, run.last_modified_path));
  write_file(dir / "corridor.csv", corridor_csv(run.last_corridor));
  write_file(dir / "trajectory.csv",
             run.last_trajectory ? trajectory_csv(*run.last_trajectory, run.last_trajectory_start)
                                 : std::string("t,px,py,pz,vx,vy,vz,ax,ay,az\n"));
  write_file(dir / "local_map.txt", local_map_text(run.local_map));
  write_file(dir / "global_map.txt", global_map_text(run.global_map));
  write_file(dir / "metrics.txt", metrics_text(run.metrics));
}

LoggedTrack parse_navlog(const std::string& csv) {
  LoggedTrack tr;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,", 0) != 0) {
    throw Error(ErrorCode::MissingLog, "navlog has no header");
  }
  std::vector<double> v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    v.clear();
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) v.push_back(std::stod(cell));
    if (v.size() < 25) throw Error(ErrorCode::ParseError, "short navlog row");
    tr.t.push_back(v[0]);
    tr.p_true.emplace_back(v[1], v[2], v[3]);
    tr.v_true.emplace_back(v[4], v[5], v[6]);
    tr.p_est.emplace_back(v[10], v[11], v[12]);
    tr.p_des.emplace_back(v[19], v[20], v[21]);
  }
  return tr;
}

void plot_run(const std::filesystem::path& dir) {
  for (const char* f : {"scenario.txt", "navlog.csv", "global_map.txt"}) {
    if (!std::filesystem::is_regular_file(dir / f)) {
      throw Error(ErrorCode::MissingLog, (dir / f).string() + " not found");
    }
  }
  const sim::Scenario sc = sim::parse_scenario_text(read_file(dir / "scenario.txt"));
  const LoggedTrack track = parse_navlog(read_file(dir / "navlog.csv"));
  const mapping::GlobalInfoMap global = parse_global_map(read_file(dir / "global_map.txt"));
  write_file(dir / "topdown.svg", topdown_svg(sc, global, track));
  write_file(dir / "timeseries.svg", timeseries_svg(track));
}

}  // namespace quadnav::io
