#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "quadnav/mapping.hpp"
#include "quadnav/nav.hpp"

namespace quadnav::io {

std::string navlog_csv(const sim::NavLog& log);
std::string replans_csv(const sim::NavLog& log);
std::string path_csv(const planner::PathPolyline& raw, const planner::PathPolyline& modified);
std::string corridor_csv(const corridor::SafeCorridor& c);
/// Samples the trajectory every `step` seconds (plus the end point).
std::string trajectory_csv(const trajopt::SplineTrajectory& tr, double t0, double step = 0.02);
/// Wall-clock figures included; not deterministic.
std::string metrics_text(const sim::Metrics& m);

/// Header lines followed by run-length tokens such as "120U 3F 1O".
std::string local_map_text(const mapping::LocalVoxelMap& map);
std::string global_map_text(const mapping::GlobalInfoMap& map);
mapping::GlobalInfoMap parse_global_map(const std::string& text);

/// Writes every run artifact into `dir` (created if needed).
void write_run(const sim::RunResult& run, const std::filesystem::path& dir);

/// Logged trajectory columns needed for plotting.
struct LoggedTrack {
  std::vector<double> t;
  std::vector<Vec3> p_true, p_est, p_des, v_true;
};
LoggedTrack parse_navlog(const std::string& csv);

std::string topdown_svg(const sim::Scenario& sc, const mapping::GlobalInfoMap& global,
                        const LoggedTrack& track);
std::string timeseries_svg(const LoggedTrack& track);

/// Reads scenario.txt, navlog.csv and global_map.txt from `dir` and writes
/// topdown.svg and timeseries.svg there. Throws Error(MissingLog).
void plot_run(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace quadnav::io
