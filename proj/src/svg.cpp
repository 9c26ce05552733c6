#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "quadnav/artifacts.hpp"

namespace quadnav::io {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const char* color,
                     double width, const char* extra = "") {
  std::string out = "<polyline fill=\"none\" stroke=\"";
  out += color;
  out += "\" stroke-width=\"" + num(width) + "\" " + extra + " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += num(pts[i].first) + ',' + num(pts[i].second);
  }
  out += "\"/>\n";
  return out;
}

}  // namespace

std::string topdown_svg(const sim::Scenario& sc, const mapping::GlobalInfoMap& global,
                        const LoggedTrack& track) {
  constexpr double kScale = 10.0;  // px per metre
  const Eigen::Vector2d lo = global.origin();
  const Eigen::Vector2d ext = global.size().cast<double>() * global.resolution();
  const double W = ext.x() * kScale, H = ext.y() * kScale;
  auto X = [&](double x) { return (x - lo.x()) * kScale; };
  auto Y = [&](double y) { return H - (y - lo.y()) * kScale; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) +
                    "\" height=\"" + num(H) + "\" viewBox=\"0 0 " + num(W) + ' ' + num(H) +
                    "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" fill=\"white\"/>\n";

  const double r = global.resolution() * kScale;
  out += "<g stroke=\"none\">\n";
  for (int j = 0; j < global.size().y(); ++j) {
    for (int i = 0; i < global.size().x(); ++i) {
      const mapping::InfoCell c = global.at(mapping::Index2(i, j));
      if (c == mapping::InfoCell::Unknown) continue;
      const Eigen::Vector2d p = lo + Eigen::Vector2d(i, j + 1) * global.resolution();
      out += "<rect x=\"" + num(X(p.x())) + "\" y=\"" + num(Y(p.y())) + "\" width=\"" + num(r) +
             "\" height=\"" + num(r) + "\" fill=\"" +
             (c == mapping::InfoCell::Wall ? "#888888" : "#dddddd") + "\"/>\n";
    }
  }
  out += "</g>\n";

  // True layout: boxes that cut the flight altitude band.
  const double z = sc.start.z();
  out += "<g fill=\"none\" stroke=\"black\" stroke-width=\"1\">\n";
  for (const sim::Aabb& b : sc.world.boxes) {
    if (b.lo.z() > z + 0.5 || b.hi.z() < z - 0.5) continue;
    out += "<rect x=\"" + num(X(b.lo.x())) + "\" y=\"" + num(Y(b.hi.y())) + "\" width=\"" +
           num((b.hi.x() - b.lo.x()) * kScale) + "\" height=\"" +
           num((b.hi.y() - b.lo.y()) * kScale) + "\"/>\n";
  }
  out += "</g>\n";

  std::vector<std::pair<double, double>> truth, est;
  for (std::size_t i = 0; i < track.t.size(); i += 4) {
    truth.emplace_back(X(track.p_true[i].x()), Y(track.p_true[i].y()));
    est.emplace_back(X(track.p_est[i].x()), Y(track.p_est[i].y()));
  }
  if (!track.t.empty()) {
    truth.emplace_back(X(track.p_true.back().x()), Y(track.p_true.back().y()));
    est.emplace_back(X(track.p_est.back().x()), Y(track.p_est.back().y()));
  }
  out += polyline(est, "#e08000", 1.5, "stroke-dasharray=\"4,3\"");
  out += polyline(truth, "#1060d0", 2.0);

  const Vec3 g = sc.goal();
  out += "<circle cx=\"" + num(X(sc.start.x())) + "\" cy=\"" + num(Y(sc.start.y())) +
         "\" r=\"4\" fill=\"#20a020\"/>\n";
  out += "<circle cx=\"" + num(X(g.x())) + "\" cy=\"" + num(Y(g.y())) +
         "\" r=\"4\" fill=\"#d02020\"/>\n";
  out += "</svg>\n";
  return out;
}

std::string timeseries_svg(const LoggedTrack& track) {
  constexpr double W = 800.0, PH = 150.0, M = 40.0;
  const char* labels[] = {"x [m]", "y [m]", "z [m]", "speed [m/s]"};
  const int panels = 4;
  const double H = panels * (PH + M) + M;
  const double t_end = track.t.empty() ? 1.0 : std::max(track.t.back(), 1e-3);

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W + 2 * M) +
                    "\" height=\"" + num(H) + "\" viewBox=\"0 0 " + num(W + 2 * M) + ' ' +
                    num(H) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(W + 2 * M) + "\" height=\"" + num(H) +
         "\" fill=\"white\"/>\n";

  for (int k = 0; k < panels; ++k) {
    auto value = [&](std::size_t i, bool desired) {
      if (k < 3) return desired ? track.p_des[i](k) : track.p_true[i](k);
      return track.v_true[i].norm();
    };
    double vmin = 0.0, vmax = 1.0;
    if (!track.t.empty()) {
      vmin = vmax = value(0, false);
      for (std::size_t i = 0; i < track.t.size(); ++i) {
        for (bool d : {false, true}) {
          if (k == 3 && d) continue;
          vmin = std::min(vmin, value(i, d));
          vmax = std::max(vmax, value(i, d));
        }
      }
      if (vmax - vmin < 1e-6) {
        vmin -= 0.5;
        vmax += 0.5;
      }
    }
    const double top = M + k * (PH + M);
    auto X = [&](double t) { return M + W * t / t_end; };
    auto Y = [&](double v) { return top + PH * (1.0 - (v - vmin) / (vmax - vmin)); };

    out += "<rect x=\"" + num(M) + "\" y=\"" + num(top) + "\" width=\"" + num(W) +
           "\" height=\"" + num(PH) + "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(M) + "\" y=\"" + num(top - 6) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + labels[k] + "  [" + num(vmin) +
           ", " + num(vmax) + "]</text>\n";
    std::vector<std::pair<double, double>> real, des;
    for (std::size_t i = 0; i < track.t.size(); i += 4) {
      real.emplace_back(X(track.t[i]), Y(value(i, false)));
      if (k < 3) des.emplace_back(X(track.t[i]), Y(value(i, true)));
    }
    if (k < 3) out += polyline(des, "#999999", 1.0, "stroke-dasharray=\"3,2\"");
    out += polyline(real, "#1060d0", 1.5);
  }
  out += "<text x=\"" + num(M + W) + "\" y=\"" + num(H - 10) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">t [s], end " +
         num(t_end) + "</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace quadnav::io
