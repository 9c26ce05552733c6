#include "fixtures.hpp"

#include <cmath>

namespace quadnav::fixture {

CorridorInstance random_corridor(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> len(1.0, 3.0), pad(0.4, 1.0);
  CorridorInstance inst;
  inst.limits = trajopt::DynLimits{6.0, 12.0, 60.0};
  inst.path.waypoints.push_back(Vec3::Zero());
  Vec3 heading = Vec3::UnitX();
  for (int j = 0; j < m; ++j) {
    heading = (heading + 0.8 * Vec3(n01(rng), n01(rng), 0.3 * n01(rng))).normalized();
    inst.path.waypoints.push_back(inst.path.waypoints.back() + len(rng) * heading);
  }
  inst.path.local_count = inst.path.waypoints.size();
  for (int j = 0; j < m; ++j) {
    const Vec3& a = inst.path.waypoints[j];
    const Vec3& b = inst.path.waypoints[j + 1];
    corridor::Polyhedron p;
    const double r = pad(rng);
    for (int k = 0; k < 3; ++k) {
      p.faces.push_back({Vec3::Unit(k), std::max(a(k), b(k)) + r});
      p.faces.push_back({-Vec3::Unit(k), -(std::min(a(k), b(k)) - r)});
    }
    for (int f = 0; f < 3; ++f) {
      const Vec3 nrm = Vec3(n01(rng), n01(rng), n01(rng)).normalized();
      p.faces.push_back({nrm, std::max(nrm.dot(a), nrm.dot(b)) + 0.3});
    }
    inst.corridor.polyhedra.push_back(std::move(p));
  }
  inst.durations = trajopt::allocate_times(inst.path, trajopt::DynLimits{2.0, 2.0, 10.0});
  inst.start = trajopt::BoundaryState::rest(inst.path.waypoints.front());
  inst.goal = trajopt::BoundaryState::rest(inst.path.waypoints.back());
  return inst;
}

qp::Problem corridor_qp(const CorridorInstance& inst, double eps, int samples) {
  std::vector<trajopt::SegmentLine> lines;
  std::vector<const corridor::Polyhedron*> polys;
  for (std::size_t j = 0; j + 1 < inst.path.waypoints.size(); ++j) {
    lines.emplace_back(inst.path.waypoints[j], inst.path.waypoints[j + 1]);
    polys.push_back(&inst.corridor.polyhedra[j]);
  }
  const trajopt::QuadraticCost cost = trajopt::assemble_cost(inst.durations, lines, eps, samples);
  qp::Problem pr;
  pr.H = 2.0 * cost.Q;
  pr.g = cost.c;
  trajopt::assemble_constraints(inst.durations, inst.start, inst.goal, polys, inst.limits, samples,
                                pr);
  return pr;
}

Vec3 segment_derivative(const trajopt::SplineTrajectory& tr, std::size_t j, int q, double s) {
  Vec3 out = tr.coeffs[j].transpose() * trajopt::basis().row(q, s) * std::pow(tr.durations[j], -q);
  if (q == 0) out += tr.origin;
  return out;
}

}  // namespace quadnav::fixture
