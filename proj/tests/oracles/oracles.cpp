#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <set>

namespace quadnav::oracle {

Quadrature gauss_legendre(int n) {
  Quadrature q;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 0 ? 1.0 : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes.push_back(0.5 * (x + 1.0));
    q.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
  }
  return q;
}

double shifted_legendre(int i, double s) {
  const double x = 2.0 * s - 1.0;
  if (i == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= i; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double poly_derivative(const Eigen::VectorXd& coeffs, int k, double s) {
  double out = 0.0;
  for (int c = k; c < coeffs.size(); ++c) {
    double f = 1.0;
    for (int r = 0; r < k; ++r) f *= c - r;
    out += coeffs(c) * f * std::pow(s, c - k);
  }
  return out;
}

Eigen::VectorXd dense_kkt(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                          const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(H.rows());
  const int m = static_cast<int>(A.rows());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  Eigen::VectorXd r(n + m);
  K.topLeftCorner(n, n) = H;
  K.topRightCorner(n, m) = A.transpose();
  K.bottomLeftCorner(m, n) = A;
  r << -g, b;
  return K.fullPivLu().solve(r).head(n);
}

std::optional<Eigen::VectorXd> brute_force_qp(const qp::Problem& pr, double tol) {
  const int n = static_cast<int>(pr.H.rows());
  const int me = static_cast<int>(pr.A_eq.rows());
  const int mi = static_cast<int>(pr.A_in.rows());
  double best = std::numeric_limits<double>::infinity();
  std::optional<Eigen::VectorXd> out;
  for (long mask = 0; mask < (1L << mi); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < mi; ++i)
      if ((mask >> i) & 1) act.push_back(i);
    const int k = static_cast<int>(act.size());
    if (me + k > n) continue;
    Eigen::MatrixXd A(me + k, n);
    Eigen::VectorXd b(me + k);
    if (me > 0) {
      A.topRows(me) = pr.A_eq;
      b.head(me) = pr.b_eq;
    }
    for (int a = 0; a < k; ++a) {
      A.row(me + a) = pr.A_in.row(act[a]);
      b(me + a) = pr.b_in(act[a]);
    }
    const Eigen::VectorXd x = dense_kkt(pr.H, pr.g, A, b);
    if (me > 0 && (pr.A_eq * x - pr.b_eq).cwiseAbs().maxCoeff() > 1e-7) continue;
    if (mi > 0 && (pr.A_in * x - pr.b_in).maxCoeff() > tol) continue;
    const double f = 0.5 * x.dot(pr.H * x) + pr.g.dot(x);
    if (f < best) {
      best = f;
      out = x;
    }
  }
  return out;
}

double dijkstra(const planner::HybridGraph& g, int s, int t) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.node_count(), inf);
  std::vector<char> done(g.node_count(), 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[s] = 0.0;
  open.push({0.0, s});
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == t) return d;
    for (const planner::Edge& e : g.neighbors(u)) {
      const double nd = d + e.cost;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        open.push({nd, e.to});
      }
    }
  }
  return dist[t];
}

std::vector<char> brute_dilation(const mapping::LocalVoxelMap& map, double radius) {
  std::vector<Vec3> occ;
  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    if (map.cells()[i] == mapping::Cell::Occupied) occ.push_back(map.cell_center(map.unlinear(i)));
  }
  std::vector<char> out(map.cell_count(), 0);
  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    const Vec3 c = map.cell_center(map.unlinear(i));
    for (const Vec3& o : occ) {
      if ((c - o).norm() <= radius) {
        out[i] = 1;
        break;
      }
    }
  }
  return out;
}

std::vector<mapping::Index3> sampled_cells(const mapping::LocalVoxelMap& map, const Vec3& a,
                                           const Vec3& b, int samples) {
  std::set<std::tuple<int, int, int>> seen;
  std::vector<mapping::Index3> out;
  for (int i = 0; i <= samples; ++i) {
    const Vec3 p = a + (b - a) * (static_cast<double>(i) / samples);
    const mapping::Index3 idx = map.index_of(p);
    if (seen.insert({idx.x(), idx.y(), idx.z()}).second) out.push_back(idx);
  }
  return out;
}

Gaussian kf_predict(const Gaussian& g, const Eigen::MatrixXd& F, const Eigen::VectorXd& u,
                    const Eigen::MatrixXd& Q) {
  Gaussian out;
  out.x = F * g.x + u;
  out.P = F * g.P * F.transpose() + Q;
  return out;
}

Gaussian kf_update(const Gaussian& g, const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                   const Eigen::VectorXd& z) {
  const Eigen::MatrixXd S = H * g.P * H.transpose() + R;
  const Eigen::MatrixXd K = g.P * H.transpose() * S.inverse();
  Gaussian out;
  out.x = g.x + K * (z - H * g.x);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(g.x.size(), g.x.size());
  out.P = (I - K * H) * g.P * (I - K * H).transpose() + K * R * K.transpose();
  return out;
}

double grid_bayes_depth_mean(const DepthPrior& prior, const std::vector<double>& rho,
                             const std::vector<double>& tau2, int rho_cells, int ratio_cells) {
  const double span = prior.rho_max - prior.rho_min;
  const double u = 1.0 / span;
  // log posterior on cell centres
  Eigen::MatrixXd logp(rho_cells, ratio_cells);
  for (int i = 0; i < rho_cells; ++i) {
    const double r = prior.rho_min + (i + 0.5) * span / rho_cells;
    for (int k = 0; k < ratio_cells; ++k) {
      const double gam = (k + 0.5) / ratio_cells;
      double lp = -0.5 * (r - prior.mu) * (r - prior.mu) / prior.sigma2 +
                  (prior.a - 1.0) * std::log(gam) + (prior.b - 1.0) * std::log(1.0 - gam);
      for (std::size_t m = 0; m < rho.size(); ++m) {
        const double d = rho[m] - r;
        const double inl =
            std::exp(-0.5 * d * d / tau2[m]) / std::sqrt(2.0 * std::numbers::pi * tau2[m]);
        lp += std::log(gam * inl + (1.0 - gam) * u);
      }
      logp(i, k) = lp;
    }
  }
  const double top = logp.maxCoeff();
  double mass = 0.0, first = 0.0;
  for (int i = 0; i < rho_cells; ++i) {
    const double r = prior.rho_min + (i + 0.5) * span / rho_cells;
    for (int k = 0; k < ratio_cells; ++k) {
      const double w = std::exp(logp(i, k) - top);
      mass += w;
      first += w * r;
    }
  }
  return first / mass;
}

double distance_to_polyline(const Vec3& p, const std::vector<Vec3>& line) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec3 d = line[i + 1] - line[i];
    const double t = std::clamp((p - line[i]).dot(d) / d.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (p - (line[i] + t * d)).norm());
  }
  return best;
}

}  // namespace quadnav::oracle
