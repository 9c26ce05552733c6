#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "quadnav/mapping.hpp"
#include "quadnav/planner.hpp"
#include "quadnav/qp.hpp"

// Independent reference implementations used to check the library.
namespace quadnav::oracle {

struct Quadrature {
  std::vector<double> nodes;  // on [0, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [0, 1] (Newton on the recurrence).
Quadrature gauss_legendre(int n);

/// Shifted Legendre polynomial of degree i on [0, 1] by Bonnet's recurrence.
double shifted_legendre(int i, double s);

/// k-th derivative of the monomial polynomial sum_c coeffs(c) s^c.
double poly_derivative(const Eigen::VectorXd& coeffs, int k, double s);

/// Solves [H A^T; A 0] [x; nu] = [-g; b] densely and returns x.
Eigen::VectorXd dense_kkt(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                          const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Minimum of a small strictly convex QP by enumerating every active set.
std::optional<Eigen::VectorXd> brute_force_qp(const qp::Problem& pr, double tol = 1e-9);

/// Plain Dijkstra over the graph's adjacency; +inf if t is unreachable.
double dijkstra(const planner::HybridGraph& g, int s, int t);

/// Every cell within `radius` of some Occupied cell centre, by pairwise check.
std::vector<char> brute_dilation(const mapping::LocalVoxelMap& map, double radius);

/// Cells touched by densely sampling the segment from a to b.
std::vector<mapping::Index3> sampled_cells(const mapping::LocalVoxelMap& map, const Vec3& a,
                                           const Vec3& b, int samples = 20000);

struct Gaussian {
  Eigen::VectorXd x;
  Eigen::MatrixXd P;
};

Gaussian kf_predict(const Gaussian& g, const Eigen::MatrixXd& F, const Eigen::VectorXd& u,
                    const Eigen::MatrixXd& Q);
Gaussian kf_update(const Gaussian& g, const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                   const Eigen::VectorXd& z);

struct DepthPrior {
  double mu = 0.0;
  double sigma2 = 1.0;
  double a = 10.0;
  double b = 10.0;
  double rho_min = 0.0;
  double rho_max = 1.0;
};

/// Posterior mean of inverse depth on an (rho, inlier ratio) grid, with the
/// Gaussian prior restricted to the support and renormalized.
double grid_bayes_depth_mean(const DepthPrior& prior, const std::vector<double>& rho,
                             const std::vector<double>& tau2, int rho_cells = 400,
                             int ratio_cells = 100);

double distance_to_polyline(const Vec3& p, const std::vector<Vec3>& line);

}  // namespace quadnav::oracle
