#pragma once

#include <Eigen/Core>

#include <vector>

namespace quadnav::qp {

/// min 1/2 x^T H x + g^T x  s.t.  A_eq x = b_eq,  A_in x <= b_in.
struct Problem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;
};

struct Solution {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda_in;  // >= 0, zero for inactive rows
  Eigen::VectorXd nu_eq;
  std::vector<int> active;
  double objective = 0.0;
  int iterations = 0;
};

struct Options {
  int max_iterations = 0;  // 0: 10 * (n + m_in) + 100
  double feasibility_tol = 1e-9;
};

/// Dense strictly convex QP. Equalities are eliminated through a null-space
/// basis; the reduced problem is solved by the Goldfarb-Idnani dual active
/// set method. Throws Error(Infeasible) or Error(MaxIterations).
Solution solve(const Problem& problem, const Options& options = {});

struct KktResiduals {
  double stationarity = 0.0;
  double primal_eq = 0.0;
  double primal_in = 0.0;  // max(0, max(A_in x - b_in))
  double dual = 0.0;       // max(0, -min(lambda))
  double complementarity = 0.0;
};

KktResiduals kkt_residuals(const Problem& problem, const Solution& sol);

}  // namespace quadnav::qp
