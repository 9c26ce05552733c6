#include <oracles.hpp>

#include "quadnav/qp.hpp"
#include "support.hpp"

using namespace quadnav;
using quadnav::testing::thrown_code;

namespace {

qp::Problem random_problem(std::mt19937_64& rng, int n, int m_eq, int m_in) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = n01(rng);
  qp::Problem pr;
  pr.H = M * M.transpose() + Eigen::MatrixXd::Identity(n, n);
  pr.g.resize(n);
  for (int i = 0; i < n; ++i) pr.g(i) = 5.0 * n01(rng);
  pr.A_eq.resize(m_eq, n);
  pr.b_eq.resize(m_eq);
  for (int i = 0; i < m_eq; ++i) {
    for (int j = 0; j < n; ++j) pr.A_eq(i, j) = n01(rng);
    pr.b_eq(i) = 0.1 * n01(rng);
  }
  pr.A_in.resize(m_in, n);
  pr.b_in.resize(m_in);
  for (int i = 0; i < m_in; ++i) {
    for (int j = 0; j < n; ++j) pr.A_in(i, j) = n01(rng);
    pr.b_in(i) = std::abs(n01(rng));
  }
  return pr;
}

}  // namespace

TEST_CASE("qp matches brute-force active-set enumeration") {
  std::mt19937_64 rng(7);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int m_eq = trial % 3 == 0 ? 1 : 0;
    const qp::Problem pr = random_problem(rng, 4, m_eq, 8);
    const auto ref = oracle::brute_force_qp(pr);
    if (!ref) {
      CHECK(thrown_code([&] { qp::solve(pr); }) == ErrorCode::Infeasible);
      continue;
    }
    const qp::Solution sol = qp::solve(pr);
    CHECK((sol.x - *ref).norm() < 1e-7);
    const qp::KktResiduals k = qp::kkt_residuals(pr, sol);
    CHECK(k.stationarity < 1e-8);
    CHECK(k.primal_in < 1e-9);
    CHECK(k.dual == 0.0);
    CHECK(k.complementarity < 1e-8);
    ++compared;
  }
  CHECK(compared > 100);
}

TEST_CASE("equality-only qp matches the dense KKT system") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const qp::Problem pr = random_problem(rng, 12, 5, 0);
    const qp::Solution sol = qp::solve(pr);
    const Eigen::VectorXd ref = oracle::dense_kkt(pr.H, pr.g, pr.A_eq, pr.b_eq);
    CHECK((sol.x - ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(qp::kkt_residuals(pr, sol).stationarity < 1e-9);
  }
}

TEST_CASE("duplicate and redundant constraints are tolerated") {
  qp::Problem pr;
  pr.H = Eigen::MatrixXd::Identity(2, 2);
  pr.g = Eigen::Vector2d(-2.0, -2.0);
  pr.A_in.resize(4, 2);
  pr.A_in << 1, 0, 1, 0, 2, 0, 0, 1;
  pr.b_in = Eigen::Vector4d(1.0, 1.0, 2.0, 0.5);
  const qp::Solution sol = qp::solve(pr);
  CHECK((sol.x - Eigen::Vector2d(1.0, 0.5)).norm() < 1e-12);
}

TEST_CASE("qp error cases") {
  qp::Problem pr;
  pr.H = Eigen::MatrixXd::Identity(2, 2);
  pr.g = Eigen::Vector2d::Zero();
  pr.A_in.resize(2, 2);
  pr.A_in << 1, 0, -1, 0;
  pr.b_in = Eigen::Vector2d(-1.0, -1.0);  // x <= -1 and x >= 1
  CHECK(thrown_code([&] { qp::solve(pr); }) == ErrorCode::Infeasible);

  qp::Problem eq;
  eq.H = Eigen::MatrixXd::Identity(2, 2);
  eq.g = Eigen::Vector2d::Zero();
  eq.A_eq.resize(2, 2);
  eq.A_eq << 1, 1, 1, 1;
  eq.b_eq = Eigen::Vector2d(1.0, 2.0);
  CHECK(thrown_code([&] { qp::solve(eq); }) == ErrorCode::Infeasible);

  qp::Problem flat;
  flat.H = Eigen::MatrixXd::Zero(2, 2);
  flat.g = Eigen::Vector2d(1.0, 0.0);
  CHECK(thrown_code([&] { qp::solve(flat); }) == ErrorCode::Infeasible);

  qp::Problem two;
  two.H = Eigen::MatrixXd::Identity(2, 2);
  two.g = Eigen::Vector2d::Zero();
  two.A_in = -Eigen::MatrixXd::Identity(2, 2);
  two.b_in = Eigen::Vector2d(-1.0, -1.0);
  qp::Options opt;
  opt.max_iterations = 1;
  CHECK(thrown_code([&] { qp::solve(two, opt); }) == ErrorCode::MaxIterations);
  CHECK((qp::solve(two).x - Eigen::Vector2d(1.0, 1.0)).norm() < 1e-12);
}
