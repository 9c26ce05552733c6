#include "quadnav/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <limits>

#include "quadnav/error.hpp"

namespace quadnav::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// A normal whose component outside the active span is below this fraction of
// its norm is treated as linearly dependent on the active set.
constexpr double kDependent = 1e-8;

// Dual active-set state for  min 1/2 y^T G y + c^T y  s.t.  N y >= b.
struct DualState {
  Eigen::VectorXd x;
  Eigen::MatrixXd J;  // L^-T rotated so that J^T N_A = [R; 0]
  Eigen::MatrixXd R;
  Eigen::VectorXd u;
  std::vector<int> active;
  int iq = 0;
  double r_norm = 1.0;
};

bool add_constraint(DualState& st, Eigen::VectorXd& d) {
  const int n = static_cast<int>(st.x.size());
  for (int j = n - 1; j >= st.iq + 1; --j) {
    double cc = d(j - 1), ss = d(j);
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    d(j) = 0.0;
    ss /= h;
    cc /= h;
    if (cc < 0.0) {
      cc = -cc;
      ss = -ss;
      d(j - 1) = -h;
    } else {
      d(j - 1) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = 0; k < n; ++k) {
      const double t1 = st.J(k, j - 1), t2 = st.J(k, j);
      st.J(k, j - 1) = t1 * cc + t2 * ss;
      st.J(k, j) = xny * (t1 + st.J(k, j - 1)) - t2;
    }
  }
  ++st.iq;
  st.R.col(st.iq - 1).head(st.iq) = d.head(st.iq);
  if (std::abs(d(st.iq - 1)) <= kDependent * d.head(st.iq).norm()) return false;
  st.r_norm = std::max(st.r_norm, std::abs(d(st.iq - 1)));
  return true;
}

void delete_constraint(DualState& st, int constraint) {
  const int n = static_cast<int>(st.x.size());
  int qq = -1;
  for (int i = 0; i < st.iq; ++i) {
    if (st.active[i] == constraint) {
      qq = i;
      break;
    }
  }
  if (qq < 0) return;
  for (int i = qq; i < st.iq - 1; ++i) {
    st.active[i] = st.active[i + 1];
    st.u(i) = st.u(i + 1);
    st.R.col(i) = st.R.col(i + 1);
  }
  st.active[st.iq - 1] = st.active[st.iq];
  st.u(st.iq - 1) = st.u(st.iq);
  st.active[st.iq] = -1;
  st.u(st.iq) = 0.0;
  st.R.col(st.iq - 1).setZero();
  --st.iq;
  for (int j = qq; j < st.iq; ++j) {
    double cc = st.R(j, j), ss = st.R(j + 1, j);
    const double h = std::hypot(cc, ss);
    if (h == 0.0) continue;
    cc /= h;
    ss /= h;
    st.R(j + 1, j) = 0.0;
    if (cc < 0.0) {
      st.R(j, j) = -h;
      cc = -cc;
      ss = -ss;
    } else {
      st.R(j, j) = h;
    }
    const double xny = ss / (1.0 + cc);
    for (int k = j + 1; k < st.iq; ++k) {
      const double t1 = st.R(j, k), t2 = st.R(j + 1, k);
      st.R(j, k) = t1 * cc + t2 * ss;
      st.R(j + 1, k) = xny * (t1 + st.R(j, k)) - t2;
    }
    for (int k = 0; k < n; ++k) {
      const double t1 = st.J(k, j), t2 = st.J(k, j + 1);
      st.J(k, j) = t1 * cc + t2 * ss;
      st.J(k, j + 1) = xny * (st.J(k, j) + t1) - t2;
    }
  }
}

// Returns the solution y, the multipliers per row of N and the iteration count.
DualState solve_dual(const Eigen::MatrixXd& G, const Eigen::VectorXd& c, const Eigen::MatrixXd& N,
                     const Eigen::VectorXd& b, int max_iter, double tol, int& iterations) {
  const int n = static_cast<int>(G.rows());
  const int m = static_cast<int>(N.rows());

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::Infeasible, "reduced Hessian is not positive definite");
  }
  DualState st;
  st.J = llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
  st.R = Eigen::MatrixXd::Zero(n, n);
  st.u = Eigen::VectorXd::Zero(n + 1);
  st.active.assign(n + 1, -1);
  st.x = -llt.solve(c);

  std::vector<char> is_active(m, 0);
  std::vector<char> excluded(m, 0);
  Eigen::VectorXd d(n), z(n), r(n);
  iterations = 0;

  while (true) {
    // Step 1: pick the most violated inactive constraint.
    int p = -1;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      if (is_active[i] || excluded[i]) continue;
      const double s = N.row(i).dot(st.x) - b(i);
      const double scale = tol * (1.0 + std::abs(b(i)));
      if (s < -scale && s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) break;

    const DualState snapshot = st;
    const Eigen::VectorXd np = N.row(p).transpose();
    double sp = worst;
    st.u(st.iq) = 0.0;

    while (true) {
      if (++iterations > max_iter) throw Error(ErrorCode::MaxIterations, "QP iteration limit");
      d = st.J.transpose() * np;
      z = st.J.rightCols(n - st.iq) * d.tail(n - st.iq);
      if (st.iq > 0) {
        r.head(st.iq) = st.R.topLeftCorner(st.iq, st.iq)
                            .triangularView<Eigen::Upper>()
                            .solve(d.head(st.iq));
      }

      double t1 = kInf;
      int l = -1;
      for (int k = 0; k < st.iq; ++k) {
        if (r(k) > 0.0 && st.u(k) / r(k) < t1) {
          t1 = st.u(k) / r(k);
          l = st.active[k];
        }
      }
      double t2 = kInf;
      const double zn = z.dot(np);
      if (d.tail(n - st.iq).norm() > kDependent * d.norm() && zn > 0.0) t2 = -sp / zn;

      const double t = std::min(t1, t2);
      if (t == kInf) throw Error(ErrorCode::Infeasible, "inequality constraints are infeasible");

      if (t2 == kInf) {
        st.u.head(st.iq) -= t * r.head(st.iq);
        st.u(st.iq) += t;
        is_active[l] = 0;
        delete_constraint(st, l);
        continue;
      }

      st.x += t * z;
      st.u.head(st.iq) -= t * r.head(st.iq);
      st.u(st.iq) += t;

      if (t == t2) {
        const double u_new = st.u(st.iq);
        if (!add_constraint(st, d)) {
          // Dependent on the active set: skip it and restart from the snapshot.
          for (int k = 0; k < m; ++k) is_active[k] = 0;
          st = snapshot;
          for (int k = 0; k < st.iq; ++k) is_active[st.active[k]] = 1;
          excluded[p] = 1;
          break;
        }
        st.active[st.iq - 1] = p;
        st.u(st.iq - 1) = u_new;
        is_active[p] = 1;
        std::fill(excluded.begin(), excluded.end(), 0);
        break;
      }

      is_active[l] = 0;
      delete_constraint(st, l);
      sp = np.dot(st.x) - b(p);
    }
  }
  return st;
}

}  // namespace

Solution solve(const Problem& pr, const Options& options) {
  const int n = static_cast<int>(pr.H.rows());
  const int m_eq = static_cast<int>(pr.A_eq.rows());
  const int m_in = static_cast<int>(pr.A_in.rows());
  const int max_iter =
      options.max_iterations > 0 ? options.max_iterations : 10 * (n + m_in) + 100;

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_eq;
  if (m_eq > 0) {
    qr_eq.compute(pr.A_eq.transpose());
    const int rank = static_cast<int>(qr_eq.rank());
    const Eigen::MatrixXd Q = qr_eq.householderQ();
    Z = Q.rightCols(n - rank);
    x0 = pr.A_eq.completeOrthogonalDecomposition().solve(pr.b_eq);
    const double res = (pr.A_eq * x0 - pr.b_eq).norm();
    if (res > 1e-7 * (1.0 + pr.b_eq.norm())) {
      throw Error(ErrorCode::Infeasible, "equality constraints are inconsistent");
    }
  }

  // Unit-norm inequality rows; multipliers are scaled back afterwards.
  Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(m_in);
  for (int i = 0; i < m_in; ++i) {
    const double nrm = pr.A_in.row(i).norm();
    if (nrm > 0.0) row_scale(i) = 1.0 / nrm;
  }
  const Eigen::MatrixXd A_in = row_scale.asDiagonal() * pr.A_in;
  const Eigen::VectorXd b_in = row_scale.cwiseProduct(pr.b_in);

  const Eigen::MatrixXd G = Z.transpose() * pr.H * Z;
  const Eigen::VectorXd c = Z.transpose() * (pr.H * x0 + pr.g);
  // A_in (x0 + Z y) <= b_in  <=>  (-A_in Z) y >= A_in x0 - b_in
  const Eigen::MatrixXd N = -(A_in * Z);
  const Eigen::VectorXd bn = m_in > 0 ? Eigen::VectorXd(A_in * x0 - b_in) : Eigen::VectorXd(0);

  Solution sol;
  sol.lambda_in = Eigen::VectorXd::Zero(m_in);
  if (Z.cols() == 0) {
    sol.x = x0;
    if (m_in > 0 && (pr.A_in * x0 - pr.b_in).maxCoeff() > options.feasibility_tol) {
      throw Error(ErrorCode::Infeasible, "equality solution violates inequalities");
    }
  } else {
    int iterations = 0;
    const DualState st =
        solve_dual(G, c, N, bn, max_iter, options.feasibility_tol, iterations);
    sol.x = x0 + Z * st.x;
    sol.iterations = iterations;
    for (int k = 0; k < st.iq; ++k) {
      sol.lambda_in(st.active[k]) = st.u(k) * row_scale(st.active[k]);
      sol.active.push_back(st.active[k]);
    }
  }

  sol.objective = 0.5 * sol.x.dot(pr.H * sol.x) + pr.g.dot(sol.x);
  sol.nu_eq = Eigen::VectorXd::Zero(m_eq);
  if (m_eq > 0) {
    Eigen::VectorXd grad = pr.H * sol.x + pr.g;
    if (m_in > 0) grad += pr.A_in.transpose() * sol.lambda_in;
    sol.nu_eq = pr.A_eq.transpose().completeOrthogonalDecomposition().solve(-grad);
  }
  return sol;
}

KktResiduals kkt_residuals(const Problem& pr, const Solution& sol) {
  KktResiduals k;
  Eigen::VectorXd grad = pr.H * sol.x + pr.g;
  if (pr.A_in.rows() > 0) grad += pr.A_in.transpose() * sol.lambda_in;
  if (pr.A_eq.rows() > 0) grad += pr.A_eq.transpose() * sol.nu_eq;
  k.stationarity = grad.lpNorm<Eigen::Infinity>();
  if (pr.A_eq.rows() > 0) k.primal_eq = (pr.A_eq * sol.x - pr.b_eq).lpNorm<Eigen::Infinity>();
  if (pr.A_in.rows() > 0) {
    const Eigen::VectorXd slack = pr.A_in * sol.x - pr.b_in;
    k.primal_in = std::max(0.0, slack.maxCoeff());
    k.dual = std::max(0.0, -sol.lambda_in.minCoeff());
    k.complementarity = (slack.cwiseProduct(sol.lambda_in)).lpNorm<Eigen::Infinity>();
  }
  return k;
}

}  // namespace quadnav::qp
