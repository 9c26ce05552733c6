#include "quadnav/ukf.hpp"

#include <Eigen/Cholesky>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>

namespace quadnav::ukf {

namespace {

// Angle-aware weighted mean: angles are averaged as wrapped offsets from the
// central point so that sigma points straddling +-pi average correctly.
Eigen::VectorXd weighted_mean(const Eigen::MatrixXd& pts, const Eigen::VectorXd& wm,
                              int angle_begin, int angle_count) {
  Eigen::VectorXd mean = pts * wm;
  for (int a = angle_begin; a < angle_begin + angle_count; ++a) {
    const double ref = pts(a, 0);
    double acc = 0.0;
    for (int i = 0; i < pts.cols(); ++i) acc += wm(i) * geom::wrap_angle(pts(a, i) - ref);
    mean(a) = geom::wrap_angle(ref + acc);
  }
  return mean;
}

Eigen::MatrixXd deviations(const Eigen::MatrixXd& pts, const Eigen::VectorXd& mean,
                           int angle_begin, int angle_count) {
  Eigen::MatrixXd dev = pts.colwise() - mean;
  for (int a = angle_begin; a < angle_begin + angle_count; ++a) {
    for (int i = 0; i < dev.cols(); ++i) dev(a, i) = geom::wrap_angle(dev(a, i));
  }
  return dev;
}

StateCov symmetrize(const StateCov& p) { return 0.5 * (p + p.transpose()); }

Eigen::VectorXd measure(const MeasurementKind kind, const NavState& x, const UkfParams& params) {
  if (kind == MeasurementKind::Height) {
    Eigen::VectorXd y(1);
    y(0) = x.p.z() - params.terrain_offset;
    return y;
  }
  Eigen::VectorXd y(6);
  y << x.p, x.euler.as_vector();
  return y;
}

int angle_begin_of(MeasurementKind kind) { return kind == MeasurementKind::OdomPose ? 3 : 0; }
int angle_count_of(MeasurementKind kind) { return kind == MeasurementKind::OdomPose ? 3 : 0; }

}  // namespace

StateVector NavState::to_vector() const {
  StateVector x;
  x << p, v, euler.as_vector(), accel_bias, gyro_bias;
  return x;
}

NavState NavState::from_vector(const StateVector& x) {
  NavState s;
  s.p = x.segment<3>(kPos);
  s.v = x.segment<3>(kVel);
  s.euler = geom::Euler::from_vector(x.segment<3>(kEuler));
  s.accel_bias = x.segment<3>(kAccelBias);
  s.gyro_bias = x.segment<3>(kGyroBias);
  return s;
}

Measurement Measurement::height(double z, double variance, double stamp) {
  Measurement m;
  m.kind = MeasurementKind::Height;
  m.value = Eigen::VectorXd::Constant(1, z);
  m.noise_cov = Eigen::MatrixXd::Constant(1, 1, variance);
  m.stamp = stamp;
  return m;
}

Measurement Measurement::odom_pose(const Vec3& p, const geom::Euler& e,
                                   const Eigen::Matrix<double, 6, 6>& cov, double stamp) {
  Measurement m;
  m.kind = MeasurementKind::OdomPose;
  m.value.resize(6);
  m.value << p, e.as_vector();
  m.noise_cov = cov;
  m.stamp = stamp;
  return m;
}

Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose()) +
                              1e-12 * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  llt.compute(sym);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::CovarianceNotPSD, "Cholesky factorization failed after jitter");
  }
  return llt.matrixL();
}

SigmaPoints sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, double lambda,
                         double alpha, double beta) {
  const int l = static_cast<int>(mean.size());
  const double scale = l + lambda;
  const Eigen::MatrixXd root = matrix_sqrt(scale * cov);

  SigmaPoints sp;
  sp.points.resize(l, 2 * l + 1);
  sp.points.col(0) = mean;
  for (int i = 0; i < l; ++i) {
    sp.points.col(1 + i) = mean + root.col(i);
    sp.points.col(1 + l + i) = mean - root.col(i);
  }
  sp.wm = Eigen::VectorXd::Constant(2 * l + 1, 0.5 / scale);
  sp.wc = sp.wm;
  sp.wm(0) = lambda / scale;
  sp.wc(0) = lambda / scale + (1.0 - alpha * alpha + beta);
  return sp;
}

double unscented_lambda(int augmented_dim, const UkfParams& params) {
  return params.alpha * params.alpha * (augmented_dim + params.kappa) - augmented_dim;
}

SigmaPoints sigma_points(const StateGaussian& g, const Eigen::MatrixXd& noise_cov,
                         const UkfParams& params) {
  const int p = static_cast<int>(noise_cov.rows());
  const int l = kStateDim + p;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(l);
  mean.head<kStateDim>() = g.mean.to_vector();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(l, l);
  cov.topLeftCorner<kStateDim, kStateDim>() = g.cov;
  if (p > 0) cov.bottomRightCorner(p, p) = noise_cov;
  return sigma_points(mean, cov, unscented_lambda(l, params), params.alpha, params.beta);
}

NavState process_model(const NavState& x, const ImuSample& u, const NoiseVector& noise, double dt) {
  const Vec3 a = u.accel - x.accel_bias + noise.segment<3>(0);
  const Vec3 w = u.gyro - x.gyro_bias + noise.segment<3>(3);
  const Mat3 r = x.rotation();

  NavState out = x;
  out.p = x.p + x.v * dt;
  out.v = x.v + (r * a - kGravity * Vec3::UnitZ()) * dt;
  out.euler = geom::rot_to_euler(r * geom::rot_exp(w, dt));
  out.accel_bias = x.accel_bias + noise.segment<3>(6) * dt;
  out.gyro_bias = x.gyro_bias + noise.segment<3>(9) * dt;
  return out;
}

StateGaussian predict(const StateGaussian& g, const ImuSample& u, const UkfParams& params,
                      double dt) {
  const SigmaPoints sp = sigma_points(g, params.process_noise, params);
  const int n = static_cast<int>(sp.points.cols());

  Eigen::MatrixXd prop(kStateDim, n);
  for (int i = 0; i < n; ++i) {
    const NavState xi = NavState::from_vector(sp.points.col(i).head<kStateDim>());
    const NoiseVector vi = sp.points.col(i).tail<kNoiseDim>();
    prop.col(i) = process_model(xi, u, vi, dt).to_vector();
  }

  const Eigen::VectorXd mean = weighted_mean(prop, sp.wm, kEuler, 3);
  const Eigen::MatrixXd dev = deviations(prop, mean, kEuler, 3);
  StateCov cov = dev * sp.wc.asDiagonal() * dev.transpose();

  StateGaussian out;
  out.mean = NavState::from_vector(mean);
  out.cov = symmetrize(cov);
  return out;
}

double gate_threshold(double probability, int dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(dist, probability);
}

UpdateResult update(const StateGaussian& g, const Measurement& y, const UkfParams& params) {
  const int m = static_cast<int>(y.value.size());
  const SigmaPoints sp = sigma_points(g, y.noise_cov, params);
  const int n = static_cast<int>(sp.points.cols());
  const int ab = angle_begin_of(y.kind), ac = angle_count_of(y.kind);

  Eigen::MatrixXd xs(kStateDim, n);
  Eigen::MatrixXd ys(m, n);
  for (int i = 0; i < n; ++i) {
    xs.col(i) = sp.points.col(i).head<kStateDim>();
    const NavState xi = NavState::from_vector(xs.col(i));
    ys.col(i) = measure(y.kind, xi, params) + sp.points.col(i).tail(m);
  }

  const Eigen::VectorXd x_mean = g.mean.to_vector();
  const Eigen::VectorXd y_mean = weighted_mean(ys, sp.wm, ab, ac);
  const Eigen::MatrixXd dx = deviations(xs, x_mean, kEuler, 3);
  const Eigen::MatrixXd dy = deviations(ys, y_mean, ab, ac);
  Eigen::MatrixXd pyy = dy * sp.wc.asDiagonal() * dy.transpose();
  pyy = 0.5 * (pyy + pyy.transpose());
  const Eigen::MatrixXd pxy = dx * sp.wc.asDiagonal() * dy.transpose();

  Eigen::VectorXd nu = y.value - y_mean;
  for (int a = ab; a < ab + ac; ++a) nu(a) = geom::wrap_angle(nu(a));

  Eigen::LLT<Eigen::MatrixXd> llt(pyy);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularInnovationCov, "innovation covariance not positive definite");
  }

  UpdateResult res;
  res.innovation = nu;
  res.mahalanobis2 = nu.dot(llt.solve(nu));

  const bool gate_enabled =
      y.kind == MeasurementKind::Height ? params.gate_height : params.gate_odometry;
  if (gate_enabled && res.mahalanobis2 > gate_threshold(params.gate_probability, m)) {
    res.posterior = g;
    res.gated = true;
    return res;
  }

  // K = Pxy Pyy^-1, computed through the factorization.
  const Eigen::MatrixXd k = llt.solve(pxy.transpose()).transpose();
  StateVector x_post = x_mean + k * nu;
  for (int a = kEuler; a < kEuler + 3; ++a) x_post(a) = geom::wrap_angle(x_post(a));

  res.posterior.mean = NavState::from_vector(x_post);
  res.posterior.cov = symmetrize(g.cov - k * pyy * k.transpose());
  return res;
}

Filter::Filter(StateGaussian initial, UkfParams params)
    : state_(std::move(initial)), params_(std::move(params)) {}

void Filter::predict(const ImuSample& u) {
  if (!have_stamp_) {
    stamp_ = u.stamp;
    have_stamp_ = true;
    return;
  }
  const double dt = u.stamp - stamp_;
  if (dt <= 0.0) return;
  state_ = ukf::predict(state_, u, params_, std::min(dt, 0.1));
  stamp_ = u.stamp;
}

void Filter::push(Measurement y) { queue_.push_back(std::move(y)); }

std::vector<UpdateResult> Filter::flush(double until) {
  std::stable_sort(queue_.begin(), queue_.end(), [](const Measurement& a, const Measurement& b) {
    if (a.stamp != b.stamp) return a.stamp < b.stamp;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  std::vector<UpdateResult> results;
  auto it = queue_.begin();
  for (; it != queue_.end() && it->stamp <= until; ++it) {
    UpdateResult r = ukf::update(state_, *it, params_);
    state_ = r.posterior;
    results.push_back(std::move(r));
  }
  queue_.erase(queue_.begin(), it);
  return results;
}

}  // namespace quadnav::ukf
