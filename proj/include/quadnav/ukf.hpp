#pragma once

#include <Eigen/Core>

#include <vector>

#include "quadnav/geom.hpp"

namespace quadnav::ukf {

inline constexpr int kStateDim = 15;
inline constexpr int kNoiseDim = 12;
inline constexpr double kGravity = 9.81;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateCov = Eigen::Matrix<double, kStateDim, kStateDim>;
using NoiseVector = Eigen::Matrix<double, kNoiseDim, 1>;
using NoiseCov = Eigen::Matrix<double, kNoiseDim, kNoiseDim>;

// Layout of the flat state vector.
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kEuler = 6;
inline constexpr int kAccelBias = 9;
inline constexpr int kGyroBias = 12;

struct NavState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  geom::Euler euler;
  Vec3 accel_bias = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();

  StateVector to_vector() const;
  static NavState from_vector(const StateVector& x);
  Mat3 rotation() const { return geom::euler_to_rot(euler); }
};

struct StateGaussian {
  NavState mean;
  StateCov cov = StateCov::Identity();
};

struct ImuSample {
  Vec3 accel = Vec3::Zero();  // specific force, body frame
  Vec3 gyro = Vec3::Zero();   // body rates
  double stamp = 0.0;
};

// Height sorts before OdomPose so simultaneous measurements apply scalar first.
enum class MeasurementKind { Height = 0, OdomPose = 1 };

struct Measurement {
  MeasurementKind kind = MeasurementKind::Height;
  Eigen::VectorXd value;      // (p, euler) for OdomPose, (z) for Height
  Eigen::MatrixXd noise_cov;  // SPD, matching value dimension
  double stamp = 0.0;

  static Measurement height(double z, double variance, double stamp);
  static Measurement odom_pose(const Vec3& p, const geom::Euler& e,
                               const Eigen::Matrix<double, 6, 6>& cov, double stamp);
};

struct UkfParams {
  NoiseCov process_noise = NoiseCov::Identity() * 1e-4;
  double alpha = 1e-1;
  double beta = 2.0;
  double kappa = 0.0;
  double gate_probability = 0.999;
  bool gate_height = true;
  bool gate_odometry = false;
  double terrain_offset = 0.0;  // assumed floor height for the range sensor
};

struct SigmaPoints {
  Eigen::MatrixXd points;  // one column per sigma point
  Eigen::VectorXd wm;
  Eigen::VectorXd wc;
};

/// Lower-triangular square root S with S S^T = cov. Cholesky, then one retry
/// on the symmetrized matrix with 1e-12 I jitter; throws CovarianceNotPSD.
Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& cov);

/// Unscented transform points around `mean` with scaling `lambda`.
SigmaPoints sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, double lambda,
                         double alpha, double beta);

/// Sigma points of the state augmented with zero-mean noise of covariance
/// `noise_cov`, using lambda = alpha^2 (L + kappa) - L.
SigmaPoints sigma_points(const StateGaussian& g, const Eigen::MatrixXd& noise_cov,
                         const UkfParams& params);

double unscented_lambda(int augmented_dim, const UkfParams& params);

NavState process_model(const NavState& x, const ImuSample& u, const NoiseVector& noise, double dt);

StateGaussian predict(const StateGaussian& g, const ImuSample& u, const UkfParams& params,
                      double dt);

struct UpdateResult {
  StateGaussian posterior;
  Eigen::VectorXd innovation;
  double mahalanobis2 = 0.0;
  bool gated = false;
};

UpdateResult update(const StateGaussian& g, const Measurement& y, const UkfParams& params);

/// Chi-square quantile used as the innovation gate.
double gate_threshold(double probability, int dof);

// Single-threaded filter: IMU drives prediction, queued measurements are
// applied in (stamp, kind) order when flushed.
class Filter {
 public:
  Filter(StateGaussian initial, UkfParams params);

  void predict(const ImuSample& u);
  void push(Measurement y);
  /// Applies every queued measurement with stamp <= `until`.
  std::vector<UpdateResult> flush(double until);

  const StateGaussian& state() const { return state_; }
  const UkfParams& params() const { return params_; }
  double stamp() const { return stamp_; }

 private:
  StateGaussian state_;
  UkfParams params_;
  double stamp_ = 0.0;
  bool have_stamp_ = false;
  std::vector<Measurement> queue_;
};

}  // namespace quadnav::ukf
