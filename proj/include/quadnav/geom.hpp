#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

#include "quadnav/error.hpp"

namespace quadnav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace geom {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

// ZYX Euler angles: R = Rz(yaw) * Ry(pitch) * Rx(roll).
template <typename Scalar>
struct EulerZYX {
  Scalar roll{0};
  Scalar pitch{0};
  Scalar yaw{0};

  Vector3<Scalar> as_vector() const { return {roll, pitch, yaw}; }
  static EulerZYX from_vector(const Vector3<Scalar>& v) { return {v.x(), v.y(), v.z()}; }
};

using Euler = EulerZYX<double>;

/// Wraps an angle to (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = 2 * pi;
  a = std::fmod(a, two_pi);
  if (a <= -pi) a += two_pi;
  if (a > pi) a -= two_pi;
  return a;
}

template <typename Scalar>
Matrix3<Scalar> rot_x(Scalar a) {
  Matrix3<Scalar> r;
  const Scalar c = std::cos(a), s = std::sin(a);
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

template <typename Scalar>
Matrix3<Scalar> rot_y(Scalar a) {
  Matrix3<Scalar> r;
  const Scalar c = std::cos(a), s = std::sin(a);
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

template <typename Scalar>
Matrix3<Scalar> rot_z(Scalar a) {
  Matrix3<Scalar> r;
  const Scalar c = std::cos(a), s = std::sin(a);
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

template <typename Scalar>
Matrix3<Scalar> euler_to_rot(const EulerZYX<Scalar>& e) {
  return rot_z(e.yaw) * rot_y(e.pitch) * rot_x(e.roll);
}

template <typename Derived>
EulerZYX<typename Derived::Scalar> rot_to_euler(const Eigen::MatrixBase<Derived>& r) {
  using Scalar = typename Derived::Scalar;
  const Scalar r31 = r(2, 0);
  if (std::abs(r31) >= Scalar(1) - Scalar(1e-9)) {
    throw Error(ErrorCode::GimbalLock, "|R31| too close to 1");
  }
  EulerZYX<Scalar> e;
  e.pitch = std::asin(-r31);
  e.roll = std::atan2(r(2, 1), r(2, 2));
  e.yaw = std::atan2(r(1, 0), r(0, 0));
  return e;
}

template <typename Derived>
Matrix3<typename Derived::Scalar> hat(const Eigen::MatrixBase<Derived>& v) {
  Matrix3<typename Derived::Scalar> m;
  m << 0, -v(2), v(1),
       v(2), 0, -v(0),
       -v(1), v(0), 0;
  return m;
}

/// Inverse of hat. Throws NotSkew if the input is not skew-symmetric.
template <typename Derived>
Vector3<typename Derived::Scalar> vee(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-9)) {
    throw Error(ErrorCode::NotSkew, "matrix is not skew-symmetric");
  }
  return {m(2, 1), m(0, 2), m(1, 0)};
}

/// vee of the skew-symmetric part; total.
template <typename Derived>
Vector3<typename Derived::Scalar> vee_skew_part(const Eigen::MatrixBase<Derived>& m) {
  return {(m(2, 1) - m(1, 2)) / 2, (m(0, 2) - m(2, 0)) / 2, (m(1, 0) - m(0, 1)) / 2};
}

/// Exact exponential map exp([w]x dt) via Rodrigues' formula.
template <typename Derived>
Matrix3<typename Derived::Scalar> rot_exp(const Eigen::MatrixBase<Derived>& w,
                                          typename Derived::Scalar dt) {
  using Scalar = typename Derived::Scalar;
  const Vector3<Scalar> phi = w * dt;
  const Scalar theta = phi.norm();
  const Matrix3<Scalar> k = hat(phi);
  Scalar a, b;
  if (theta < Scalar(1e-6)) {
    // Taylor expansion of sin(t)/t and (1-cos t)/t^2.
    const Scalar t2 = theta * theta;
    a = 1 - t2 / 6 + t2 * t2 / 120;
    b = Scalar(0.5) - t2 / 24 + t2 * t2 / 720;
  } else {
    a = std::sin(theta) / theta;
    b = (1 - std::cos(theta)) / (theta * theta);
  }
  return Matrix3<Scalar>::Identity() + a * k + b * k * k;
}

/// Nearest rotation matrix (polar decomposition via SVD).
Mat3 orthonormalize(const Mat3& r);

template <typename Derived>
bool is_rotation(const Eigen::MatrixBase<Derived>& r, double tol = 1e-9) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace geom
}  // namespace quadnav
