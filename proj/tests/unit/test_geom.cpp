#include "support.hpp"

using namespace quadnav;
using quadnav::testing::random_rotation;
using quadnav::testing::random_vec;
using quadnav::testing::thrown_code;

TEST_CASE("euler round trip away from gimbal lock") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = random_rotation(rng);
    const geom::Euler e = geom::rot_to_euler(r);
    CHECK((geom::euler_to_rot(e) - r).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("euler extraction rejects gimbal lock") {
  CHECK(thrown_code([] { geom::rot_to_euler(geom::rot_y(std::numbers::pi / 2)); }) ==
        ErrorCode::GimbalLock);
}

TEST_CASE("hat and vee are inverse") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const Vec3 v = random_vec(rng);
    const Vec3 w = random_vec(rng);
    CHECK((geom::vee(geom::hat(v)) - v).norm() < 1e-15);
    CHECK((geom::hat(v) * w - v.cross(w)).norm() < 1e-12);
  }
  CHECK(thrown_code([] { geom::vee(Mat3::Identity()); }) == ErrorCode::NotSkew);
}

TEST_CASE("rodrigues exponential matches the eigen angle-axis rotation") {
  std::mt19937_64 rng(3);
  for (double scale : {1e-9, 1e-7, 1e-3, 1.0, 3.0}) {
    const Vec3 w = random_vec(rng, scale);
    const double dt = 0.7;
    const Mat3 ref = w.norm() > 0
                         ? Eigen::AngleAxisd(w.norm() * dt, w.normalized()).toRotationMatrix()
                         : Mat3::Identity();
    const Mat3 r = geom::rot_exp(w, dt);
    CHECK((r - ref).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(geom::is_rotation(r));
  }
}

TEST_CASE("wrap angle lands in (-pi, pi]") {
  const double pi = std::numbers::pi;
  CHECK(geom::wrap_angle(pi) == doctest::Approx(pi));
  CHECK(geom::wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(geom::wrap_angle(3 * pi + 0.25) == doctest::Approx(-pi + 0.25));
  CHECK(geom::wrap_angle(-0.5) == doctest::Approx(-0.5));
}

TEST_CASE("orthonormalize restores a perturbed rotation") {
  std::mt19937_64 rng(4);
  const Mat3 r = random_rotation(rng);
  Mat3 noisy = r;
  noisy(0, 1) += 1e-4;
  noisy(2, 2) -= 2e-4;
  const Mat3 fixed = geom::orthonormalize(noisy);
  CHECK(geom::is_rotation(fixed, 1e-12));
  CHECK((fixed - r).cwiseAbs().maxCoeff() < 5e-4);
}
