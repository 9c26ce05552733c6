#pragma once

#include <random>

#include "doctest.h"
#include "quadnav/error.hpp"
#include "quadnav/geom.hpp"

namespace quadnav::testing {

template <class F>
ErrorCode thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a quadnav::Error");
  return ErrorCode::Timeout;
}

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return Vec3(n(rng), n(rng), n(rng));
}

inline Mat3 random_rotation(std::mt19937_64& rng, double max_tilt = 1.2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return geom::rot_z(3.0 * u(rng)) * geom::rot_y(max_tilt * u(rng)) * geom::rot_x(max_tilt * u(rng));
}

}  // namespace quadnav::testing
