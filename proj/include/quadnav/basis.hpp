#pragma once

#include <Eigen/Core>

namespace quadnav::trajopt {

inline constexpr int kPolyOrder = 7;
inline constexpr int kBasisSize = kPolyOrder + 1;

using BasisRow = Eigen::Matrix<double, kBasisSize, 1>;

/// Shifted Legendre polynomial of degree i on [0, 1].
double shifted_legendre(int i, double s);

/// Order-7 spline basis on s in [0, 1]: p_i = s^i for i <= 3, and p_{i+4} is
/// the four-fold integral (zero constants) of the shifted Legendre polynomial
/// of degree i, so that the fourth derivatives of p_4..p_7 are orthogonal.
class BasisSet {
 public:
  BasisSet();

  /// d^q p_i / ds^q at s.
  double eval(int i, int q, double s) const;
  /// All eight basis functions' q-th derivative at s.
  BasisRow row(int q, double s) const;
  /// Monomial coefficients: p_i(s) = sum_c coeffs()(i, c) s^c.
  const Eigen::Matrix<double, kBasisSize, kBasisSize>& coeffs() const { return coeffs_; }

 private:
  Eigen::Matrix<double, kBasisSize, kBasisSize> coeffs_;
};

/// Shared immutable instance.
const BasisSet& basis();

}  // namespace quadnav::trajopt
