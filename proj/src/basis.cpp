#include "quadnav/basis.hpp"

#include <cmath>

namespace quadnav::trajopt {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double falling(int c, int q) {
  double r = 1.0;
  for (int k = 0; k < q; ++k) r *= (c - k);
  return r;
}

}  // namespace

double shifted_legendre(int i, double s) {
  // (-1)^i sum_l C(i,l) C(i+l,l) (-s)^l
  double acc = 0.0;
  for (int l = 0; l <= i; ++l) acc += binom(i, l) * binom(i + l, l) * std::pow(-s, l);
  return (i % 2 == 0) ? acc : -acc;
}

BasisSet::BasisSet() {
  coeffs_.setZero();
  for (int i = 0; i < 4; ++i) coeffs_(i, i) = 1.0;
  for (int i = 0; i < 4; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    for (int l = 0; l <= i; ++l) {
      const double c = sign * binom(i, l) * binom(i + l, l) * ((l % 2 == 0) ? 1.0 : -1.0);
      // Integrating s^l four times gives s^(l+4) * l! / (l+4)!.
      const double scale = 1.0 / ((l + 1.0) * (l + 2.0) * (l + 3.0) * (l + 4.0));
      coeffs_(i + 4, l + 4) = c * scale;
    }
  }
}

double BasisSet::eval(int i, int q, double s) const {
  double acc = 0.0;
  for (int c = q; c < kBasisSize; ++c) {
    const double a = coeffs_(i, c);
    if (a == 0.0) continue;
    acc += a * falling(c, q) * std::pow(s, c - q);
  }
  return acc;
}

BasisRow BasisSet::row(int q, double s) const {
  BasisRow r;
  for (int i = 0; i < kBasisSize; ++i) r(i) = eval(i, q, s);
  return r;
}

const BasisSet& basis() {
  static const BasisSet instance;
  return instance;
}

}  // namespace quadnav::trajopt
