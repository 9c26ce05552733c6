#include <oracles.hpp>

#include "quadnav/basis.hpp"
#include "quadnav/trajopt.hpp"
#include "support.hpp"

using namespace quadnav;
using namespace quadnav::trajopt;

TEST_CASE("shifted legendre matches the Bonnet recurrence") {
  for (int i = 0; i <= 6; ++i) {
    for (double s : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      CHECK(trajopt::shifted_legendre(i, s) == doctest::Approx(oracle::shifted_legendre(i, s)).epsilon(1e-13));
    }
  }
}

TEST_CASE("low basis functions are monomials") {
  const BasisSet& b = basis();
  for (int i = 0; i < 4; ++i) {
    for (double s : {0.0, 0.3, 1.0}) CHECK(b.eval(i, 0, s) == doctest::Approx(std::pow(s, i)));
  }
}

TEST_CASE("fourth derivatives of the high basis are shifted legendre polynomials") {
  const BasisSet& b = basis();
  for (int i = 0; i < 4; ++i) {
    const Eigen::VectorXd c = b.coeffs().row(i + 4).transpose();
    for (double s : {0.0, 0.21, 0.5, 0.9, 1.0}) {
      CHECK(oracle::poly_derivative(c, 4, s) ==
            doctest::Approx(oracle::shifted_legendre(i, s)).epsilon(1e-12));
      CHECK(b.eval(i + 4, 4, s) == doctest::Approx(oracle::shifted_legendre(i, s)).epsilon(1e-12));
    }
    // four-fold integral with zero constants: value and first three derivatives vanish at 0
    for (int q = 0; q < 4; ++q) CHECK(std::abs(b.eval(i + 4, q, 0.0)) < 1e-15);
  }
}

TEST_CASE("basis derivatives agree with the monomial table") {
  const BasisSet& b = basis();
  for (int i = 0; i < kBasisSize; ++i) {
    const Eigen::VectorXd c = b.coeffs().row(i).transpose();
    for (int q = 0; q <= 4; ++q) {
      for (double s : {0.0, 0.37, 1.0}) {
        CHECK(b.eval(i, q, s) == doctest::Approx(oracle::poly_derivative(c, q, s)).epsilon(1e-12));
        CHECK(b.row(q, s)(i) == b.eval(i, q, s));
      }
    }
  }
}

TEST_CASE("snap cost matrix equals the quadrature integral") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  const oracle::Quadrature quad = oracle::gauss_legendre(8);
  const std::vector<double> durations{0.7, 1.9, 3.2};
  const Eigen::MatrixXd Q = snap_cost_matrix(durations);
  Eigen::VectorXd alpha(Q.rows());
  for (int i = 0; i < alpha.size(); ++i) alpha(i) = n01(rng);
  double integral = 0.0;
  for (std::size_t j = 0; j < durations.size(); ++j) {
    for (int k = 0; k < kDims; ++k) {
      Eigen::VectorXd poly = Eigen::VectorXd::Zero(kBasisSize);
      for (int i = 0; i < kBasisSize; ++i) {
        poly += alpha(var_index(static_cast<int>(j), k, i)) * basis().coeffs().row(i).transpose();
      }
      const double d = durations[j];
      for (std::size_t g = 0; g < quad.nodes.size(); ++g) {
        const double v = oracle::poly_derivative(poly, 4, quad.nodes[g]) / std::pow(d, 4);
        integral += quad.weights[g] * d * v * v;
      }
    }
  }
  CHECK(alpha.dot(Q * alpha) == doctest::Approx(integral).epsilon(1e-12));
}
