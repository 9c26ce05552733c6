#pragma once

namespace quadnav::depth {

/// Gaussian over inverse depth times Beta over the inlier ratio.
struct DepthFilterState {
  double mu = 0.0;
  double sigma2 = 1.0;
  double a = 10.0;
  double b = 10.0;
  double rho_min = 0.0;
  double rho_max = 1.0;

  double inlier_mean() const { return a / (a + b); }
};

struct DepthMeasurement {
  double rho = 0.0;
  double tau2 = 1e-4;
};

/// Throws BadSupport unless 0 < rho_min < rho_max.
DepthFilterState init(double rho_min, double rho_max, double prior_a = 10.0,
                      double prior_b = 10.0);

/// Moment-matched posterior under the inlier/outlier mixture
/// gamma N(rho, tau2) + (1 - gamma) U(rho_min, rho_max).
DepthFilterState update(const DepthFilterState& s, const DepthMeasurement& z);

bool converged(const DepthFilterState& s, double sigma_threshold);

}  // namespace quadnav::depth
