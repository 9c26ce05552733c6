#include "quadnav/depth_filter.hpp"

#include <cmath>
#include <numbers>

#include "quadnav/error.hpp"

namespace quadnav::depth {

DepthFilterState init(double rho_min, double rho_max, double prior_a, double prior_b) {
  if (!(rho_min > 0.0) || !(rho_min < rho_max)) {
    throw Error(ErrorCode::BadSupport, "inverse depth support must satisfy 0 < min < max");
  }
  DepthFilterState s;
  s.rho_min = rho_min;
  s.rho_max = rho_max;
  s.mu = 0.5 * (rho_min + rho_max);
  const double half = 0.5 * (rho_max - rho_min);
  s.sigma2 = half * half;
  s.a = prior_a;
  s.b = prior_b;
  return s;
}

DepthFilterState update(const DepthFilterState& s, const DepthMeasurement& z) {
  const double var = s.sigma2 + z.tau2;
  const double diff = z.rho - s.mu;
  const double pdf = std::exp(-0.5 * diff * diff / var) / std::sqrt(2.0 * std::numbers::pi * var);

  const double s2 = 1.0 / (1.0 / s.sigma2 + 1.0 / z.tau2);
  const double m = s2 * (s.mu / s.sigma2 + z.rho / z.tau2);

  double c1 = s.a / (s.a + s.b) * pdf;
  double c2 = s.b / (s.a + s.b) / (s.rho_max - s.rho_min);
  const double norm = c1 + c2;
  c1 /= norm;
  c2 /= norm;

  const double ab1 = s.a + s.b + 1.0;
  const double ab2 = s.a + s.b + 2.0;
  const double f = c1 * (s.a + 1.0) / ab1 + c2 * s.a / ab1;
  const double e = c1 * (s.a + 1.0) * (s.a + 2.0) / (ab1 * ab2) + c2 * s.a * (s.a + 1.0) / (ab1 * ab2);

  DepthFilterState out = s;
  const double mu_new = c1 * m + c2 * s.mu;
  out.sigma2 = c1 * (s2 + m * m) + c2 * (s.sigma2 + s.mu * s.mu) - mu_new * mu_new;
  out.mu = mu_new;
  out.a = (e - f) / (f - e / f);
  out.b = out.a * (1.0 - f) / f;
  return out;
}

bool converged(const DepthFilterState& s, double sigma_threshold) {
  return std::sqrt(s.sigma2) < sigma_threshold;
}

}  // namespace quadnav::depth
