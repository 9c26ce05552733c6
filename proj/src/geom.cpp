#include "quadnav/geom.hpp"

#include <Eigen/SVD>

namespace quadnav {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::GimbalLock: return "GimbalLock";
    case ErrorCode::NotSkew: return "NotSkew";
    case ErrorCode::CovarianceNotPSD: return "CovarianceNotPSD";
    case ErrorCode::SingularInnovationCov: return "SingularInnovationCov";
    case ErrorCode::DegenerateThrust: return "DegenerateThrust";
    case ErrorCode::DegenerateYaw: return "DegenerateYaw";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::DegenerateSegment: return "DegenerateSegment";
    case ErrorCode::ObstacleOnSegment: return "ObstacleOnSegment";
    case ErrorCode::EmptyCorridor: return "EmptyCorridor";
    case ErrorCode::ZeroLengthSegment: return "ZeroLengthSegment";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::TrajectoryInfeasible: return "TrajectoryInfeasible";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::BadSupport: return "BadSupport";
    case ErrorCode::CollisionDetected: return "CollisionDetected";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::MissingLog: return "MissingLog";
  }
  return "Unknown";
}

namespace geom {

Mat3 orthonormalize(const Mat3& r) {
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1;
    out = u * svd.matrixV().transpose();
  }
  return out;
}

}  // namespace geom
}  // namespace quadnav
