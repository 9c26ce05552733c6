#pragma once

#include <stdexcept>
#include <string>

namespace quadnav {

enum class ErrorCode {
  GimbalLock,
  NotSkew,
  CovarianceNotPSD,
  SingularInnovationCov,
  DegenerateThrust,
  DegenerateYaw,
  NoPath,
  DegenerateSegment,
  ObstacleOnSegment,
  EmptyCorridor,
  ZeroLengthSegment,
  Infeasible,
  MaxIterations,
  TrajectoryInfeasible,
  OutOfDomain,
  BadSupport,
  CollisionDetected,
  Timeout,
  ParseError,
  InvalidScenario,
  MissingLog,
};

const char* to_string(ErrorCode code);

// Every recoverable failure in the stack is reported through this type; the
// code lets callers branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace quadnav
