#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patchwarp {

enum class ErrorCode {
  DegenerateQuad,
  SingularSystem,
  PointAtInfinity,
  SingularMatrix,
  MissingJoint,
  DegenerateLayout,
  RoleMismatch,
  DimensionMismatch,
  ShapeMismatch,
  EmptyAlignedRegion,
  InvalidArgument,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure
/// class and `what()` carries the human-readable detail (e.g. the joint name
/// for MissingJoint).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace patchwarp
