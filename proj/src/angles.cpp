#include "hadal/errors.hpp"
#include "hadal/types.hpp"

#include <cmath>

namespace hadal {

double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) {
    wrapped += 2.0 * kPi;
  }
  // remainder() can land a hair above pi when angle sits on the boundary
  if (wrapped > kPi) {
    wrapped -= 2.0 * kPi;
  }
  return wrapped;
}

Mat3 yaw_rotation(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Mat3 r;
  r << c, -s, 0.0,
       s,  c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

AttachRejected::AttachRejected(double gap, double max_gap)
    : Error("attach rejected: gap " + std::to_string(gap) + " m exceeds " + std::to_string(max_gap) + " m"),
      gap_(gap) {}

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(line >= 0 ? "line " + std::to_string(line + 1) + ", column " + std::to_string(column + 1) + ": " + message
                      : message),
      line_(line),
      column_(column) {}

ValidationError::ValidationError(std::string invariant, const std::string& detail)
    : Error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

}  // namespace hadal
