#pragma once

#include "hadal/types.hpp"

#include <array>

namespace hadal {

/// Per-axis gains for the x, y, z, yaw world-frame PID.
struct PidGains {
  Vec4 kp = Vec4::Zero();
  Vec4 ki = Vec4::Zero();
  Vec4 kd = Vec4::Zero();
  Vec4 integral_limit = Vec4::Ones();
  Vec4 deadband = Vec4::Zero();

  void validate() const;
};

struct PidState {
  Vec4 integral = Vec4::Zero();
  Vec4 previous_error = Vec4::Zero();
  bool initialized = false;
};

/// waypoint - pose, with the yaw component wrapped to (-pi, pi].
Vec4 pose_error(const Pose4& waypoint, const Pose4& pose);

struct PidOutput {
  Wrench wrench;  // world frame
  PidState state;
};

/// One control period of the per-axis PID.
///
/// Inside the deadband an axis outputs exactly zero and its integral is held.
/// Outside it the integral accumulates e*dt and is clamped to
/// +/- integral_limit. The derivative is a backward difference on the error,
/// zero on the first call.
PidOutput pid_step(const PidGains& gains, const PidState& state, const Vec4& error, double dt);

/// Rotates a world-frame wrench into the body frame by the heading.
Wrench world_to_body(const Wrench& wrench, double yaw);
Wrench body_to_world(const Wrench& wrench, double yaw);

inline constexpr int kThrusterCount = 8;

using AllocationMatrix = Eigen::Matrix<double, 4, kThrusterCount>;
using ThrusterSetpoints = Eigen::Matrix<double, kThrusterCount, 1>;

struct ThrustLimits {
  double min = 0.0;
  double max = 0.0;
};

/// Maps eight scalar thrusts to the body wrench [Fx, Fy, Fz, tau_yaw].
class ThrusterLayout {
 public:
  /// Throws RankDeficientLayout if the allocation matrix does not actuate all four axes.
  ThrusterLayout(const AllocationMatrix& allocation, const std::array<ThrustLimits, kThrusterCount>& limits);

  /// Four vertical thrusters (1-4) at the corners of the hull and four
  /// horizontal thrusters (5-8) vectored at +/-45 degrees.
  static ThrusterLayout symmetric_default(double max_thrust);

  const AllocationMatrix& allocation() const { return allocation_; }
  const Eigen::Matrix<double, kThrusterCount, 4>& pseudo_inverse() const { return pseudo_inverse_; }
  const std::array<ThrustLimits, kThrusterCount>& limits() const { return limits_; }

  /// Minimum-norm setpoints followed by a per-thruster clamp.
  ThrusterSetpoints allocate(const Wrench& body_wrench) const;
  /// Body wrench actually produced by a set of thrusts.
  Wrench produced_wrench(const ThrusterSetpoints& thrusts) const;

 private:
  AllocationMatrix allocation_;
  Eigen::Matrix<double, kThrusterCount, 4> pseudo_inverse_;
  std::array<ThrustLimits, kThrusterCount> limits_;
};

ThrusterSetpoints allocate_thrusters(const ThrusterLayout& layout, const Wrench& body_wrench);

}  // namespace hadal
