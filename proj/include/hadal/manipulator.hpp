#pragma once

#include "hadal/types.hpp"

#include <array>
#include <vector>

namespace hadal {

struct JointLimits {
  double min = -kPi;
  double max = kPi;
};

/// Yaw-pitch-pitch arm: a base yaw joint followed by a planar two-link chain.
///
/// The arm-base frame is aligned with the vehicle body (x forward, y
/// starboard, z down) and rotated by mount_yaw about z.
struct ArmGeometry {
  double l1 = 0.4;
  double l2 = 0.3;
  Vec3 mount_position = Vec3(0.6, 0.0, 0.4);  // vehicle frame [m]
  double mount_yaw = 0.0;
  std::array<JointLimits, 3> joint_limits{{{-kPi, kPi}, {-kPi / 2.0, kPi}, {-kPi, 0.0}}};
  Vec3 joint_accel_limit = Vec3::Constant(2.0);  // rad/s^2

  void validate() const;
};

struct JointState {
  Vec3 q = Vec3::Zero();
  Vec3 q_dot = Vec3::Zero();
  Vec3 q_ddot = Vec3::Zero();
  double time = 0.0;
};

struct ArmControlGains {
  Vec3 kp = Vec3::Constant(4.0);
  Vec3 kv = Vec3::Constant(2.0);

  void validate() const;
};

struct JointTrajectoryPoint {
  double time = 0.0;
  Vec3 q = Vec3::Zero();
  Vec3 q_dot = Vec3::Zero();
  Vec3 q_ddot = Vec3::Zero();
};

/// Numerical guard on the elbow cosine near full extension / full fold.
inline constexpr double kElbowCosineTolerance = 1e-9;

/// Closed-form IK with the negative (elbow-up in the z-down frame) elbow root.
///
///   theta1 = atan2(y, x)
///   theta3 = -acos((r^2 - l1^2 - l2^2) / (2 l1 l2))
///   theta2 = atan2(z, hypot(x, y)) - atan2(l2 sin theta3, l1 + l2 cos theta3)
///
/// Throws Unreachable outside the annulus |l1 - l2| <= r <= l1 + l2 and
/// JointLimitViolation when the solution leaves the joint limits.
Vec3 inverse_kinematics(const ArmGeometry& geom, const Vec3& target);

/// Position of the end effector in the arm-base frame.
Vec3 forward_kinematics(const ArmGeometry& geom, const Vec3& q);

bool within_limits(const ArmGeometry& geom, const Vec3& q, double tolerance = 0.0);

/// Acceleration-level feed-forward command, clamped per joint:
///   q_ddot_target + Kv (q_dot_target - q_dot) + Kp (q_target - q)
Vec3 accel_feedforward(const ArmControlGains& gains, const JointTrajectoryPoint& target, const JointState& state,
                       const Vec3& accel_limit);

/// Semi-implicit integration of an acceleration command; joints stop at their limits.
JointState integrate_joint_command(const JointState& state, const Vec3& q_ddot_cmd, const ArmGeometry& geom,
                                   double dt);

/// Quintic rest-to-rest joint trajectory (zero boundary velocity and acceleration).
class QuinticTrajectory {
 public:
  QuinticTrajectory(const Vec3& start, const Vec3& goal, double duration, double start_time = 0.0);

  JointTrajectoryPoint sample(double time) const;
  double start_time() const { return start_time_; }
  double end_time() const { return start_time_ + duration_; }
  const Vec3& goal() const { return goal_; }

 private:
  Vec3 start_;
  Vec3 goal_;
  double duration_;
  double start_time_;
};

/// Samples a quintic trajectory at the given rate, both endpoints included.
std::vector<JointTrajectoryPoint> plan_joint_trajectory(const Vec3& q_start, const Vec3& q_goal, double duration,
                                                        double rate_hz);

/// Suction-cup pose in the world: FK composed through the mount and the vehicle pose.
EndEffectorPose end_effector_pose(const ArmGeometry& geom, const Vec3& q, const Pose4& vehicle_pose);
Vec3 end_effector_world_position(const ArmGeometry& geom, const Vec3& q, const Pose4& vehicle_pose);

/// Converts a point given in the vehicle body frame into the arm-base frame.
Vec3 body_to_arm_base(const ArmGeometry& geom, const Vec3& body_point);
Vec3 arm_base_to_body(const ArmGeometry& geom, const Vec3& arm_point);

}  // namespace hadal
