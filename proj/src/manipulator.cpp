#include "hadal/manipulator.hpp"

#include "hadal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hadal {

void ArmGeometry::validate() const {
  if (!(l1 > 0.0) || !(l2 > 0.0)) throw ValidationError("arm link lengths > 0", "non-positive link");
  for (std::size_t i = 0; i < joint_limits.size(); ++i) {
    if (!(joint_limits[i].min < joint_limits[i].max)) {
      throw ValidationError("arm joint_limits min < max", "joint " + std::to_string(i + 1));
    }
  }
  if (!(joint_accel_limit.array() > 0.0).all()) throw ValidationError("arm.joint_accel_limit > 0", "non-positive");
}

void ArmControlGains::validate() const {
  if ((kp.array() < 0.0).any() || (kv.array() < 0.0).any()) throw ValidationError("arm gains >= 0", "negative gain");
}

Vec3 inverse_kinematics(const ArmGeometry& geom, const Vec3& target) {
  const double x = target.x();
  const double y = target.y();
  const double z = target.z();
  const double l1 = geom.l1;
  const double l2 = geom.l2;
  const double r2 = x * x + y * y + z * z;
  const double r = std::sqrt(r2);
  if (r < std::abs(l1 - l2) - kElbowCosineTolerance || r > l1 + l2 + kElbowCosineTolerance) {
    throw Unreachable("target at range " + std::to_string(r) + " m is outside the workspace");
  }

  double cos_elbow = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  if (std::abs(cos_elbow) > 1.0) {
    if (std::abs(cos_elbow) - 1.0 > kElbowCosineTolerance) {
      throw Unreachable("elbow cosine " + std::to_string(cos_elbow) + " outside [-1, 1]");
    }
    cos_elbow = std::clamp(cos_elbow, -1.0, 1.0);
  }

  Vec3 q;
  q[0] = std::atan2(y, x);
  q[2] = -std::acos(cos_elbow);
  q[1] = std::atan2(z, std::hypot(x, y)) - std::atan2(l2 * std::sin(q[2]), l1 + l2 * std::cos(q[2]));

  if (!within_limits(geom, q)) {
    throw JointLimitViolation("IK solution [" + std::to_string(q[0]) + ", " + std::to_string(q[1]) + ", " +
                              std::to_string(q[2]) + "] violates joint limits");
  }
  return q;
}

Vec3 forward_kinematics(const ArmGeometry& geom, const Vec3& q) {
  const double reach = geom.l1 * std::cos(q[1]) + geom.l2 * std::cos(q[1] + q[2]);
  const double z = geom.l1 * std::sin(q[1]) + geom.l2 * std::sin(q[1] + q[2]);
  return {reach * std::cos(q[0]), reach * std::sin(q[0]), z};
}

bool within_limits(const ArmGeometry& geom, const Vec3& q, double tolerance) {
  for (int i = 0; i < 3; ++i) {
    if (q[i] < geom.joint_limits[i].min - tolerance || q[i] > geom.joint_limits[i].max + tolerance) return false;
  }
  return true;
}

Vec3 accel_feedforward(const ArmControlGains& gains, const JointTrajectoryPoint& target, const JointState& state,
                       const Vec3& accel_limit) {
  Vec3 cmd = target.q_ddot + gains.kv.cwiseProduct(target.q_dot - state.q_dot) +
             gains.kp.cwiseProduct(target.q - state.q);
  for (int i = 0; i < 3; ++i) cmd[i] = std::clamp(cmd[i], -accel_limit[i], accel_limit[i]);
  return cmd;
}

JointState integrate_joint_command(const JointState& state, const Vec3& q_ddot_cmd, const ArmGeometry& geom,
                                   double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_joint_command: dt must be positive");
  JointState next = state;
  next.q_ddot = q_ddot_cmd;
  next.q_dot = state.q_dot + q_ddot_cmd * dt;
  next.q = state.q + next.q_dot * dt;
  for (int i = 0; i < 3; ++i) {
    const auto& lim = geom.joint_limits[i];
    if (next.q[i] <= lim.min) {
      next.q[i] = lim.min;
      next.q_dot[i] = 0.0;
    } else if (next.q[i] >= lim.max) {
      next.q[i] = lim.max;
      next.q_dot[i] = 0.0;
    }
  }
  next.time = state.time + dt;
  return next;
}

QuinticTrajectory::QuinticTrajectory(const Vec3& start, const Vec3& goal, double duration, double start_time)
    : start_(start), goal_(goal), duration_(duration), start_time_(start_time) {
  if (!(duration > 0.0)) throw std::invalid_argument("QuinticTrajectory: duration must be positive");
}

JointTrajectoryPoint QuinticTrajectory::sample(double time) const {
  const double s = std::clamp((time - start_time_) / duration_, 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const Vec3 delta = goal_ - start_;
  JointTrajectoryPoint p;
  p.time = time;
  p.q = start_ + delta * (s3 * (10.0 - 15.0 * s + 6.0 * s2));
  p.q_dot = delta * (30.0 * s2 * (1.0 - 2.0 * s + s2) / duration_);
  p.q_ddot = delta * (60.0 * s * (1.0 - 3.0 * s + 2.0 * s2) / (duration_ * duration_));
  return p;
}

std::vector<JointTrajectoryPoint> plan_joint_trajectory(const Vec3& q_start, const Vec3& q_goal, double duration,
                                                        double rate_hz) {
  if (!(rate_hz > 0.0)) throw std::invalid_argument("plan_joint_trajectory: rate must be positive");
  const QuinticTrajectory trajectory(q_start, q_goal, duration);
  const auto samples = static_cast<long>(std::llround(duration * rate_hz));
  std::vector<JointTrajectoryPoint> points;
  points.reserve(static_cast<std::size_t>(samples) + 1);
  for (long k = 0; k <= samples; ++k) {
    points.push_back(trajectory.sample(std::min(duration, static_cast<double>(k) / rate_hz)));
  }
  return points;
}

EndEffectorPose end_effector_pose(const ArmGeometry& geom, const Vec3& q, const Pose4& vehicle_pose) {
  const Mat3 vehicle_rotation = yaw_rotation(vehicle_pose[3]);
  const Mat3 base_rotation = vehicle_rotation * yaw_rotation(geom.mount_yaw);
  const Vec3 tip_in_base = forward_kinematics(geom, q);

  EndEffectorPose pose;
  pose.position = vehicle_pose.head<3>() + vehicle_rotation * geom.mount_position + base_rotation * tip_in_base;
  // tool frame: x along the last link, pitched down by theta2 + theta3
  const double pitch = q[1] + q[2];
  const Mat3 link_pitch = Eigen::AngleAxisd(-pitch, Vec3::UnitY()).toRotationMatrix();
  pose.rotation = base_rotation * yaw_rotation(q[0]) * link_pitch;
  return pose;
}

Vec3 end_effector_world_position(const ArmGeometry& geom, const Vec3& q, const Pose4& vehicle_pose) {
  return end_effector_pose(geom, q, vehicle_pose).position;
}

Vec3 body_to_arm_base(const ArmGeometry& geom, const Vec3& body_point) {
  return yaw_rotation(geom.mount_yaw).transpose() * (body_point - geom.mount_position);
}

Vec3 arm_base_to_body(const ArmGeometry& geom, const Vec3& arm_point) {
  return geom.mount_position + yaw_rotation(geom.mount_yaw) * arm_point;
}

}  // namespace hadal
