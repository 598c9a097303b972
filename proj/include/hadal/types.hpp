#pragma once

#include <Eigen/Dense>

namespace hadal {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

/// World-frame pose [north, east, down, yaw] in NED with yaw about Down.
using Pose4 = Eigen::Vector4d;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Rotation about the Down axis (NED yaw convention: positive turns North toward East).
Mat3 yaw_rotation(double yaw);

enum class Frame { World, Body };

/// Force/moment command on the four controlled axes.
struct Wrench {
  double fx = 0.0;
  double fy = 0.0;
  double fz = 0.0;
  double tau_yaw = 0.0;
  Frame frame = Frame::World;

  Vec4 vector() const { return {fx, fy, fz, tau_yaw}; }
  static Wrench from_vector(const Vec4& v, Frame frame) { return {v[0], v[1], v[2], v[3], frame}; }
  bool finite() const { return vector().allFinite(); }
};

/// Position and orientation of the suction cup in the world frame.
struct EndEffectorPose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
};

}  // namespace hadal
