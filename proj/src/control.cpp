#include "hadal/control.hpp"

#include "hadal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hadal {

void PidGains::validate() const {
  if ((kp.array() < 0.0).any() || (ki.array() < 0.0).any() || (kd.array() < 0.0).any()) {
    throw ValidationError("pid gains >= 0", "negative gain");
  }
  if (!(integral_limit.array() > 0.0).all()) throw ValidationError("pid.integral_limit > 0", "non-positive limit");
  if ((deadband.array() < 0.0).any()) throw ValidationError("pid.deadband >= 0", "negative deadband");
}

Vec4 pose_error(const Pose4& waypoint, const Pose4& pose) {
  Vec4 error = waypoint - pose;
  error[3] = wrap_angle(error[3]);
  return error;
}

PidOutput pid_step(const PidGains& gains, const PidState& state, const Vec4& error, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be positive");
  PidOutput out;
  out.state = state;
  Vec4 u = Vec4::Zero();
  for (int i = 0; i < 4; ++i) {
    const double e = error[i];
    if (std::abs(e) < gains.deadband[i]) {
      continue;
    }
    const double limit = gains.integral_limit[i];
    out.state.integral[i] = std::clamp(state.integral[i] + e * dt, -limit, limit);
    const double derivative = state.initialized ? (e - state.previous_error[i]) / dt : 0.0;
    u[i] = gains.kp[i] * e + gains.ki[i] * out.state.integral[i] + gains.kd[i] * derivative;
  }
  out.state.previous_error = error;
  out.state.initialized = true;
  out.wrench = Wrench::from_vector(u, Frame::World);
  return out;
}

Wrench world_to_body(const Wrench& wrench, double yaw) {
  if (wrench.frame != Frame::World) throw std::invalid_argument("world_to_body: wrench is not in the world frame");
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * wrench.fx + s * wrench.fy, -s * wrench.fx + c * wrench.fy, wrench.fz, wrench.tau_yaw, Frame::Body};
}

Wrench body_to_world(const Wrench& wrench, double yaw) {
  if (wrench.frame != Frame::Body) throw std::invalid_argument("body_to_world: wrench is not in the body frame");
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * wrench.fx - s * wrench.fy, s * wrench.fx + c * wrench.fy, wrench.fz, wrench.tau_yaw, Frame::World};
}

ThrusterLayout::ThrusterLayout(const AllocationMatrix& allocation,
                               const std::array<ThrustLimits, kThrusterCount>& limits)
    : allocation_(allocation), limits_(limits) {
  Eigen::FullPivLU<AllocationMatrix> lu(allocation_);
  if (lu.rank() < 4) {
    throw RankDeficientLayout("thruster allocation has rank " + std::to_string(lu.rank()) + ", need 4");
  }
  for (const auto& l : limits_) {
    if (!(l.min < l.max)) throw ValidationError("thruster limits min < max", "empty thrust range");
  }
  // full row rank: B+ = B^T (B B^T)^-1
  const Eigen::Matrix4d gram = allocation_ * allocation_.transpose();
  pseudo_inverse_ = allocation_.transpose() * gram.ldlt().solve(Eigen::Matrix4d::Identity());
}

ThrusterLayout ThrusterLayout::symmetric_default(double max_thrust) {
  constexpr double kArmX = 0.5;
  constexpr double kArmY = 0.4;
  AllocationMatrix b = AllocationMatrix::Zero();
  for (int i = 0; i < 4; ++i) b(2, i) = 1.0;

  struct Horizontal {
    double x, y, angle;
  };
  const std::array<Horizontal, 4> horizontal{{
      {kArmX, kArmY, -kPi / 4.0},    // front starboard
      {kArmX, -kArmY, kPi / 4.0},    // front port
      {-kArmX, kArmY, kPi / 4.0},    // aft starboard
      {-kArmX, -kArmY, -kPi / 4.0},  // aft port
  }};
  for (int i = 0; i < 4; ++i) {
    const auto& h = horizontal[i];
    const double dx = std::cos(h.angle);
    const double dy = std::sin(h.angle);
    b(0, 4 + i) = dx;
    b(1, 4 + i) = dy;
    b(3, 4 + i) = h.x * dy - h.y * dx;
  }
  std::array<ThrustLimits, kThrusterCount> limits;
  limits.fill({-max_thrust, max_thrust});
  return ThrusterLayout(b, limits);
}

ThrusterSetpoints ThrusterLayout::allocate(const Wrench& body_wrench) const {
  if (body_wrench.frame != Frame::Body) throw std::invalid_argument("allocate: wrench is not in the body frame");
  ThrusterSetpoints u = pseudo_inverse_ * body_wrench.vector();
  for (int i = 0; i < kThrusterCount; ++i) {
    u[i] = std::clamp(u[i], limits_[i].min, limits_[i].max);
  }
  return u;
}

Wrench ThrusterLayout::produced_wrench(const ThrusterSetpoints& thrusts) const {
  return Wrench::from_vector(allocation_ * thrusts, Frame::Body);
}

ThrusterSetpoints allocate_thrusters(const ThrusterLayout& layout, const Wrench& body_wrench) {
  return layout.allocate(body_wrench);
}

}  // namespace hadal
