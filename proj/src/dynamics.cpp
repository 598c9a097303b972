#include "hadal/dynamics.hpp"

#include "hadal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hadal {

void VehicleParams::validate() const {
  if (!(mass > 0.0)) throw ValidationError("vehicle.mass > 0", "got " + std::to_string(mass));
  if (!(inertia_yaw > 0.0)) throw ValidationError("vehicle.inertia_yaw > 0", "got " + std::to_string(inertia_yaw));
  if ((added_mass.array() < 0.0).any()) throw ValidationError("vehicle.added_mass >= 0", "negative entry");
  if ((linear_drag.array() < 0.0).any() || (quadratic_drag.array() < 0.0).any()) {
    throw ValidationError("vehicle drag coefficients >= 0", "negative entry");
  }
  if (!(hull_volume_surface > 0.0)) throw ValidationError("vehicle.hull_volume_surface > 0", "non-positive volume");
  if (!(hull_bulk_modulus > 0.0)) throw ValidationError("vehicle.hull_bulk_modulus > 0", "non-positive modulus");
  if (!(max_thrust_per_thruster > 0.0)) throw ValidationError("vehicle.max_thrust_per_thruster > 0", "non-positive");
}

void Environment::validate() const {
  if (!(water_density_surface > 0.0)) throw ValidationError("environment.water_density_surface > 0", "non-positive");
  if (!(seafloor_depth > 0.0)) throw ValidationError("environment.seafloor_depth > 0", "non-positive");
  if (!(gravity > 0.0)) throw ValidationError("environment.gravity > 0", "non-positive");
  for (std::size_t i = 1; i < current_profile.size(); ++i) {
    if (!(current_profile[i].depth > current_profile[i - 1].depth)) {
      throw ValidationError("environment.current_profile depths increasing", "sample " + std::to_string(i));
    }
  }
}

Vec3 Environment::current_at(double depth) const {
  if (current_profile.empty()) return current;
  if (depth <= current_profile.front().depth) return current_profile.front().velocity;
  if (depth >= current_profile.back().depth) return current_profile.back().velocity;
  const auto upper = std::upper_bound(current_profile.begin(), current_profile.end(), depth,
                                      [](double d, const CurrentSample& s) { return d < s.depth; });
  const auto lower = upper - 1;
  const double t = (depth - lower->depth) / (upper->depth - lower->depth);
  return lower->velocity + t * (upper->velocity - lower->velocity);
}

Vec3 VehicleState::ned_velocity() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double u = body_velocity[0];
  const double v = body_velocity[1];
  return {c * u - s * v, s * u + c * v, body_velocity[2]};
}

double hull_volume(const VehicleParams& params, const Environment& env, double depth) {
  const double pressure = env.density(depth) * env.gravity * depth;
  return params.hull_volume_surface * (1.0 - pressure / params.hull_bulk_modulus);
}

double net_buoyancy_force(const VehicleParams& params, const Environment& env, double depth) {
  const double weight = params.mass * env.gravity;
  const double buoyancy = env.density(depth) * env.gravity * hull_volume(params, env, depth);
  return weight - buoyancy;
}

Vec4 drag_force(const VehicleParams& params, const Vec4& relative_velocity) {
  Vec4 force;
  for (int i = 0; i < 4; ++i) {
    const double v = relative_velocity[i];
    force[i] = -(params.linear_drag[i] * v + params.quadratic_drag[i] * v * std::abs(v));
  }
  return force;
}

VehicleState step_vehicle(const VehicleState& state, const VehicleParams& params, const Environment& env,
                          const Wrench& body_wrench, double dt) {
  if (!(dt > 0.0) || dt > 0.1) throw std::invalid_argument("step_vehicle: dt must lie in (0, 0.1]");
  if (body_wrench.frame != Frame::Body) throw std::invalid_argument("step_vehicle: wrench must be in the body frame");

  const double c = std::cos(state.yaw);
  const double s = std::sin(state.yaw);
  const Vec3 current = env.current_at(state.position.z());
  const Vec4 current_body(c * current.x() + s * current.y(), -s * current.x() + c * current.y(), current.z(), 0.0);

  Vec4 force = body_wrench.vector() + drag_force(params, state.body_velocity - current_body);
  // roll and pitch are passively stable, so Down stays aligned with body heave
  force[2] += net_buoyancy_force(params, env, state.position.z());

  VehicleState next = state;
  for (int i = 0; i < 3; ++i) {
    next.body_velocity[i] += force[i] / (params.mass + params.added_mass[i]) * dt;
  }
  next.body_velocity[3] += force[3] / (params.inertia_yaw + params.added_mass[3]) * dt;

  // translate with the pre-step heading, then turn
  next.position += next.ned_velocity() * dt;
  next.yaw = wrap_angle(state.yaw + next.body_velocity[3] * dt);

  if (next.position.z() >= env.seafloor_depth) {
    next.position.z() = env.seafloor_depth;
    if (next.body_velocity[2] > 0.0) next.body_velocity[2] = 0.0;
  } else if (next.position.z() <= 0.0) {
    next.position.z() = 0.0;
    if (next.body_velocity[2] < 0.0) next.body_velocity[2] = 0.0;
  }
  next.time = state.time + dt;

  if (!next.position.allFinite() || !next.body_velocity.allFinite() || !std::isfinite(next.yaw) ||
      !std::isfinite(next.time)) {
    throw NonFiniteState("vehicle state became non-finite at t=" + std::to_string(state.time));
  }
  return next;
}

double kinetic_energy(const VehicleState& state, const VehicleParams& params) {
  double energy = 0.0;
  for (int i = 0; i < 3; ++i) {
    energy += 0.5 * (params.mass + params.added_mass[i]) * state.body_velocity[i] * state.body_velocity[i];
  }
  energy += 0.5 * (params.inertia_yaw + params.added_mass[3]) * state.body_velocity[3] * state.body_velocity[3];
  return energy;
}

FreeObject attach_object(const FreeObject& object, const EndEffectorPose& end_effector, double max_gap) {
  if (object.attached) throw AlreadyAttached();
  const Vec3 delta = object.position - end_effector.position;
  const double gap = delta.norm();
  if (gap > max_gap) throw AttachRejected(gap, max_gap);
  FreeObject held = object;
  held.attached = true;
  held.attach_offset = end_effector.rotation.transpose() * delta;
  return held;
}

FreeObject attach_object(const FreeObject& object, const Vec3& end_effector_position, double max_gap) {
  return attach_object(object, EndEffectorPose{end_effector_position, Mat3::Identity()}, max_gap);
}

FreeObject follow_end_effector(const FreeObject& object, const EndEffectorPose& end_effector) {
  if (!object.attached) throw NotAttached();
  FreeObject held = object;
  held.position = end_effector.position + end_effector.rotation * object.attach_offset;
  return held;
}

FreeObject detach_object(const FreeObject& object) {
  if (!object.attached) throw NotAttached();
  FreeObject released = object;
  released.attached = false;
  released.attach_offset = Vec3::Zero();
  return released;
}

FreeObject settle_object(const FreeObject& object, const Environment& env, double settle_speed, double dt) {
  if (object.attached) return object;
  FreeObject next = object;
  next.position.z() = std::min(env.seafloor_depth, object.position.z() + settle_speed * dt);
  return next;
}

}  // namespace hadal
