#pragma once

#include "hadal/types.hpp"

#include <vector>

namespace hadal {

struct VehicleParams {
  double mass = 512.5;                                  // kg
  Vec4 added_mass = Vec4(80.0, 120.0, 150.0, 40.0);    // surge, sway, heave [kg]; yaw [kg m^2]
  double inertia_yaw = 160.0;                           // kg m^2
  Vec4 linear_drag = Vec4(40.0, 60.0, 60.0, 40.0);
  Vec4 quadratic_drag = Vec4(150.0, 220.0, 80.0, 60.0);
  double hull_volume_surface = 0.5;                     // m^3
  double hull_bulk_modulus = 2.2e9;                     // Pa
  double max_thrust_per_thruster = 250.0;               // N

  void validate() const;
};

/// Current velocity sample for a piecewise-linear depth profile.
struct CurrentSample {
  double depth = 0.0;
  Vec3 velocity = Vec3::Zero();
};

struct Environment {
  double water_density_surface = 1025.0;  // kg/m^3
  double density_gradient = 0.005;        // kg/m^3 per m
  double gravity = 9.81;
  double seafloor_depth = 6004.0;
  Vec3 current = Vec3::Zero();            // NED, used when the profile is empty
  std::vector<CurrentSample> current_profile;  // sorted by depth

  void validate() const;

  double density(double depth) const { return water_density_surface + density_gradient * depth; }
  /// Water current at a depth; the profile is clamped beyond its end samples.
  Vec3 current_at(double depth) const;
};

struct VehicleState {
  Vec3 position = Vec3::Zero();        // NED [m]
  double yaw = 0.0;                    // rad, (-pi, pi]
  Vec4 body_velocity = Vec4::Zero();   // u, v, w [m/s], r [rad/s]
  double time = 0.0;

  Pose4 pose() const { return {position.x(), position.y(), position.z(), yaw}; }
  /// Ground velocity in NED.
  Vec3 ned_velocity() const;
};

/// Hull volume after linear-elastic compression at depth.
double hull_volume(const VehicleParams& params, const Environment& env, double depth);

/// Weight minus buoyancy along Down; positive means the vehicle sinks.
double net_buoyancy_force(const VehicleParams& params, const Environment& env, double depth);

/// Linear plus quadratic damping, opposing the relative velocity on every axis.
Vec4 drag_force(const VehicleParams& params, const Vec4& relative_velocity);

/// Advances the 4-DOF rigid body by one semi-implicit Euler step.
///
/// Velocity is updated first from thrust, drag against the water and net
/// buoyancy; the pose then moves with the new velocity rotated by yaw. Down is
/// clamped to the surface and the seafloor with the heave velocity zeroed on
/// contact. Throws NonFiniteState when the result contains NaN or infinity,
/// std::invalid_argument when dt is outside (0, 0.1].
VehicleState step_vehicle(const VehicleState& state, const VehicleParams& params, const Environment& env,
                          const Wrench& body_wrench, double dt);

double kinetic_energy(const VehicleState& state, const VehicleParams& params);

/// The target object. While attached its position follows the end effector.
struct FreeObject {
  Vec3 position = Vec3::Zero();
  bool attached = false;
  Vec3 attach_offset = Vec3::Zero();  // end-effector frame, valid while attached
};

/// Attaches the object if it lies within max_gap of the end effector.
/// Throws AttachRejected otherwise, AlreadyAttached if it is held already.
FreeObject attach_object(const FreeObject& object, const EndEffectorPose& end_effector, double max_gap);

/// Overload for callers that only know the end-effector position (frame aligned with the world).
FreeObject attach_object(const FreeObject& object, const Vec3& end_effector_position, double max_gap);

/// Rigid constraint: world position of an attached object for the given end-effector pose.
FreeObject follow_end_effector(const FreeObject& object, const EndEffectorPose& end_effector);

/// Releases the object at its current position. Throws NotAttached on a free object.
FreeObject detach_object(const FreeObject& object);

/// Sinks a free object at a constant settle speed until it rests on the seafloor.
FreeObject settle_object(const FreeObject& object, const Environment& env, double settle_speed, double dt);

}  // namespace hadal
