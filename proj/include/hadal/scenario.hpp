#pragma once

#include "hadal/control.hpp"
#include "hadal/dynamics.hpp"
#include "hadal/manipulator.hpp"
#include "hadal/mission.hpp"
#include "hadal/sensing.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace hadal {

struct SimulationSettings {
  int physics_rate = 100;  // Hz
  int control_rate = 10;   // Hz
  double max_sim_time = 7200.0;
  std::string log_dir = "hadal_logs";
};

struct ArmSettings {
  ArmGeometry geometry;
  ArmControlGains gains;
  Vec3 stow = Vec3(0.0, 0.2, -2.6);
  double move_duration = 8.0;
  double at_target_tolerance = 1e-3;  // rad
};

struct ObjectSettings {
  Vec3 position = Vec3(-3.0, 12.0, 6004.0);
  double settle_speed = 0.2;  // m/s once released
};

/// Custom allocation; when absent the symmetric default layout is built from
/// vehicle.max_thrust_per_thruster.
struct ThrusterSettings {
  std::optional<AllocationMatrix> allocation;
  std::optional<std::array<ThrustLimits, kThrusterCount>> limits;
};

struct ScenarioConfig {
  std::string name = "unnamed";
  SimulationSettings simulation;
  Environment environment;
  VehicleParams vehicle;
  Pose4 initial_pose = Pose4::Zero();
  ThrusterSettings thrusters;
  PidGains pid;
  ArmSettings arm;
  SensorSuiteConfig sensors;
  MissionConfig mission;
  ObjectSettings object;

  /// Checks every sub-config and the cross-config invariants. Throws ValidationError.
  void validate() const;
  ThrusterLayout thruster_layout() const;
};

/// Parses a scenario document (YAML). Unknown keys are a ParseError naming
/// the key; the result is validated before it is returned.
ScenarioConfig load_scenario(std::string_view document);

/// Loads a scenario from a file, or from scenario.yaml inside a directory.
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

std::filesystem::path resolve_scenario_path(const std::filesystem::path& path);

}  // namespace hadal
