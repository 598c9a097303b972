#pragma once

#include "hadal/manipulator.hpp"
#include "hadal/sensing.hpp"
#include "hadal/types.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace hadal {

/// Axis-aligned survey rectangle in the NED horizontal plane.
struct SurveyBounds {
  double north_min = 0.0;
  double north_max = 0.0;
  double east_min = 0.0;
  double east_max = 0.0;

  double north_extent() const { return north_max - north_min; }
  double east_extent() const { return east_max - east_min; }
  bool contains(double north, double east) const {
    return north >= north_min && north <= north_max && east >= east_min && east <= east_max;
  }
};

/// Corner where the first lane starts.
enum class StartCorner { SouthWest, SouthEast, NorthWest, NorthEast };

struct CoveragePlan {
  std::vector<Pose4> waypoints;
  double capture_radius = 1.0;
  double survey_depth = 0.0;
  double lane_spacing = 0.0;
};

/// Boustrophedon coverage of a rectangle.
///
/// Lanes run parallel to the long side (North on ties), spaced by
/// lane_spacing across track starting at the start corner, with the last lane
/// clamped to the far edge. When the spacing covers the whole width a single
/// lane runs down the middle. Each lane contributes its two end points, in
/// serpentine order, with yaw along the direction of travel.
/// Throws DegenerateBounds for a non-positive extent, std::invalid_argument
/// for a non-positive spacing.
CoveragePlan plan_lawnmower(const SurveyBounds& bounds, double lane_spacing, double survey_depth,
                            StartCorner start_corner, double capture_radius = 1.0);

bool waypoint_reached(const InsEstimate& ins, const Pose4& waypoint, double capture_radius, double yaw_tolerance);

enum class MissionPhase { Descend, Survey, Approach, StabilizeHover, ArmDeploy, Grasp, Transport, Done, Abort };

enum class AbortReason { None, Timeout, GraspFailed, TargetNotFound, Unreachable, NumericalFailure, ModuleError };

std::string_view to_string(MissionPhase phase);
std::string_view to_string(AbortReason reason);

inline constexpr MissionPhase kAllPhases[] = {
    MissionPhase::Descend, MissionPhase::Survey, MissionPhase::Approach, MissionPhase::StabilizeHover,
    MissionPhase::ArmDeploy, MissionPhase::Grasp, MissionPhase::Transport, MissionPhase::Done, MissionPhase::Abort};

bool is_terminal(MissionPhase phase);

/// Whether from -> to is an edge of the mission graph:
///   Descend -> Survey -> Approach -> StabilizeHover -> ArmDeploy -> Grasp -> Transport -> Done,
///   Grasp -> StabilizeHover (retry after a rejected attach),
///   any non-terminal phase -> Abort.
bool is_declared_transition(MissionPhase from, MissionPhase to);

/// Throws InvalidTransition for an undeclared edge.
void check_transition(MissionPhase from, MissionPhase to);

struct PhaseTimeouts {
  double descend = 4000.0;
  double survey = 2000.0;
  double approach = 300.0;
  double stabilize = 180.0;
  double arm_deploy = 60.0;
  double grasp = 60.0;
  double transport = 900.0;

  double for_phase(MissionPhase phase) const;
};

struct MissionConfig {
  double target_depth = 6000.0;
  double depth_capture = 0.3;
  double descent_speed = 2.5;

  SurveyBounds survey_bounds{0.0, 30.0, 0.0, 12.0};
  double lane_spacing = 4.0;
  StartCorner start_corner = StartCorner::SouthWest;
  double capture_radius = 1.0;
  double yaw_tolerance = 0.15;
  double cruise_speed = 0.5;
  double search_hold = 60.0;  // hold at the last waypoint before giving up

  double hover_altitude = 1.0;
  double arm_reach_forward = 0.2;  // horizontal offset of the target ahead of the arm base
  double stabilize_threshold = 0.15;
  double stabilize_dwell = 3.0;
  int max_repositions = 3;

  double grasp_gap = 0.05;
  double grasp_standoff = 0.15;
  int max_grasp_retries = 2;

  Vec3 dropoff_point = Vec3(15.0, 6.0, 6004.0);
  double dropoff_capture = 0.2;
  double transport_speed = 0.3;
  double reference_decel = 0.05;  // m/s^2, braking of the moving reference near each goal

  PhaseTimeouts timeouts;

  void validate() const;
};

enum class GraspStatus { None, Attached, Rejected };

/// Everything the executive sees on a control tick. Truth is deliberately absent.
struct MissionInputs {
  InsEstimate ins;
  std::optional<DetectionEvent> detection;
  GraspStatus grasp = GraspStatus::None;
  bool arm_at_target = false;
  double clock = 0.0;
};

struct MissionCommand {
  Pose4 waypoint = Pose4::Zero();  // active goal
  Pose4 setpoint = Pose4::Zero();  // speed-limited reference handed to the PID
  std::optional<Vec3> arm_target;  // arm-base frame; empty means stow
  bool suction = false;
};

struct PhaseTransition {
  double time = 0.0;
  MissionPhase from = MissionPhase::Descend;
  MissionPhase to = MissionPhase::Descend;
  AbortReason reason = AbortReason::None;
};

struct MissionState {
  MissionPhase phase = MissionPhase::Descend;
  AbortReason abort_reason = AbortReason::None;
  double phase_entry_time = 0.0;

  // speed-limited reference: moves from leg_origin toward the goal from leg_start_time
  Vec3 leg_origin = Vec3::Zero();
  double leg_start_time = 0.0;

  std::size_t waypoint_index = 0;
  std::size_t waypoints_captured = 0;
  std::optional<double> survey_complete_time;

  double hold_yaw = 0.0;
  std::optional<Vec3> target_position;  // INS frame
  std::optional<Vec3> target_offset;    // latest vehicle-to-target offset
  std::optional<double> stable_since;

  std::optional<Vec3> pre_grasp_target;  // arm-base frame
  std::optional<Vec3> grasp_target;
  int grasp_attempts = 0;
  int repositions = 0;
  std::optional<double> transport_start_time;
};

struct MissionStepResult {
  MissionState state;
  MissionCommand command;
  std::optional<PhaseTransition> transition;
  std::optional<std::size_t> captured_waypoint;
};

struct ArmTargets {
  Vec3 pre_grasp = Vec3::Zero();  // arm-base frame, standoff above the object
  Vec3 grasp = Vec3::Zero();      // arm-base frame, at the object
};

/// Arm targets for an object seen at detection_offset (NED, from the vehicle
/// origin) with the vehicle at the given heading. Throws UnreachableFromHover
/// when either target is outside the arm workspace or joint limits.
ArmTargets pre_grasp_arm_target(const Vec3& detection_offset, double vehicle_yaw, const ArmGeometry& arm,
                                double standoff);

/// Reference moving from origin toward goal at speed, braking at decel so it
/// arrives at rest. An infinite decel gives a plain constant-speed ramp.
Vec3 speed_limited_reference(const Vec3& origin, const Vec3& goal, double speed, double elapsed,
                             double decel = std::numeric_limits<double>::infinity());

/// The recovery mission as a pure transition function, called once per control tick.
class MissionExecutive {
 public:
  MissionExecutive(MissionConfig config, ArmGeometry arm, const Pose4& start_pose);

  MissionState initial_state(const InsEstimate& ins) const;

  /// Throws InvalidTransition when called on a terminal phase.
  MissionStepResult step(const MissionState& state, const MissionInputs& inputs) const;

  /// Marks the mission aborted from outside (numerical failure, module error).
  MissionStepResult abort(const MissionState& state, AbortReason reason, double clock) const;

  const CoveragePlan& plan() const { return plan_; }
  const MissionConfig& config() const { return config_; }

  /// Vehicle pose that puts the arm base over a target, hover_altitude above it.
  Pose4 hover_pose_over(const Vec3& target, double yaw) const;

 private:
  void enter(MissionState& state, MissionPhase to, const MissionInputs& in, MissionStepResult& result,
             AbortReason reason = AbortReason::None) const;
  Pose4 transport_goal(const MissionState& state) const;

  MissionConfig config_;
  ArmGeometry arm_;
  Pose4 start_pose_;
  CoveragePlan plan_;
};

}  // namespace hadal
