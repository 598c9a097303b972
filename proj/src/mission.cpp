#include "hadal/mission.hpp"

#include "hadal/control.hpp"
#include "hadal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hadal {

CoveragePlan plan_lawnmower(const SurveyBounds& bounds, double lane_spacing, double survey_depth,
                            StartCorner start_corner, double capture_radius) {
  if (!(bounds.north_extent() > 0.0) || !(bounds.east_extent() > 0.0)) {
    throw DegenerateBounds("survey bounds must have positive width and height");
  }
  if (!(lane_spacing > 0.0)) throw std::invalid_argument("plan_lawnmower: lane_spacing must be positive");

  const bool lanes_along_north = bounds.north_extent() >= bounds.east_extent();
  const double cross_extent = lanes_along_north ? bounds.east_extent() : bounds.north_extent();

  // cross-track offsets measured from the start edge
  std::vector<double> offsets;
  if (lane_spacing >= cross_extent) {
    offsets.push_back(0.5 * cross_extent);
  } else {
    for (long k = 0;; ++k) {
      const double offset = static_cast<double>(k) * lane_spacing;
      if (offset >= cross_extent) break;
      offsets.push_back(offset);
    }
    offsets.push_back(cross_extent);
  }

  const bool start_north_max = start_corner == StartCorner::NorthWest || start_corner == StartCorner::NorthEast;
  const bool start_east_max = start_corner == StartCorner::SouthEast || start_corner == StartCorner::NorthEast;

  auto cross_position = [&](double offset) {
    if (lanes_along_north) {
      return start_east_max ? std::max(bounds.east_min, bounds.east_max - offset)
                            : std::min(bounds.east_max, bounds.east_min + offset);
    }
    return start_north_max ? std::max(bounds.north_min, bounds.north_max - offset)
                           : std::min(bounds.north_max, bounds.north_min + offset);
  };

  CoveragePlan plan;
  plan.capture_radius = capture_radius;
  plan.survey_depth = survey_depth;
  plan.lane_spacing = lane_spacing;
  plan.waypoints.reserve(2 * offsets.size());

  bool forward = lanes_along_north ? !start_north_max : !start_east_max;
  for (const double offset : offsets) {
    const double cross = cross_position(offset);
    if (lanes_along_north) {
      const double from = forward ? bounds.north_min : bounds.north_max;
      const double to = forward ? bounds.north_max : bounds.north_min;
      const double yaw = forward ? 0.0 : kPi;
      plan.waypoints.emplace_back(from, cross, survey_depth, yaw);
      plan.waypoints.emplace_back(to, cross, survey_depth, yaw);
    } else {
      const double from = forward ? bounds.east_min : bounds.east_max;
      const double to = forward ? bounds.east_max : bounds.east_min;
      const double yaw = forward ? kPi / 2.0 : -kPi / 2.0;
      plan.waypoints.emplace_back(cross, from, survey_depth, yaw);
      plan.waypoints.emplace_back(cross, to, survey_depth, yaw);
    }
    forward = !forward;
  }
  return plan;
}

bool waypoint_reached(const InsEstimate& ins, const Pose4& waypoint, double capture_radius, double yaw_tolerance) {
  const double distance = (ins.position - waypoint.head<3>()).norm();
  return distance <= capture_radius && std::abs(wrap_angle(waypoint[3] - ins.yaw)) <= yaw_tolerance;
}

std::string_view to_string(MissionPhase phase) {
  switch (phase) {
    case MissionPhase::Descend: return "descend";
    case MissionPhase::Survey: return "survey";
    case MissionPhase::Approach: return "approach";
    case MissionPhase::StabilizeHover: return "stabilize_hover";
    case MissionPhase::ArmDeploy: return "arm_deploy";
    case MissionPhase::Grasp: return "grasp";
    case MissionPhase::Transport: return "transport";
    case MissionPhase::Done: return "done";
    case MissionPhase::Abort: return "abort";
  }
  return "unknown";
}

std::string_view to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::None: return "none";
    case AbortReason::Timeout: return "timeout";
    case AbortReason::GraspFailed: return "grasp_failed";
    case AbortReason::TargetNotFound: return "target_not_found";
    case AbortReason::Unreachable: return "unreachable";
    case AbortReason::NumericalFailure: return "numerical_failure";
    case AbortReason::ModuleError: return "module_error";
  }
  return "unknown";
}

bool is_terminal(MissionPhase phase) { return phase == MissionPhase::Done || phase == MissionPhase::Abort; }

bool is_declared_transition(MissionPhase from, MissionPhase to) {
  using P = MissionPhase;
  if (is_terminal(from)) return false;
  if (to == P::Abort) return true;
  switch (from) {
    case P::Descend: return to == P::Survey;
    case P::Survey: return to == P::Approach;
    case P::Approach: return to == P::StabilizeHover;
    case P::StabilizeHover: return to == P::ArmDeploy;
    case P::ArmDeploy: return to == P::Grasp;
    case P::Grasp: return to == P::Transport || to == P::StabilizeHover;
    case P::Transport: return to == P::Done;
    default: return false;
  }
}

void check_transition(MissionPhase from, MissionPhase to) {
  if (!is_declared_transition(from, to)) {
    throw InvalidTransition("undeclared transition " + std::string(to_string(from)) + " -> " +
                            std::string(to_string(to)));
  }
}

double PhaseTimeouts::for_phase(MissionPhase phase) const {
  switch (phase) {
    case MissionPhase::Descend: return descend;
    case MissionPhase::Survey: return survey;
    case MissionPhase::Approach: return approach;
    case MissionPhase::StabilizeHover: return stabilize;
    case MissionPhase::ArmDeploy: return arm_deploy;
    case MissionPhase::Grasp: return grasp;
    case MissionPhase::Transport: return transport;
    default: return std::numeric_limits<double>::infinity();
  }
}

void MissionConfig::validate() const {
  if (!(target_depth > 0.0)) throw ValidationError("mission.target_depth > 0", "non-positive");
  if (!(lane_spacing > 0.0)) throw ValidationError("mission.lane_spacing > 0", "non-positive");
  if (!(hover_altitude > 0.0)) throw ValidationError("mission.hover_altitude > 0", "non-positive");
  if (!(survey_bounds.north_extent() > 0.0) || !(survey_bounds.east_extent() > 0.0)) {
    throw ValidationError("mission.survey_bounds non-degenerate", "non-positive extent");
  }
  const PhaseTimeouts& t = timeouts;
  for (double v : {t.descend, t.survey, t.approach, t.stabilize, t.arm_deploy, t.grasp, t.transport}) {
    if (!(v > 0.0)) throw ValidationError("mission timeouts > 0", "non-positive timeout");
  }
  for (double v : {depth_capture, capture_radius, yaw_tolerance, stabilize_threshold, grasp_gap, dropoff_capture}) {
    if (!(v > 0.0)) throw ValidationError("mission tolerances > 0", "non-positive tolerance");
  }
  for (double v : {descent_speed, cruise_speed, transport_speed, reference_decel}) {
    if (!(v > 0.0)) throw ValidationError("mission speeds > 0", "non-positive speed");
  }
  if (stabilize_dwell < 0.0 || search_hold < 0.0 || grasp_standoff < 0.0) {
    throw ValidationError("mission durations >= 0", "negative value");
  }
  if (max_grasp_retries < 0 || max_repositions < 0) throw ValidationError("mission retry counts >= 0", "negative");
}

ArmTargets pre_grasp_arm_target(const Vec3& detection_offset, double vehicle_yaw, const ArmGeometry& arm,
                                double standoff) {
  const Vec3 body_point = yaw_rotation(vehicle_yaw).transpose() * detection_offset;
  ArmTargets targets;
  targets.grasp = body_to_arm_base(arm, body_point);
  targets.pre_grasp = targets.grasp - Vec3(0.0, 0.0, standoff);
  try {
    inverse_kinematics(arm, targets.pre_grasp);
    inverse_kinematics(arm, targets.grasp);
  } catch (const Unreachable& e) {
    throw UnreachableFromHover(std::string("object out of reach from hover: ") + e.what());
  } catch (const JointLimitViolation& e) {
    throw UnreachableFromHover(std::string("object out of joint range from hover: ") + e.what());
  }
  return targets;
}

Vec3 speed_limited_reference(const Vec3& origin, const Vec3& goal, double speed, double elapsed, double decel) {
  const Vec3 delta = goal - origin;
  const double length = delta.norm();
  if (length == 0.0) return goal;
  const double t = std::max(0.0, elapsed);
  double travelled = length;
  if (std::isinf(decel)) {
    travelled = speed * t;
  } else if (speed * speed / (2.0 * decel) >= length) {
    // short leg: start at the speed that brakes exactly onto the goal
    const double peak = std::sqrt(2.0 * decel * length);
    if (t < peak / decel) travelled = peak * t - 0.5 * decel * t * t;
  } else {
    const double cruise_end = (length - speed * speed / (2.0 * decel)) / speed;
    if (t <= cruise_end) {
      travelled = speed * t;
    } else if (t - cruise_end < speed / decel) {
      const double tau = t - cruise_end;
      travelled = speed * cruise_end + speed * tau - 0.5 * decel * tau * tau;
    }
  }
  if (travelled >= length) return goal;
  return origin + delta * (travelled / length);
}

MissionExecutive::MissionExecutive(MissionConfig config, ArmGeometry arm, const Pose4& start_pose)
    : config_(std::move(config)), arm_(std::move(arm)), start_pose_(start_pose) {
  config_.validate();
  plan_ = plan_lawnmower(config_.survey_bounds, config_.lane_spacing, config_.target_depth, config_.start_corner,
                         config_.capture_radius);
}

MissionState MissionExecutive::initial_state(const InsEstimate& ins) const {
  MissionState s;
  s.phase = MissionPhase::Descend;
  s.phase_entry_time = ins.timestamp;
  s.leg_origin = ins.position;
  s.leg_start_time = ins.timestamp;
  s.hold_yaw = start_pose_[3];
  return s;
}

Pose4 MissionExecutive::hover_pose_over(const Vec3& target, double yaw) const {
  const Vec3 base_point = arm_base_to_body(arm_, Vec3(config_.arm_reach_forward, 0.0, 0.0));
  const Vec3 offset = yaw_rotation(yaw) * base_point;
  return {target.x() - offset.x(), target.y() - offset.y(), target.z() - config_.hover_altitude, yaw};
}

Pose4 MissionExecutive::transport_goal(const MissionState& state) const {
  const Vec3 held_point = arm_base_to_body(arm_, state.pre_grasp_target.value_or(Vec3::Zero()));
  const Vec3 offset = yaw_rotation(state.hold_yaw) * held_point;
  const Vec3& drop = config_.dropoff_point;
  return {drop.x() - offset.x(), drop.y() - offset.y(), drop.z() - config_.hover_altitude, state.hold_yaw};
}

void MissionExecutive::enter(MissionState& s, MissionPhase to, const MissionInputs& in, MissionStepResult& result,
                             AbortReason reason) const {
  check_transition(s.phase, to);
  result.transition = PhaseTransition{in.clock, s.phase, to, reason};
  s.phase = to;
  s.phase_entry_time = in.clock;
  s.stable_since.reset();
  switch (to) {
    case MissionPhase::Survey:
    case MissionPhase::Approach:
      s.leg_origin = in.ins.position;
      s.leg_start_time = in.clock;
      break;
    case MissionPhase::Grasp:
      ++s.grasp_attempts;
      break;
    case MissionPhase::Transport:
      s.transport_start_time.reset();
      break;
    case MissionPhase::Abort:
      s.abort_reason = reason;
      break;
    default:
      break;
  }
}

MissionStepResult MissionExecutive::abort(const MissionState& state, AbortReason reason, double clock) const {
  MissionStepResult result;
  result.state = state;
  if (is_terminal(state.phase)) return result;
  MissionInputs in;
  in.clock = clock;
  enter(result.state, MissionPhase::Abort, in, result, reason);
  return result;
}

MissionStepResult MissionExecutive::step(const MissionState& state, const MissionInputs& in) const {
  if (is_terminal(state.phase)) {
    throw InvalidTransition("mission already finished in phase " + std::string(to_string(state.phase)));
  }
  MissionStepResult result;
  result.state = state;
  MissionState& s = result.state;
  const InsEstimate& ins = in.ins;

  const bool refining = s.phase == MissionPhase::Approach || s.phase == MissionPhase::StabilizeHover ||
                        s.phase == MissionPhase::ArmDeploy || s.phase == MissionPhase::Grasp;
  if (in.detection && refining) {
    s.target_offset = in.detection->offset;
    s.target_position = ins.position + in.detection->offset;
  }

  if (in.clock - s.phase_entry_time > config_.timeouts.for_phase(s.phase)) {
    enter(s, MissionPhase::Abort, in, result, AbortReason::Timeout);
  } else {
    switch (s.phase) {
      case MissionPhase::Descend:
        if (std::abs(ins.position.z() - config_.target_depth) <= config_.depth_capture) {
          enter(s, MissionPhase::Survey, in, result);
        }
        break;

      case MissionPhase::Survey: {
        const std::size_t n = plan_.waypoints.size();
        if (in.detection) {
          s.target_offset = in.detection->offset;
          s.target_position = ins.position + in.detection->offset;
          s.hold_yaw = plan_.waypoints[std::min(s.waypoint_index, n - 1)][3];
          enter(s, MissionPhase::Approach, in, result);
          break;
        }
        if (s.waypoint_index < n &&
            waypoint_reached(ins, plan_.waypoints[s.waypoint_index], config_.capture_radius, config_.yaw_tolerance)) {
          result.captured_waypoint = s.waypoint_index;
          ++s.waypoint_index;
          ++s.waypoints_captured;
          s.leg_origin = ins.position;
          s.leg_start_time = in.clock;
          if (s.waypoint_index == n) s.survey_complete_time = in.clock;
        }
        if (s.survey_complete_time && in.clock - *s.survey_complete_time > config_.search_hold) {
          enter(s, MissionPhase::Abort, in, result, AbortReason::TargetNotFound);
        }
        break;
      }

      case MissionPhase::Approach: {
        const Pose4 hover = hover_pose_over(*s.target_position, s.hold_yaw);
        if (waypoint_reached(ins, hover, config_.capture_radius, config_.yaw_tolerance)) {
          enter(s, MissionPhase::StabilizeHover, in, result);
        }
        break;
      }

      case MissionPhase::StabilizeHover: {
        const Vec4 error = pose_error(hover_pose_over(*s.target_position, s.hold_yaw), ins.pose());
        const bool steady =
            error.head<3>().norm() < config_.stabilize_threshold && std::abs(error[3]) <= config_.yaw_tolerance;
        if (!steady) {
          s.stable_since.reset();
          break;
        }
        if (!s.stable_since) s.stable_since = in.clock;
        if (in.clock - *s.stable_since < config_.stabilize_dwell) break;
        const Vec3 offset = s.target_offset.value_or(*s.target_position - ins.position);
        try {
          const ArmTargets targets = pre_grasp_arm_target(offset, ins.yaw, arm_, config_.grasp_standoff);
          s.pre_grasp_target = targets.pre_grasp;
          s.grasp_target = targets.grasp;
          enter(s, MissionPhase::ArmDeploy, in, result);
        } catch (const UnreachableFromHover&) {
          // micro-reposition: re-centre over the latest target estimate and settle again
          ++s.repositions;
          s.stable_since.reset();
          if (s.repositions > config_.max_repositions) {
            enter(s, MissionPhase::Abort, in, result, AbortReason::Unreachable);
          }
        }
        break;
      }

      case MissionPhase::ArmDeploy:
        if (in.arm_at_target) enter(s, MissionPhase::Grasp, in, result);
        break;

      case MissionPhase::Grasp:
        if (in.grasp == GraspStatus::Attached) {
          enter(s, MissionPhase::Transport, in, result);
        } else if (in.grasp == GraspStatus::Rejected) {
          if (s.grasp_attempts > config_.max_grasp_retries) {
            enter(s, MissionPhase::Abort, in, result, AbortReason::GraspFailed);
          } else {
            enter(s, MissionPhase::StabilizeHover, in, result);
          }
        }
        break;

      case MissionPhase::Transport: {
        if (!s.transport_start_time) {
          if (in.arm_at_target) {
            s.transport_start_time = in.clock;
            s.leg_origin = ins.position;
            s.leg_start_time = in.clock;
          }
          break;
        }
        const Pose4 goal = transport_goal(s);
        if (!waypoint_reached(ins, goal, config_.dropoff_capture, config_.yaw_tolerance)) {
          s.stable_since.reset();
          break;
        }
        if (!s.stable_since) s.stable_since = in.clock;
        if (in.clock - *s.stable_since >= config_.stabilize_dwell) enter(s, MissionPhase::Done, in, result);
        break;
      }

      case MissionPhase::Done:
      case MissionPhase::Abort:
        break;
    }
  }

  // command for the phase we ended up in
  MissionCommand& cmd = result.command;
  const double elapsed = in.clock - s.leg_start_time;
  switch (s.phase) {
    case MissionPhase::Descend: {
      cmd.waypoint = Pose4(start_pose_[0], start_pose_[1], config_.target_depth, start_pose_[3]);
      cmd.setpoint << speed_limited_reference(s.leg_origin, cmd.waypoint.head<3>(), config_.descent_speed, elapsed,
                                                  config_.reference_decel),
          cmd.waypoint[3];
      break;
    }
    case MissionPhase::Survey: {
      const std::size_t n = plan_.waypoints.size();
      cmd.waypoint = plan_.waypoints[std::min(s.waypoint_index, n - 1)];
      cmd.setpoint << speed_limited_reference(s.leg_origin, cmd.waypoint.head<3>(), config_.cruise_speed, elapsed,
                                                  config_.reference_decel),
          cmd.waypoint[3];
      break;
    }
    case MissionPhase::Approach: {
      cmd.waypoint = hover_pose_over(*s.target_position, s.hold_yaw);
      cmd.setpoint << speed_limited_reference(s.leg_origin, cmd.waypoint.head<3>(), config_.cruise_speed, elapsed,
                                                  config_.reference_decel),
          cmd.waypoint[3];
      break;
    }
    case MissionPhase::StabilizeHover:
    case MissionPhase::ArmDeploy:
    case MissionPhase::Grasp:
      cmd.waypoint = hover_pose_over(*s.target_position, s.hold_yaw);
      cmd.setpoint = cmd.waypoint;
      if (s.phase == MissionPhase::ArmDeploy) cmd.arm_target = s.pre_grasp_target;
      if (s.phase == MissionPhase::Grasp) {
        cmd.arm_target = s.grasp_target;
        cmd.suction = true;
      }
      break;
    case MissionPhase::Transport: {
      cmd.waypoint = transport_goal(s);
      if (s.transport_start_time) {
        cmd.setpoint << speed_limited_reference(s.leg_origin, cmd.waypoint.head<3>(), config_.transport_speed,
                                                elapsed, config_.reference_decel),
            cmd.waypoint[3];
      } else {
        cmd.setpoint = hover_pose_over(*s.target_position, s.hold_yaw);
      }
      cmd.arm_target = s.pre_grasp_target;
      cmd.suction = true;
      break;
    }
    case MissionPhase::Done:
      cmd.waypoint = transport_goal(s);
      cmd.setpoint = cmd.waypoint;
      cmd.arm_target = s.pre_grasp_target;
      cmd.suction = false;
      break;
    case MissionPhase::Abort:
      cmd.waypoint = ins.pose();
      cmd.setpoint = cmd.waypoint;
      cmd.suction = false;
      break;
  }
  return result;
}

}  // namespace hadal
