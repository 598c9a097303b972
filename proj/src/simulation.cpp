#include "hadal/simulation.hpp"

#include "hadal/errors.hpp"

#include <chrono>
#include <cmath>

namespace hadal {

namespace {

long long divider(int base_rate, int rate) { return static_cast<long long>(base_rate / rate); }

const ScenarioConfig& validated(const ScenarioConfig& config) {
  config.validate();
  return config;
}

LogRecord record(RecordKind kind, double time, std::vector<FieldValue> values) {
  return LogRecord{kind, time, std::move(values)};
}

}  // namespace

Simulation::Simulation(ScenarioConfig config, LogSink* sink, RunOptions options)
    : config_(std::move(config)),
      sink_(sink),
      options_(options),
      physics_dt_(1.0 / validated(config_).simulation.physics_rate),
      control_dt_(1.0 / config_.simulation.control_rate),
      control_divider_(divider(config_.simulation.physics_rate, config_.simulation.control_rate)),
      max_ticks_(std::llround(options.max_sim_time.value_or(config_.simulation.max_sim_time) *
                              config_.simulation.physics_rate)),
      imu_divider_(divider(config_.simulation.physics_rate, config_.sensors.rates.imu)),
      dvl_divider_(divider(config_.simulation.physics_rate, config_.sensors.rates.dvl)),
      pressure_divider_(divider(config_.simulation.physics_rate, config_.sensors.rates.pressure)),
      camera_divider_(divider(config_.simulation.physics_rate, config_.sensors.rates.camera)),
      layout_(config_.thruster_layout()),
      executive_(config_.mission, config_.arm.geometry, config_.initial_pose),
      streams_(options.seed.value_or(config_.sensors.rng_seed)) {
  if (options.max_sim_time && !(*options.max_sim_time > 0.0)) {
    throw ValidationError("max_sim_time > 0", "run override is not positive");
  }
  truth_.position = config_.initial_pose.head<3>();
  truth_.yaw = wrap_angle(config_.initial_pose[3]);
  ins_ = InsEstimate::from_truth(truth_);
  last_dvl_position_ = truth_.position;
  mission_state_ = executive_.initial_state(ins_);
  joints_.q = config_.arm.stow;
  object_.position = config_.object.position;
}

void Simulation::emit(LogRecord r) {
  summary_.add(r);
  if (sink_) sink_->write(r);
}

RunSummary Simulation::run() {
  const auto start = std::chrono::steady_clock::now();
  while (!finished_) step();
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  RunSummary result = summary();
  result.set_wall_time(wall.count());
  return result;
}

void Simulation::step() {
  if (finished_) return;
  if (control_due()) {
    control_tick();
    if (finished_) return;
  }
  physics_tick();
  if (finished_) return;
  if (tick_ >= max_ticks_) {
    if (!outcome_) outcome_ = Outcome{OutcomeKind::Timeout, ""};
    finished_ = true;
  }
}

void Simulation::control_tick() {
  const double t = time();
  const bool first = tick_ == 0;
  update_navigation(first);

  emit(record(RecordKind::Truth, t,
              {truth_.position.x(), truth_.position.y(), truth_.position.z(), truth_.yaw, truth_.body_velocity[0],
               truth_.body_velocity[1], truth_.body_velocity[2], truth_.body_velocity[3]}));
  emit(record(RecordKind::Ins, t,
              {ins_.position.x(), ins_.position.y(), ins_.position.z(), ins_.yaw, ins_.velocity.x(),
               ins_.velocity.y(), ins_.velocity.z()}));

  const std::optional<DetectionEvent> detection = sense_target();
  if (!is_terminal(mission_state_.phase)) {
    step_mission(detection);
    if (finished_) return;
  }
  command_thrusters();
  if (finished_) return;
  command_arm();
  if (finished_) return;
  handle_suction();

  if (done_time_) {
    const bool resting = !object_.attached && object_.position.z() >= config_.environment.seafloor_depth;
    if (resting && !settled_logged_) {
      emit(record(RecordKind::Grasp, t,
                  {std::string("settled"), 0.0, object_.position.x(), object_.position.y(), object_.position.z()}));
      settled_logged_ = true;
    }
    if (settled_logged_ || t - *done_time_ >= options_.settle_time_limit) finished_ = true;
  }
}

void Simulation::update_navigation(bool first) {
  if (first) {
    ins_ = InsEstimate::from_truth(truth_);
    return;
  }
  const SensorSuiteConfig& cfg = config_.sensors;
  SensorFrame frame;
  frame.timestamp = truth_.time;
  if (tick_ % imu_divider_ == 0) sample_imu(frame, truth_, cfg, streams_.imu);
  if (tick_ % dvl_divider_ == 0) {
    // bottom-track velocity averaged over the ping interval, in the current body frame
    const double interval = truth_.time - last_dvl_time_;
    const Vec3 displacement = truth_.position - last_dvl_position_;
    const Vec3 mean_body = yaw_rotation(truth_.yaw).transpose() * (displacement / interval);
    sample_dvl(frame, mean_body, cfg, streams_.dvl);
    last_dvl_position_ = truth_.position;
    last_dvl_time_ = truth_.time;
  }
  if (tick_ % pressure_divider_ == 0) sample_pressure(frame, truth_, cfg, config_.environment, streams_.pressure);
  try {
    ins_ = ins_update(ins_, frame, config_.environment, truth_.time - ins_.timestamp);
  } catch (const StaleFrame& stale) {
    ins_ = stale.held();
  }
}

std::optional<DetectionEvent> Simulation::sense_target() {
  if (tick_ % camera_divider_ != 0 || object_.attached || done_time_) return std::nullopt;
  std::optional<DetectionEvent> seen = detect_target(config_.sensors.camera, truth_, object_.position);
  if (!seen) return std::nullopt;
  const double sigma = config_.sensors.detection_noise_std;
  seen->offset += Vec3(streams_.camera.next(sigma), streams_.camera.next(sigma), streams_.camera.next(sigma));
  emit(record(RecordKind::Detection, seen->timestamp, {seen->offset.x(), seen->offset.y(), seen->offset.z()}));
  return seen;
}

void Simulation::step_mission(const std::optional<DetectionEvent>& detection) {
  const double t = time();
  MissionInputs in;
  in.ins = ins_;
  in.detection = detection;
  in.grasp = pending_grasp_;
  in.arm_at_target = arm_at_target();
  in.clock = t;
  pending_grasp_ = GraspStatus::None;

  MissionStepResult result;
  try {
    result = executive_.step(mission_state_, in);
  } catch (const Error&) {
    abort_run(AbortReason::ModuleError);
    return;
  }
  mission_state_ = result.state;
  command_ = result.command;
  if (result.captured_waypoint) {
    const Pose4& wp = executive_.plan().waypoints.at(*result.captured_waypoint);
    emit(record(RecordKind::Waypoint, t,
                {static_cast<double>(*result.captured_waypoint), static_cast<double>(executive_.plan().waypoints.size()),
                 wp[0], wp[1], wp[2], wp[3]}));
  }
  if (result.transition) {
    const PhaseTransition& tr = *result.transition;
    emit(record(RecordKind::Phase, tr.time,
                {std::string(to_string(tr.from)), std::string(to_string(tr.to)), std::string(to_string(tr.reason))}));
    if (tr.to == MissionPhase::Done) {
      outcome_ = Outcome{OutcomeKind::Done, ""};
      done_time_ = t;
    } else if (tr.to == MissionPhase::Abort) {
      outcome_ = Outcome{OutcomeKind::Abort, std::string(to_string(tr.reason))};
      finished_ = true;
    }
  }
}

void Simulation::command_thrusters() {
  const double t = time();
  try {
    const Vec4 error = pose_error(command_.setpoint, ins_.pose());
    PidOutput out = pid_step(config_.pid, pid_state_, error, control_dt_);
    pid_state_ = out.state;
    const Wrench body = world_to_body(out.wrench, ins_.yaw);
    thrusts_ = layout_.allocate(body);
    held_wrench_ = layout_.produced_wrench(thrusts_);
    emit(record(RecordKind::Wrench, t,
                {out.wrench.fx, out.wrench.fy, out.wrench.fz, out.wrench.tau_yaw, body.fx, body.fy, body.fz,
                 body.tau_yaw}));
  } catch (const Error&) {
    abort_run(AbortReason::ModuleError);
    return;
  }
  std::vector<FieldValue> values;
  for (int i = 0; i < kThrusterCount; ++i) values.emplace_back(thrusts_[i]);
  emit(record(RecordKind::Thrusters, t, std::move(values)));
}

bool Simulation::arm_at_target() const {
  if (!arm_trajectory_) return (joints_.q - config_.arm.stow).cwiseAbs().maxCoeff() < config_.arm.at_target_tolerance;
  return time() >= arm_trajectory_->end_time() &&
         (joints_.q - arm_trajectory_->goal()).cwiseAbs().maxCoeff() < config_.arm.at_target_tolerance;
}

void Simulation::command_arm() {
  const double t = time();
  Vec3 goal = config_.arm.stow;
  try {
    if (command_.arm_target) goal = inverse_kinematics(config_.arm.geometry, *command_.arm_target);
  } catch (const Error&) {
    abort_run(AbortReason::ModuleError);
    return;
  }
  const Vec3 current_goal = arm_trajectory_ ? arm_trajectory_->goal() : config_.arm.stow;
  if (goal != current_goal || (!arm_trajectory_ && goal != joints_.q)) {
    arm_trajectory_.emplace(joints_.q, goal, config_.arm.move_duration, t);
  }
  JointTrajectoryPoint reference{t, goal, Vec3::Zero(), Vec3::Zero()};
  if (arm_trajectory_) reference = arm_trajectory_->sample(t);
  arm_command_ = accel_feedforward(config_.arm.gains, reference, joints_, config_.arm.geometry.joint_accel_limit);
  emit(record(RecordKind::Joints, t,
              {joints_.q[0], joints_.q[1], joints_.q[2], joints_.q_dot[0], joints_.q_dot[1], joints_.q_dot[2],
               arm_command_[0], arm_command_[1], arm_command_[2]}));
}

void Simulation::handle_suction() {
  const double t = time();
  const ArmGeometry& geom = config_.arm.geometry;
  if (command_.suction && !object_.attached && mission_state_.phase == MissionPhase::Grasp &&
      pending_grasp_ == GraspStatus::None && arm_at_target()) {
    const EndEffectorPose ee = end_effector_pose(geom, joints_.q, truth_.pose());
    const double gap = (object_.position - ee.position).norm();
    try {
      object_ = attach_object(object_, ee, config_.mission.grasp_gap);
      pending_grasp_ = GraspStatus::Attached;
      emit(record(RecordKind::Grasp, t,
                  {std::string("attached"), gap, object_.position.x(), object_.position.y(), object_.position.z()}));
    } catch (const AttachRejected& rejected) {
      pending_grasp_ = GraspStatus::Rejected;
      emit(record(RecordKind::Grasp, t,
                  {std::string("rejected"), rejected.gap(), object_.position.x(), object_.position.y(),
                   object_.position.z()}));
    }
  } else if (!command_.suction && object_.attached) {
    object_ = detach_object(object_);
    emit(record(RecordKind::Grasp, t,
                {std::string("released"), 0.0, object_.position.x(), object_.position.y(), object_.position.z()}));
  }
}

void Simulation::physics_tick() {
  try {
    truth_ = step_vehicle(truth_, config_.vehicle, config_.environment, held_wrench_, physics_dt_);
  } catch (const NonFiniteState&) {
    ++tick_;
    abort_run(AbortReason::NumericalFailure);
    return;
  }
  joints_ = integrate_joint_command(joints_, arm_command_, config_.arm.geometry, physics_dt_);
  if (object_.attached) {
    object_ = follow_end_effector(object_, end_effector_pose(config_.arm.geometry, joints_.q, truth_.pose()));
  } else {
    object_ = settle_object(object_, config_.environment, config_.object.settle_speed, physics_dt_);
  }
  ++tick_;
  // keep the truth clock on the tick grid
  truth_.time = time();
}

void Simulation::abort_run(AbortReason reason) {
  if (!is_terminal(mission_state_.phase)) {
    const MissionStepResult result = executive_.abort(mission_state_, reason, time());
    mission_state_ = result.state;
    if (result.transition) {
      const PhaseTransition& tr = *result.transition;
      emit(record(RecordKind::Phase, tr.time,
                  {std::string(to_string(tr.from)), std::string(to_string(tr.to)), std::string(to_string(tr.reason))}));
    }
  }
  if (!outcome_) outcome_ = Outcome{OutcomeKind::Abort, std::string(to_string(reason))};
  finished_ = true;
}

RunSummary run_simulation(const ScenarioConfig& config, LogSink* sink, const RunOptions& options) {
  Simulation sim(config, sink, options);
  return sim.run();
}

}  // namespace hadal
