#pragma once

#include "hadal/control.hpp"
#include "hadal/dynamics.hpp"
#include "hadal/logging.hpp"
#include "hadal/manipulator.hpp"
#include "hadal/mission.hpp"
#include "hadal/scenario.hpp"
#include "hadal/sensing.hpp"
#include "hadal/summary.hpp"

#include <cstdint>
#include <optional>

namespace hadal {

struct RunOptions {
  std::optional<std::uint64_t> seed;       // overrides sensors.rng_seed
  std::optional<double> max_sim_time;      // overrides simulation.max_sim_time
  double settle_time_limit = 120.0;        // how long to watch a released object sink after Done
};

/// Fixed-step multi-rate loop. Physics ticks are the base clock; control runs
/// every physics_rate / control_rate ticks and its thruster and arm commands
/// are held until the next control tick.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config, LogSink* sink = nullptr, RunOptions options = {});

  /// Advances one physics tick, running the control stack first when it is due.
  void step();
  bool finished() const { return finished_; }
  /// Steps until finished and returns the summary with the wall time filled in.
  RunSummary run();

  long long tick() const { return tick_; }
  double time() const { return static_cast<double>(tick_) / config_.simulation.physics_rate; }
  bool control_due() const { return tick_ % control_divider_ == 0; }

  const ScenarioConfig& config() const { return config_; }
  const VehicleState& truth() const { return truth_; }
  const InsEstimate& ins() const { return ins_; }
  const MissionState& mission_state() const { return mission_state_; }
  const MissionExecutive& executive() const { return executive_; }
  const FreeObject& object() const { return object_; }
  const JointState& joints() const { return joints_; }
  const ThrusterSetpoints& thrusts() const { return thrusts_; }
  const Wrench& held_body_wrench() const { return held_wrench_; }
  const ThrusterLayout& layout() const { return layout_; }
  std::optional<Outcome> outcome() const { return outcome_; }
  RunSummary summary() const { return summary_.finish(); }

  /// Shifts the navigation estimate without touching the truth state.
  void offset_ins(const Vec3& delta) { ins_.position += delta; }

 private:
  void control_tick();
  void update_navigation(bool first);
  std::optional<DetectionEvent> sense_target();
  void step_mission(const std::optional<DetectionEvent>& detection);
  void command_thrusters();
  void command_arm();
  void handle_suction();
  void physics_tick();
  void abort_run(AbortReason reason);
  void emit(LogRecord record);
  bool arm_at_target() const;

  ScenarioConfig config_;
  LogSink* sink_;
  RunOptions options_;
  double physics_dt_;
  double control_dt_;
  long long control_divider_;
  long long max_ticks_;
  long long imu_divider_;
  long long dvl_divider_;
  long long pressure_divider_;
  long long camera_divider_;

  ThrusterLayout layout_;
  MissionExecutive executive_;
  SensorStreams streams_;
  SummaryBuilder summary_;

  long long tick_ = 0;
  bool finished_ = false;
  std::optional<Outcome> outcome_;
  std::optional<double> done_time_;

  VehicleState truth_;
  InsEstimate ins_;
  Vec3 last_dvl_position_ = Vec3::Zero();
  double last_dvl_time_ = 0.0;
  MissionState mission_state_;
  MissionCommand command_;
  GraspStatus pending_grasp_ = GraspStatus::None;
  PidState pid_state_;

  ThrusterSetpoints thrusts_ = ThrusterSetpoints::Zero();
  Wrench held_wrench_{0.0, 0.0, 0.0, 0.0, Frame::Body};

  JointState joints_;
  std::optional<QuinticTrajectory> arm_trajectory_;
  Vec3 arm_command_ = Vec3::Zero();

  FreeObject object_;
  bool settled_logged_ = false;
};

RunSummary run_simulation(const ScenarioConfig& config, LogSink* sink = nullptr, const RunOptions& options = {});

}  // namespace hadal
