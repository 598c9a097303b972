// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "hadal/control.hpp"
#include "hadal/dynamics.hpp"
#include "hadal/errors.hpp"
#include "hadal/logging.hpp"
#include "hadal/manipulator.hpp"
#include "hadal/mission.hpp"
#include "hadal/scenario.hpp"
#include "hadal/sensing.hpp"
#include "hadal/simulation.hpp"
#include "hadal/summary.hpp"

#include "support.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace hadal;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

Vec3 chain_tip(double l1, double l2, const Vec3& q) {
  const double reach = l1 * std::cos(q[1]) + l2 * std::cos(q[1] + q[2]);
  const double height = l1 * std::sin(q[1]) + l2 * std::sin(q[1] + q[2]);
  return {reach * std::cos(q[0]), reach * std::sin(q[0]), height};
}

Verdict ik_round_trip() {
  ArmGeometry arm;
  arm.l1 = 0.4;
  arm.l2 = 0.3;
  arm.mount_position.setZero();
  arm.joint_limits = {{{-kPi, kPi}, {-kPi, kPi}, {-kPi, 0.0}}};
  test::Rng rng(2024);
  const double r_min = arm.l1 - arm.l2;
  const double r_max = arm.l1 + arm.l2;
  double worst = 0.0;
  int elbow_violations = 0;
  int failures = 0;
  const auto start = Clock::now();
  for (int n = 0; n < 10000; ++n) {
    // uniform in the volume of the reachable shell
    const double r = std::cbrt(rng.uniform(r_min * r_min * r_min, r_max * r_max * r_max));
    const double cz = rng.uniform(-1.0, 1.0);
    const double az = rng.uniform(-kPi, kPi);
    const double s = std::sqrt(1.0 - cz * cz);
    const Vec3 target(r * s * std::cos(az), r * s * std::sin(az), r * cz);
    try {
      const Vec3 q = inverse_kinematics(arm, target);
      worst = std::max(worst, (chain_tip(arm.l1, arm.l2, q) - target).norm());
      if (q[2] < -kPi || q[2] > 0.0) ++elbow_violations;
    } catch (const Error&) {
      ++failures;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-9 && elbow_violations == 0 && failures == 0 && elapsed < 1.0,
          fmt("max error %.3g m, elbow outside [-pi,0]: %d, solver failures: %d, %.3f s", worst, elbow_violations,
              failures, elapsed)};
}

Verdict quintic_tracking() {
  const ArmGeometry arm;
  const ArmControlGains gains;  // Kp = 4, Kv = 2
  const Vec3 start(0.0, 0.2, -2.6);
  const Vec3 goal(0.9, 1.1, -0.8);
  const QuinticTrajectory traj(start, goal, 10.0);
  JointState s;
  s.q = start;
  const double dt = 0.01;
  double peak_raw = 0.0;
  bool over_limit = false;
  const auto begin = Clock::now();
  for (int n = 0; n < 1000; ++n) {
    const JointTrajectoryPoint ref = traj.sample(n * dt);
    const Vec3 raw = ref.q_ddot + gains.kv.cwiseProduct(ref.q_dot - s.q_dot) + gains.kp.cwiseProduct(ref.q - s.q);
    const Vec3 cmd = accel_feedforward(gains, ref, s, arm.joint_accel_limit);
    peak_raw = std::max(peak_raw, raw.cwiseAbs().maxCoeff());
    if ((raw.cwiseAbs().array() > arm.joint_accel_limit.array()).any()) over_limit = true;
    if ((cmd.cwiseAbs().array() > arm.joint_accel_limit.array()).any()) over_limit = true;
    s = integrate_joint_command(s, cmd, arm, dt);
  }
  const double terminal = (s.q - goal).cwiseAbs().maxCoeff();
  const double elapsed = seconds_since(begin);
  return {terminal < 1e-3 && !over_limit && elapsed < 1.0,
          fmt("terminal error %.3g rad, peak command %.3f rad/s^2 (limit %.1f), %.3f s", terminal, peak_raw,
              arm.joint_accel_limit.maxCoeff(), elapsed)};
}

Verdict pid_contract() {
  PidGains gains;
  gains.kp = Vec4(150, 150, 160, 50);
  gains.ki = Vec4(5, 5, 10, 1);
  gains.kd = Vec4(550, 580, 600, 160);
  gains.integral_limit = Vec4(20, 20, 5, 5);
  gains.deadband = Vec4::Constant(0.01);
  test::Rng rng(99);
  PidState state;
  int clamp_breaks = 0;
  for (int n = 0; n < 100000; ++n) {
    Vec4 e;
    for (int i = 0; i < 4; ++i) e[i] = rng.uniform(-50.0, 50.0);
    state = pid_step(gains, state, e, 0.1).state;
    if ((state.integral.cwiseAbs().array() > gains.integral_limit.array()).any()) ++clamp_breaks;
  }

  int nonzero_deadband = 0;
  PidState warm;
  warm.integral = Vec4(3, -2, 1, 0.5);
  warm.initialized = true;
  for (int n = 0; n < 1000; ++n) {
    Vec4 e;
    for (int i = 0; i < 4; ++i) e[i] = rng.uniform(-0.0099, 0.0099);
    warm.previous_error = e;
    const PidOutput out = pid_step(gains, warm, e, 0.1);
    if (out.wrench.vector() != Vec4::Zero()) ++nonzero_deadband;
  }

  double worst_norm = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const Wrench w{rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(-50, 50),
                   Frame::World};
    const Wrench b = world_to_body(w, rng.uniform(-4 * kPi, 4 * kPi));
    worst_norm = std::max(worst_norm, std::abs(b.vector().norm() - w.vector().norm()) / w.vector().norm());
  }
  return {clamp_breaks == 0 && nonzero_deadband == 0 && worst_norm <= 1e-12,
          fmt("clamp violations %d/100000, non-zero deadband outputs %d/1000, worst relative norm change %.2g",
              clamp_breaks, nonzero_deadband, worst_norm)};
}

Verdict allocation_consistency() {
  const ThrusterLayout layout = ThrusterLayout::symmetric_default(250.0);
  const AllocationMatrix& B = layout.allocation();
  // independent minimum-norm solve decides feasibility
  const Eigen::MatrixXd dense = B;
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(dense);
  test::Rng rng(5);
  int accepted = 0;
  double worst = 0.0;
  while (accepted < 10000) {
    const Vec4 F(rng.uniform(-700, 700), rng.uniform(-700, 700), rng.uniform(-1000, 1000), rng.uniform(-300, 300));
    const Eigen::VectorXd u_ref = cod.solve(Eigen::VectorXd(F));
    if (u_ref.cwiseAbs().maxCoeff() > 250.0) continue;
    ++accepted;
    const ThrusterSetpoints u = layout.allocate(Wrench::from_vector(F, Frame::Body));
    worst = std::max(worst, (B * u - F).norm() / F.norm());
  }
  const ThrusterSetpoints heave = layout.allocate(Wrench{0.0, 0.0, 8.0, 0.0, Frame::Body});
  bool exact = true;
  for (int i = 0; i < kThrusterCount; ++i) {
    const bool vertical = B(2, i) != 0.0;
    if (vertical && heave[i] != 2.0) exact = false;
  }
  return {worst < 1e-9 && exact, fmt("worst relative residual %.3g over 10000 wrenches, [0,0,8,0] -> %s", worst,
                                     exact ? "2 N on each vertical" : "not exactly 2 N")};
}

Verdict ins_drift() {
  SensorSuiteConfig cfg;
  cfg.dvl_velocity_bias = Vec3(0.01, 0.0, 0.0);
  const VehicleParams params;
  const Environment env;
  const double dt = 0.01;
  const int per_frame = 10;
  VehicleState truth;
  truth.position = Vec3(0.0, 0.0, 3000.0);
  SensorStreams streams(cfg.rng_seed);
  InsEstimate ins = InsEstimate::from_truth(truth);
  Vec3 last = truth.position;
  const Wrench surge{30.0, 0.0, -net_buoyancy_force(params, env, 3000.0), 0.0, Frame::Body};
  for (int f = 0; f < 6000; ++f) {
    for (int k = 0; k < per_frame; ++k) truth = step_vehicle(truth, params, env, surge, dt);
    const Vec3 mean_body = yaw_rotation(truth.yaw).transpose() * ((truth.position - last) / (per_frame * dt));
    last = truth.position;
    ins = ins_update(ins, sample_sensors(truth, cfg, env, streams, mean_body), env, per_frame * dt);
  }
  const Vec3 err = ins.position - truth.position;
  const double oracle = 0.01 * 600.0;
  return {std::abs(err.x() - oracle) <= 0.01 && std::abs(err.z()) < 1e-6 && truth.yaw == 0.0,
          fmt("North error %.6f m (expected %.1f +/- 0.01), East %.2g m, Down %.2g m", err.x(), oracle, err.y(),
              err.z())};
}

// Shared by the depth and end-to-end criteria.
struct MissionRun {
  std::filesystem::path dir;
  RunSummary summary;
  std::vector<LogRecord> records;
  double wall = 0.0;
};

MissionRun run_shipped(const std::string& name) {
  MissionRun run;
  run.dir = test::scratch_dir(name);
  RunOptions opts;
  opts.seed = 42;
  const auto start = Clock::now();
  {
    FileLogWriter writer(run.dir);
    Simulation sim(test::shipped_scenario(), &writer, opts);
    while (!sim.finished()) sim.step();
    run.summary = sim.summary();
  }
  run.wall = seconds_since(start);
  run.records = read_record_stream(run.dir);
  return run;
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<double> phase_time(const std::vector<LogRecord>& records, const std::string& from, const std::string& to) {
  for (const LogRecord& r : records) {
    if (r.kind == RecordKind::Phase && r.text("from") == from && r.text("to") == to) return r.time;
  }
  return std::nullopt;
}

Verdict depth_capture(const MissionRun& run, double target) {
  const auto survey_start = phase_time(run.records, "descend", "survey");
  const auto survey_end = phase_time(run.records, "survey", "approach");
  if (!survey_start || !survey_end) return {false, "survey phase never started or never ended"};
  double worst = 0.0;
  int samples = 0;
  for (const LogRecord& r : run.records) {
    if (r.kind != RecordKind::Truth || r.time < *survey_start || r.time > *survey_end) continue;
    worst = std::max(worst, std::abs(r.number("down") - target));
    ++samples;
  }
  return {samples > 0 && worst <= 0.5,
          fmt("max |depth - %.0f| = %.3f m over %d samples, survey %.1f s to %.1f s", target, worst, samples,
              *survey_start, *survey_end)};
}

Verdict end_to_end(const MissionRun& a, const MissionRun& b, const ScenarioConfig& config) {
  std::vector<std::string> problems;
  if (a.summary.outcome.kind != OutcomeKind::Done) problems.push_back("outcome " + a.summary.outcome.label());

  // capture is judged on the navigation estimate the vehicle had at that tick;
  // the truth distance is reported alongside
  std::map<double, Vec3> truth_at;
  std::map<double, Vec3> ins_at;
  for (const LogRecord& r : a.records) {
    if (r.kind != RecordKind::Truth && r.kind != RecordKind::Ins) continue;
    (r.kind == RecordKind::Truth ? truth_at : ins_at)[r.time] = Vec3(r.number(0), r.number(1), r.number(2));
  }
  const MissionExecutive exec(config.mission, config.arm.geometry, config.initial_pose);
  const auto& plan = exec.plan().waypoints;
  std::vector<bool> captured(plan.size(), false);
  double worst_capture = 0.0;
  for (const LogRecord& r : a.records) {
    if (r.kind != RecordKind::Waypoint) continue;
    const auto i = static_cast<std::size_t>(r.number("index"));
    if (i >= plan.size() || !truth_at.count(r.time) || !ins_at.count(r.time)) continue;
    worst_capture = std::max(worst_capture, (truth_at[r.time] - plan[i].head<3>()).norm());
    captured[i] = (ins_at[r.time] - plan[i].head<3>()).norm() <= config.mission.capture_radius;
  }
  int count = 0;
  for (bool c : captured) count += c;
  if (count != static_cast<int>(plan.size())) problems.push_back(fmt("captured %d/%zu", count, plan.size()));

  std::optional<double> gap;
  for (const LogRecord& r : a.records) {
    if (r.kind == RecordKind::Grasp && r.text("event") == "attached") gap = r.number("gap");
  }
  if (!gap || *gap > config.mission.grasp_gap) problems.push_back("no attach within grasp_gap");

  double drop_error = std::numeric_limits<double>::infinity();
  if (a.summary.object_final_position) {
    drop_error = (*a.summary.object_final_position - config.mission.dropoff_point).norm();
  }
  if (!(drop_error <= 0.5)) problems.push_back("object not at the drop-off");

  int compared = 0;
  bool identical = true;
  for (const auto& entry : std::filesystem::directory_iterator(a.dir)) {
    ++compared;
    if (slurp(entry.path()) != slurp(b.dir / entry.path().filename())) identical = false;
  }
  if (!identical || compared == 0) problems.push_back("logs differ between runs");

  const double sim_time = a.summary.sim_time;
  const double wall = std::max(a.wall, b.wall);
  if (!(wall <= sim_time / 20.0)) problems.push_back("slower than 20x real time");

  std::string detail = fmt(
      "outcome %s, waypoints %d/%zu captured (worst true distance at capture %.3f m), gap %.4f m, drop-off error %.3f m, %d log files "
      "%s, wall %.2f s for %.0f s simulated",
      a.summary.outcome.label().c_str(), count, plan.size(), worst_capture, gap.value_or(NAN), drop_error, compared,
      identical ? "identical" : "differ", wall, sim_time);
  for (const std::string& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

Verdict state_machine_walk() {
  MissionConfig config;
  const ArmGeometry arm;
  const MissionExecutive exec(config, arm, Pose4::Zero());
  const Vec3 target(-3.5, 12.0, 6004.0);
  const Vec3 hover = exec.hover_pose_over(target, 0.0).head<3>();
  const ArmTargets arm_targets = pre_grasp_arm_target(target - hover, 0.0, arm, config.grasp_standoff);
  const Vec3 positions[] = {Vec3::Zero(), Vec3(0, 0, config.target_depth), hover,
                            exec.plan().waypoints.front().head<3>(), exec.plan().waypoints.back().head<3>()};
  const double clocks[] = {0.0, 5.0, 100.0, 1e5};
  long pairs = 0;
  long undeclared = 0;
  long unexpected_errors = 0;
  for (MissionPhase phase : kAllPhases) {
    for (const Vec3& p : positions) {
      for (double clock : clocks) {
        for (int det = 0; det < 2; ++det) {
          for (GraspStatus g : {GraspStatus::None, GraspStatus::Attached, GraspStatus::Rejected}) {
            for (bool at_target : {false, true}) {
              for (int attempts = 0; attempts <= config.max_grasp_retries + 1; ++attempts) {
                MissionState s = exec.initial_state(InsEstimate{});
                s.phase = phase;
                s.target_position = target;
                s.target_offset = target - hover;
                s.pre_grasp_target = arm_targets.pre_grasp;
                s.grasp_target = arm_targets.grasp;
                s.stable_since = 0.0;
                s.grasp_attempts = attempts;
                MissionInputs in;
                in.ins.position = p;
                in.ins.timestamp = clock;
                if (det) in.detection = DetectionEvent{target - p, clock};
                in.grasp = g;
                in.arm_at_target = at_target;
                in.clock = clock;
                ++pairs;
                try {
                  const MissionStepResult r = exec.step(s, in);
                  if (r.transition && !is_declared_transition(r.transition->from, r.transition->to)) ++undeclared;
                  if (!r.transition && r.state.phase != phase) ++undeclared;
                  if (is_terminal(phase)) ++undeclared;  // terminal phases must refuse
                } catch (const InvalidTransition&) {
                  if (!is_terminal(phase)) ++unexpected_errors;
                } catch (...) {
                  ++unexpected_errors;
                }
              }
            }
          }
        }
      }
    }
  }

  // drive rejection after rejection and count entries into Grasp
  int worst_excess = 0;
  bool all_abort = true;
  for (int retries : {0, 1, 2, 3, 6}) {
    MissionConfig c = config;
    c.max_grasp_retries = retries;
    const MissionExecutive e(c, arm, Pose4::Zero());
    MissionState s = e.initial_state(InsEstimate{});
    s.phase = MissionPhase::StabilizeHover;
    s.target_position = target;
    s.target_offset = target - hover;
    int entries = 0;
    double t = 0.0;
    for (int k = 0; k < 200000 && !is_terminal(s.phase); ++k, t += 0.1) {
      MissionInputs in;
      in.ins.position = hover;
      in.ins.timestamp = t;
      in.arm_at_target = s.phase == MissionPhase::ArmDeploy;
      in.grasp = s.phase == MissionPhase::Grasp ? GraspStatus::Rejected : GraspStatus::None;
      in.clock = t;
      const MissionStepResult r = e.step(s, in);
      if (r.transition && r.transition->to == MissionPhase::Grasp) ++entries;
      s = r.state;
    }
    worst_excess = std::max(worst_excess, entries - (retries + 1));
    if (s.abort_reason != AbortReason::GraspFailed) all_abort = false;
  }
  return {undeclared == 0 && unexpected_errors == 0 && worst_excess <= 0 && all_abort,
          fmt("%ld (phase, event) pairs, %ld undeclared outcomes, %ld unexpected errors; grasp entries over "
              "retries+1: %d, retry exhaustion aborts: %s",
              pairs, undeclared, unexpected_errors, std::max(worst_excess, 0), all_abort ? "yes" : "no")};
}

Verdict coverage() {
  test::Rng rng(1234);
  const StartCorner corners[] = {StartCorner::SouthWest, StartCorner::SouthEast, StartCorner::NorthWest,
                                 StartCorner::NorthEast};
  double worst_ratio = 0.0;
  long samples = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double n0 = rng.uniform(-1000, 1000);
    const double e0 = rng.uniform(-1000, 1000);
    const SurveyBounds b{n0, n0 + rng.uniform(1, 300), e0, e0 + rng.uniform(1, 300)};
    const double spacing = rng.uniform(0.5, 80);
    const CoveragePlan plan = plan_lawnmower(b, spacing, 0.0, corners[trial % 4]);
    for (int k = 0; k < 100; ++k) {
      const Eigen::Vector2d p(rng.uniform(b.north_min, b.north_max), rng.uniform(b.east_min, b.east_max));
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < plan.waypoints.size(); i += 2) {
        const Eigen::Vector2d u = plan.waypoints[i].head<2>();
        const Eigen::Vector2d v = plan.waypoints[i + 1].head<2>();
        const double s = std::clamp((p - u).dot(v - u) / (v - u).squaredNorm(), 0.0, 1.0);
        best = std::min(best, (u + s * (v - u) - p).norm());
      }
      worst_ratio = std::max(worst_ratio, best / (spacing / 2.0));
      ++samples;
    }
  }
  return {worst_ratio <= 1.0 + 1e-12,
          fmt("%ld samples over 1000 rectangles, worst distance %.4f x (spacing/2)", samples, worst_ratio)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  };

  report("ik_fk_round_trip", ik_round_trip);
  report("joint_trajectory_tracking", quintic_tracking);
  report("pid_contract", pid_contract);
  report("allocation_consistency", allocation_consistency);
  report("ins_drift_law", ins_drift);

  std::optional<MissionRun> first;
  std::optional<MissionRun> second;
  std::string run_error;
  try {
    first = run_shipped("acceptance_run_a");
    second = run_shipped("acceptance_run_b");
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  const ScenarioConfig config = test::shipped_scenario();
  report("depth_capture", [&]() -> Verdict {
    if (!first) return {false, "mission run failed: " + run_error};
    return depth_capture(*first, config.mission.target_depth);
  });
  report("end_to_end_mission", [&]() -> Verdict {
    if (!first || !second) return {false, "mission run failed: " + run_error};
    return end_to_end(*first, *second, config);
  });
  report("state_machine_walk", state_machine_walk);
  report("coverage", coverage);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
