#include "hadal/scenario.hpp"

#include "hadal/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace hadal {

namespace {

[[noreturn]] void fail(const std::string& message, const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) throw ParseError(message);
  throw ParseError(message, mark.line, mark.column);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path + " must be a scalar", node);
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    fail(path + " has an invalid value '" + node.Scalar() + "'", node);
  }
}

void decode(const YAML::Node& node, const std::string& path, double& out) { out = scalar<double>(node, path); }
void decode(const YAML::Node& node, const std::string& path, int& out) { out = scalar<int>(node, path); }
void decode(const YAML::Node& node, const std::string& path, std::string& out) {
  out = scalar<std::string>(node, path);
}
void decode(const YAML::Node& node, const std::string& path, std::uint64_t& out) {
  out = scalar<std::uint64_t>(node, path);
}

template <int N>
void decode(const YAML::Node& node, const std::string& path, Eigen::Matrix<double, N, 1>& out) {
  if (!node.IsSequence() || node.size() != static_cast<std::size_t>(N)) {
    fail(path + " must be a list of " + std::to_string(N) + " numbers", node);
  }
  for (int i = 0; i < N; ++i) out[i] = scalar<double>(node[i], path + "[" + std::to_string(i) + "]");
}

template <std::size_t N>
void decode(const YAML::Node& node, const std::string& path, std::array<ThrustLimits, N>& out) {
  if (!node.IsSequence() || node.size() != N) fail(path + " must list " + std::to_string(N) + " [min, max] pairs", node);
  for (std::size_t i = 0; i < N; ++i) {
    Eigen::Vector2d pair;
    decode<2>(node[i], path + "[" + std::to_string(i) + "]", pair);
    out[i] = {pair[0], pair[1]};
  }
}

void decode(const YAML::Node& node, const std::string& path, std::array<JointLimits, 3>& out) {
  if (!node.IsSequence() || node.size() != 3) fail(path + " must list 3 [min, max] pairs", node);
  for (std::size_t i = 0; i < 3; ++i) {
    Eigen::Vector2d pair;
    decode<2>(node[i], path + "[" + std::to_string(i) + "]", pair);
    out[i] = {pair[0], pair[1]};
  }
}

void decode(const YAML::Node& node, const std::string& path, AllocationMatrix& out) {
  if (!node.IsSequence() || node.size() != 4) fail(path + " must have 4 rows of 8 entries", node);
  for (int r = 0; r < 4; ++r) {
    Eigen::Matrix<double, kThrusterCount, 1> row;
    decode<kThrusterCount>(node[r], path + "[" + std::to_string(r) + "]", row);
    out.row(r) = row.transpose();
  }
}

void decode(const YAML::Node& node, const std::string& path, StartCorner& out) {
  const auto name = scalar<std::string>(node, path);
  if (name == "south_west") out = StartCorner::SouthWest;
  else if (name == "south_east") out = StartCorner::SouthEast;
  else if (name == "north_west") out = StartCorner::NorthWest;
  else if (name == "north_east") out = StartCorner::NorthEast;
  else fail(path + " must be one of south_west, south_east, north_west, north_east", node);
}

/// A mapping whose keys must all be consumed; finish() rejects the rest.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(path_ + " must be a mapping", node_);
  }

  bool has(const std::string& key) const { return present() && node_[key]; }

  template <typename T>
  void read(const std::string& key, T& out) {
    known_.insert(key);
    if (!present()) return;
    const YAML::Node child = node_[key];
    if (child) decode(child, child_path(key), out);
  }

  template <typename T>
  void read_optional(const std::string& key, std::optional<T>& out) {
    known_.insert(key);
    if (!present()) return;
    const YAML::Node child = node_[key];
    if (!child) return;
    T value{};
    decode(child, child_path(key), value);
    out = value;
  }

  Section section(const std::string& key) {
    known_.insert(key);
    return Section(present() ? node_[key] : YAML::Node(), child_path(key));
  }

  YAML::Node raw(const std::string& key) {
    known_.insert(key);
    return present() ? node_[key] : YAML::Node();
  }

  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (!present()) return;
    for (const auto& entry : node_) {
      const std::string key = entry.first.as<std::string>();
      if (!known_.count(key)) {
        fail("unknown key '" + key + "'" + (path_.empty() ? "" : " in " + path_), entry.first);
      }
    }
  }

 private:
  bool present() const { return node_ && node_.IsMap(); }

  const YAML::Node node_;
  std::string path_;
  std::set<std::string> known_;
};

void parse_simulation(Section s, SimulationSettings& out) {
  s.read("physics_rate", out.physics_rate);
  s.read("control_rate", out.control_rate);
  s.read("max_sim_time", out.max_sim_time);
  s.read("log_dir", out.log_dir);
  s.finish();
}

void parse_environment(Section s, Environment& out) {
  s.read("water_density_surface", out.water_density_surface);
  s.read("density_gradient", out.density_gradient);
  s.read("gravity", out.gravity);
  s.read("seafloor_depth", out.seafloor_depth);
  s.read("current", out.current);
  const YAML::Node profile = s.raw("current_profile");
  if (profile && !profile.IsNull()) {
    const std::string path = s.child_path("current_profile");
    if (!profile.IsSequence()) fail(path + " must be a list", profile);
    out.current_profile.clear();
    for (std::size_t i = 0; i < profile.size(); ++i) {
      Section entry(profile[i], path + "[" + std::to_string(i) + "]");
      CurrentSample sample;
      entry.read("depth", sample.depth);
      entry.read("velocity", sample.velocity);
      entry.finish();
      out.current_profile.push_back(sample);
    }
  }
  s.finish();
}

void parse_vehicle(Section s, VehicleParams& out, Pose4& initial_pose) {
  s.read("mass", out.mass);
  s.read("added_mass", out.added_mass);
  s.read("inertia_yaw", out.inertia_yaw);
  s.read("linear_drag", out.linear_drag);
  s.read("quadratic_drag", out.quadratic_drag);
  s.read("hull_volume_surface", out.hull_volume_surface);
  s.read("hull_bulk_modulus", out.hull_bulk_modulus);
  s.read("max_thrust_per_thruster", out.max_thrust_per_thruster);
  s.read("initial_pose", initial_pose);
  s.finish();
}

void parse_thrusters(Section s, ThrusterSettings& out) {
  std::string layout = "symmetric_default";
  s.read("layout", layout);
  if (layout != "symmetric_default" && layout != "custom") {
    throw ValidationError("thrusters.layout in {symmetric_default, custom}", "got '" + layout + "'");
  }
  s.read_optional("allocation", out.allocation);
  s.read_optional("limits", out.limits);
  s.finish();
  if (layout == "custom" && (!out.allocation || !out.limits)) {
    throw ValidationError("custom thruster layout has allocation and limits", "missing entry");
  }
  if (layout == "symmetric_default") {
    out.allocation.reset();
    out.limits.reset();
  }
}

void parse_pid(Section s, PidGains& out) {
  s.read("kp", out.kp);
  s.read("ki", out.ki);
  s.read("kd", out.kd);
  s.read("integral_limit", out.integral_limit);
  s.read("deadband", out.deadband);
  s.finish();
}

void parse_arm(Section s, ArmSettings& out) {
  s.read("l1", out.geometry.l1);
  s.read("l2", out.geometry.l2);
  s.read("mount_position", out.geometry.mount_position);
  s.read("mount_yaw", out.geometry.mount_yaw);
  s.read("joint_limits", out.geometry.joint_limits);
  s.read("joint_accel_limit", out.geometry.joint_accel_limit);
  s.read("kp", out.gains.kp);
  s.read("kv", out.gains.kv);
  s.read("stow", out.stow);
  s.read("move_duration", out.move_duration);
  s.read("at_target_tolerance", out.at_target_tolerance);
  s.finish();
}

void parse_sensors(Section s, SensorSuiteConfig& out) {
  Section rates = s.section("rates");
  rates.read("imu", out.rates.imu);
  rates.read("dvl", out.rates.dvl);
  rates.read("pressure", out.rates.pressure);
  rates.read("camera", out.rates.camera);
  rates.finish();
  s.read("imu_yaw_noise_std", out.imu_yaw_noise_std);
  s.read("imu_yaw_bias", out.imu_yaw_bias);
  s.read("dvl_velocity_noise_std", out.dvl_velocity_noise_std);
  s.read("dvl_velocity_bias", out.dvl_velocity_bias);
  s.read("pressure_noise_std", out.pressure_noise_std);
  s.read("detection_noise_std", out.detection_noise_std);
  s.read("rng_seed", out.rng_seed);
  Section camera = s.section("camera");
  camera.read("mount_position", out.camera.mount_position);
  double half_angle_deg = out.camera.half_angle * 180.0 / kPi;
  camera.read("half_angle_deg", half_angle_deg);
  out.camera.half_angle = half_angle_deg * kPi / 180.0;
  camera.read("max_range", out.camera.max_range);
  camera.finish();
  s.finish();
}

void parse_mission(Section s, MissionConfig& out) {
  s.read("target_depth", out.target_depth);
  s.read("depth_capture", out.depth_capture);
  s.read("descent_speed", out.descent_speed);
  Section bounds = s.section("survey_bounds");
  bounds.read("north_min", out.survey_bounds.north_min);
  bounds.read("north_max", out.survey_bounds.north_max);
  bounds.read("east_min", out.survey_bounds.east_min);
  bounds.read("east_max", out.survey_bounds.east_max);
  bounds.finish();
  s.read("lane_spacing", out.lane_spacing);
  s.read("start_corner", out.start_corner);
  s.read("capture_radius", out.capture_radius);
  s.read("yaw_tolerance", out.yaw_tolerance);
  s.read("cruise_speed", out.cruise_speed);
  s.read("search_hold", out.search_hold);
  s.read("hover_altitude", out.hover_altitude);
  s.read("arm_reach_forward", out.arm_reach_forward);
  s.read("stabilize_threshold", out.stabilize_threshold);
  s.read("stabilize_dwell", out.stabilize_dwell);
  s.read("max_repositions", out.max_repositions);
  s.read("grasp_gap", out.grasp_gap);
  s.read("grasp_standoff", out.grasp_standoff);
  s.read("max_grasp_retries", out.max_grasp_retries);
  s.read("dropoff_point", out.dropoff_point);
  s.read("dropoff_capture", out.dropoff_capture);
  s.read("transport_speed", out.transport_speed);
  s.read("reference_decel", out.reference_decel);
  Section timeouts = s.section("timeouts");
  timeouts.read("descend", out.timeouts.descend);
  timeouts.read("survey", out.timeouts.survey);
  timeouts.read("approach", out.timeouts.approach);
  timeouts.read("stabilize", out.timeouts.stabilize);
  timeouts.read("arm_deploy", out.timeouts.arm_deploy);
  timeouts.read("grasp", out.timeouts.grasp);
  timeouts.read("transport", out.timeouts.transport);
  timeouts.finish();
  s.finish();
}

void parse_object(Section s, ObjectSettings& out) {
  s.read("position", out.position);
  s.read("settle_speed", out.settle_speed);
  s.finish();
}

bool divides(int base, int rate) { return rate > 0 && base % rate == 0; }

}  // namespace

void ScenarioConfig::validate() const {
  if (simulation.physics_rate <= 0 || simulation.control_rate <= 0) {
    throw ValidationError("simulation rates > 0", "non-positive rate");
  }
  if (!divides(simulation.physics_rate, simulation.control_rate)) {
    throw ValidationError("physics_rate is a multiple of control_rate",
                          std::to_string(simulation.physics_rate) + " Hz is not divisible by " +
                              std::to_string(simulation.control_rate) + " Hz");
  }
  sensors.validate();
  for (int rate : {sensors.rates.imu, sensors.rates.dvl, sensors.rates.pressure, sensors.rates.camera}) {
    if (!divides(simulation.physics_rate, rate)) {
      throw ValidationError("physics_rate is a multiple of every sensor rate",
                            std::to_string(simulation.physics_rate) + " Hz is not divisible by " +
                                std::to_string(rate) + " Hz");
    }
  }
  if (!(simulation.max_sim_time > 0.0)) throw ValidationError("simulation.max_sim_time > 0", "non-positive");
  if (1.0 / simulation.physics_rate > 0.1) throw ValidationError("physics step <= 0.1 s", "physics_rate below 10 Hz");

  environment.validate();
  vehicle.validate();
  pid.validate();
  arm.geometry.validate();
  arm.gains.validate();
  mission.validate();
  thruster_layout();

  if (!within_limits(arm.geometry, arm.stow)) throw ValidationError("arm.stow within joint limits", "stow pose");
  if (!(arm.move_duration > 0.0)) throw ValidationError("arm.move_duration > 0", "non-positive");
  if (!(arm.at_target_tolerance > 0.0)) throw ValidationError("arm.at_target_tolerance > 0", "non-positive");
  if (!initial_pose.allFinite() || initial_pose[2] < 0.0 || initial_pose[2] > environment.seafloor_depth) {
    throw ValidationError("vehicle.initial_pose depth within [0, seafloor_depth]", "out of range");
  }
  if (object.position.z() < 0.0 || object.position.z() > environment.seafloor_depth) {
    throw ValidationError("object.position depth within [0, seafloor_depth]", "out of range");
  }
  if (mission.dropoff_point.z() > environment.seafloor_depth) {
    throw ValidationError("mission.dropoff_point above the seafloor", "below seafloor");
  }
  if (mission.target_depth > environment.seafloor_depth) {
    throw ValidationError("mission.target_depth <= seafloor_depth", "target below seafloor");
  }
  if (!(object.settle_speed > 0.0)) throw ValidationError("object.settle_speed > 0", "non-positive");
}

ThrusterLayout ScenarioConfig::thruster_layout() const {
  if (thrusters.allocation && thrusters.limits) return ThrusterLayout(*thrusters.allocation, *thrusters.limits);
  return ThrusterLayout::symmetric_default(vehicle.max_thrust_per_thruster);
}

ScenarioConfig load_scenario(std::string_view document) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(document));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line, e.mark.column);
  }
  if (!root.IsMap()) throw ParseError("scenario document must be a mapping");

  ScenarioConfig config;
  Section top(root, "");
  top.read("name", config.name);
  parse_simulation(top.section("simulation"), config.simulation);
  parse_environment(top.section("environment"), config.environment);
  parse_vehicle(top.section("vehicle"), config.vehicle, config.initial_pose);
  parse_thrusters(top.section("thrusters"), config.thrusters);
  parse_pid(top.section("pid_gains"), config.pid);
  parse_arm(top.section("arm"), config.arm);
  parse_sensors(top.section("sensors"), config.sensors);
  parse_mission(top.section("mission"), config.mission);
  parse_object(top.section("object"), config.object);
  top.finish();

  config.validate();
  return config;
}

std::filesystem::path resolve_scenario_path(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return path / "scenario.yaml";
  return path;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  const auto file = resolve_scenario_path(path);
  std::ifstream in(file);
  if (!in) throw IoError("cannot open scenario '" + file.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str());
}

}  // namespace hadal
