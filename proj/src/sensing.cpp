#include "hadal/sensing.hpp"

#include "hadal/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace hadal {

namespace {

constexpr std::uint64_t kImuStream = 1;
constexpr std::uint64_t kDvlStream = 2;
constexpr std::uint64_t kPressureStream = 3;
constexpr std::uint64_t kCameraStream = 4;

}  // namespace

void SensorSuiteConfig::validate() const {
  if (rates.imu <= 0 || rates.dvl <= 0 || rates.pressure <= 0 || rates.camera <= 0) {
    throw ValidationError("sensor rates > 0", "non-positive rate");
  }
  if (imu_yaw_noise_std < 0.0 || dvl_velocity_noise_std < 0.0 || pressure_noise_std < 0.0 ||
      detection_noise_std < 0.0) {
    throw ValidationError("sensor noise std >= 0", "negative standard deviation");
  }
  if (!(camera.half_angle > 0.0 && camera.half_angle < kPi / 2.0)) {
    throw ValidationError("camera.half_angle in (0, 90) deg", "out of range");
  }
  if (!(camera.max_range > 0.0)) throw ValidationError("camera.max_range > 0", "non-positive");
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double GaussianStream::uniform() {
  // 53 random bits mapped into (0, 1)
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * kPi * uniform();
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

SensorStreams::SensorStreams(std::uint64_t seed)
    : imu(seed, kImuStream), dvl(seed, kDvlStream), pressure(seed, kPressureStream), camera(seed, kCameraStream) {}

InsEstimate InsEstimate::from_truth(const VehicleState& truth) {
  InsEstimate e;
  e.position = truth.position;
  e.yaw = truth.yaw;
  e.velocity = truth.ned_velocity();
  e.timestamp = truth.time;
  return e;
}

double depth_to_pressure(double depth, const Environment& env) {
  return (env.water_density_surface + 0.5 * env.density_gradient * depth) * env.gravity * depth;
}

double pressure_to_depth(double pressure, const Environment& env) {
  if (pressure <= 0.0) return 0.0;
  // root of (k g / 2) d^2 + rho0 g d - P = 0, in the form that stays exact as k -> 0
  const double linear = env.water_density_surface * env.gravity;
  const double discriminant = linear * linear + 2.0 * env.density_gradient * env.gravity * pressure;
  return 2.0 * pressure / (linear + std::sqrt(discriminant));
}

void sample_imu(SensorFrame& frame, const VehicleState& truth, const SensorSuiteConfig& config, GaussianStream& rng) {
  frame.imu_yaw = wrap_angle(truth.yaw + config.imu_yaw_bias + rng.next(config.imu_yaw_noise_std));
  frame.imu_yaw_rate = truth.body_velocity[3];
  frame.valid.imu = true;
  frame.timestamp = truth.time;
}

void sample_dvl(SensorFrame& frame, const Vec3& measured_body_velocity, const SensorSuiteConfig& config,
                GaussianStream& rng) {
  for (int i = 0; i < 3; ++i) {
    frame.dvl_body_velocity[i] =
        measured_body_velocity[i] + config.dvl_velocity_bias[i] + rng.next(config.dvl_velocity_noise_std);
  }
  frame.valid.dvl = true;
}

void sample_pressure(SensorFrame& frame, const VehicleState& truth, const SensorSuiteConfig& config,
                     const Environment& env, GaussianStream& rng) {
  frame.pressure = depth_to_pressure(truth.position.z(), env) + rng.next(config.pressure_noise_std);
  frame.valid.pressure = true;
  frame.timestamp = truth.time;
}

SensorFrame sample_sensors(const VehicleState& truth, const SensorSuiteConfig& config, const Environment& env,
                           SensorStreams& streams, const std::optional<Vec3>& mean_body_velocity) {
  SensorFrame frame;
  sample_imu(frame, truth, config, streams.imu);
  sample_dvl(frame, mean_body_velocity.value_or(Vec3(truth.body_velocity.head<3>())), config, streams.dvl);
  sample_pressure(frame, truth, config, env, streams.pressure);
  frame.timestamp = truth.time;
  return frame;
}

StaleFrame::StaleFrame(InsEstimate held) : Error("sensor frame has an invalid channel"), held_(std::move(held)) {}

InsEstimate ins_update(const InsEstimate& estimate, const SensorFrame& frame, const Environment& env, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("ins_update: dt must be positive");
  if (!frame.valid.all()) {
    InsEstimate held = estimate;
    held.degraded = true;
    throw StaleFrame(held);
  }
  InsEstimate next;
  next.yaw = frame.imu_yaw;
  const double c = std::cos(next.yaw);
  const double s = std::sin(next.yaw);
  const Vec3& v = frame.dvl_body_velocity;
  next.velocity = Vec3(c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z());
  next.position.x() = estimate.position.x() + next.velocity.x() * dt;
  next.position.y() = estimate.position.y() + next.velocity.y() * dt;
  next.position.z() = pressure_to_depth(frame.pressure, env);
  next.timestamp = frame.timestamp;
  next.degraded = false;
  return next;
}

std::optional<DetectionEvent> detect_target(const CameraGeometry& camera, const VehicleState& truth,
                                            const Vec3& object_position) {
  const Vec3 camera_position = truth.position + yaw_rotation(truth.yaw) * camera.mount_position;
  const Vec3 from_camera = object_position - camera_position;
  const double altitude = from_camera.z();
  if (altitude < 0.0 || altitude > camera.max_range) return std::nullopt;
  const double horizontal = std::hypot(from_camera.x(), from_camera.y());
  if (horizontal > altitude * std::tan(camera.half_angle)) return std::nullopt;
  return DetectionEvent{object_position - truth.position, truth.time};
}

}  // namespace hadal
