#pragma once

#include "hadal/dynamics.hpp"
#include "hadal/errors.hpp"
#include "hadal/types.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace hadal {

struct SensorRates {
  int imu = 10;
  int dvl = 10;
  int pressure = 10;
  int camera = 10;
};

struct CameraGeometry {
  Vec3 mount_position = Vec3::Zero();  // vehicle frame
  double half_angle = 40.0 * kPi / 180.0;
  double max_range = 10.0;
};

struct SensorSuiteConfig {
  SensorRates rates;
  double imu_yaw_noise_std = 0.0;
  double imu_yaw_bias = 0.0;
  double dvl_velocity_noise_std = 0.0;
  Vec3 dvl_velocity_bias = Vec3::Zero();
  double pressure_noise_std = 0.0;
  double detection_noise_std = 0.0;
  std::uint64_t rng_seed = 42;
  CameraGeometry camera;

  void validate() const;
};

/// Gaussian samples from a 64-bit Mersenne Twister.
///
/// Uses Box-Muller on raw engine output so that the stream is identical across
/// standard library implementations (std::normal_distribution is not).
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream_id);
  double next();
  double next(double stddev) { return stddev == 0.0 ? 0.0 : stddev * next(); }

 private:
  double uniform();

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// One independent stream per sensor, all derived from the scenario seed.
struct SensorStreams {
  GaussianStream imu;
  GaussianStream dvl;
  GaussianStream pressure;
  GaussianStream camera;

  explicit SensorStreams(std::uint64_t seed);
};

struct ChannelValidity {
  bool imu = false;
  bool dvl = false;
  bool pressure = false;

  bool all() const { return imu && dvl && pressure; }
};

struct SensorFrame {
  double imu_yaw = 0.0;
  double imu_yaw_rate = 0.0;
  Vec3 dvl_body_velocity = Vec3::Zero();
  double pressure = 0.0;
  double timestamp = 0.0;
  ChannelValidity valid;
};

struct InsEstimate {
  Vec3 position = Vec3::Zero();  // NED
  double yaw = 0.0;
  Vec3 velocity = Vec3::Zero();  // NED
  double timestamp = 0.0;
  bool degraded = false;

  Pose4 pose() const { return {position.x(), position.y(), position.z(), yaw}; }
  static InsEstimate from_truth(const VehicleState& truth);
};

/// Hydrostatic pressure of the linear density column: (rho0 + k d / 2) g d.
double depth_to_pressure(double depth, const Environment& env);
/// Closed-form inverse of depth_to_pressure; negative pressures map to depth 0.
double pressure_to_depth(double pressure, const Environment& env);

void sample_imu(SensorFrame& frame, const VehicleState& truth, const SensorSuiteConfig& config, GaussianStream& rng);
/// measured_body_velocity is what the DVL sees before bias and noise.
void sample_dvl(SensorFrame& frame, const Vec3& measured_body_velocity, const SensorSuiteConfig& config,
                GaussianStream& rng);
void sample_pressure(SensorFrame& frame, const VehicleState& truth, const SensorSuiteConfig& config,
                     const Environment& env, GaussianStream& rng);

/// Samples every channel at once. The DVL reports mean_body_velocity when
/// given (velocity averaged over the ping interval), otherwise the
/// instantaneous body velocity.
SensorFrame sample_sensors(const VehicleState& truth, const SensorSuiteConfig& config, const Environment& env,
                           SensorStreams& streams, const std::optional<Vec3>& mean_body_velocity = std::nullopt);

/// Dead-reckoning update: yaw from the IMU, DVL velocity rotated into NED and
/// integrated for North/East, Down from pressure. Throws StaleFrame, carrying
/// the held (degraded) estimate, when any channel is invalid.
InsEstimate ins_update(const InsEstimate& estimate, const SensorFrame& frame, const Environment& env, double dt);

class StaleFrame : public Error {
 public:
  explicit StaleFrame(InsEstimate held);
  const InsEstimate& held() const { return held_; }

 private:
  InsEstimate held_;
};

struct DetectionEvent {
  Vec3 offset = Vec3::Zero();  // object minus vehicle position, NED
  double timestamp = 0.0;
};

/// Geometric stand-in for the down-looking camera: the object is seen when it
/// lies inside the camera's downward cone and within max_range below it.
std::optional<DetectionEvent> detect_target(const CameraGeometry& camera, const VehicleState& truth,
                                            const Vec3& object_position);

}  // namespace hadal
