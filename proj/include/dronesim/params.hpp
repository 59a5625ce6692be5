#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dronesim/kv_file.hpp"
#include "dronesim/pid_gains.hpp"
#include "dronesim/types.hpp"

namespace dronesim {

/// Physical constants of one vehicle type. SI units; rotor speeds in RPM.
struct DroneModel {
  std::string name;
  Frame frame = Frame::cross;
  double mass = 0.0;           // kg
  double arm = 0.0;            // m, center to motor
  Vec3 inertia_diag = Vec3::Zero();  // kg m^2
  double kf = 0.0;             // N / RPM^2
  double kt = 0.0;             // N m / RPM^2
  double prop_radius = 0.0;    // m
  double max_rpm = 0.0;
  Vec3 drag_coeffs = Vec3::Zero();  // N s/m per rad/s of summed rotor speed
  double kg_coeff = 0.0;       // ground effect, dimensionless
  double kd1 = 0.0;            // downwash, N
  double kd2 = 0.0;            // downwash, dimensionless
  double kd3 = 0.0;            // downwash, m
  double neighbor_radius_default = 0.0;  // m

  friend bool operator==(const DroneModel&, const DroneModel&) = default;
};

/// Checks every DroneModel invariant against `gravity`; throws ConfigError.
void validate(const DroneModel& model, double gravity = 9.8);

DroneModel parse_drone_model(const KvDocument& doc, double gravity = 9.8);
DroneModel load_drone_model(const std::filesystem::path& path, double gravity = 9.8);
std::string serialize_drone_model(const DroneModel& model);

/// Rotor speed at which collective thrust balances weight.
double hover_rpm(const DroneModel& model, double gravity);

/// Maps squared motor speeds to [thrust, tau_x, tau_y, tau_z] (body frame).
Mat4 mixing_matrix(const DroneModel& model);

/// Motor station in the body frame (z = 0).
Vec3 motor_position(const DroneModel& model, int motor);

struct DroneSpec {
  DroneModel model;
  PidGains gains;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

struct TaskParams {
  TaskKind kind = TaskKind::none;
  /// Hover set point, or the leader's set point for leader_follower.
  Vec3 target{0.0, 0.0, 1.0};
  /// Desired follower altitude minus leader altitude.
  double follower_offset = 0.0;
};

struct WorldConfig {
  std::vector<DroneSpec> drones;
  double gravity = 9.8;
  int physics_hz = 240;
  int control_hz = 48;
  Integrator integrator = Integrator::euler;
  AeroToggle effects;
  double duration_s = 10.0;
  std::uint64_t seed = 0;
  TaskParams task;
  ActionMode action_mode = ActionMode::rpm;

  /// Relative RPM swing of the one-dimensional action around hover.
  double one_d_scale = 0.05;
  /// When set, observations carry an adjacency row for this radius.
  std::optional<double> adjacency_radius;
  /// Normalization bounds used when a task is active.
  double workspace_bound = 10.0;
  double ang_rate_bound = 20.0;

  int substeps() const { return physics_hz / control_hz; }
  bool normalized_observations() const { return task.kind != TaskKind::none; }
};

void validate(const WorldConfig& config);

/// Directories consulted when a scenario names a model by reference.
struct DataPaths {
  std::filesystem::path models_dir;
  std::filesystem::path gains_dir;

  /// Paths under the installed/compiled data directory, or $DRONESIM_DATA_DIR.
  static DataPaths defaults();
  static std::filesystem::path data_root();
};

/// Builds a WorldConfig from scenario keys. Keys not belonging to the world
/// description are ignored here (the harness consumes them).
WorldConfig parse_world_config(const KvDocument& doc, const DataPaths& paths);
WorldConfig load_world_config(const std::filesystem::path& path);

}  // namespace dronesim
