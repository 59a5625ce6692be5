#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dronesim/env.hpp"
#include "dronesim/kv_file.hpp"
#include "dronesim/params.hpp"

namespace dronesim {

/// Scripted command source driving a scenario.
enum class PolicyKind {
  hover,      // PID to (x0, y0, hover_altitude)
  circle,     // PID along a circle through each drone's start point
  crossing,   // PID along x(t) = x0 cos(2 pi t / T), opposite starts cross mid-way
  velocity,   // velocity commands from a time schedule
  one_d,      // PD altitude policy on the one-dimensional action
};

struct VelocityCommand {
  int drone = 0;
  double start_s = 0.0;
  Vec4 command = Vec4::Zero();
};

struct PolicyParams {
  PolicyKind kind = PolicyKind::hover;
  double hover_altitude = 1.0;
  Vec3 circle_center = Vec3::Zero();
  double circle_period = 6.0;
  double crossing_period = 8.0;
  std::vector<VelocityCommand> velocity_schedule;
  double one_d_kp = 2.0;
  double one_d_kd = 1.0;
};

struct Scenario {
  std::string name;
  WorldConfig world;
  PolicyParams policy;
  /// When set, the scenario runs twice: with ("on") and without ("off") these effects.
  std::optional<AeroToggle> compare;
  /// Resolved key/value echo written to the run manifest.
  KvDocument echo;
};

struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<Integrator> integrator;
};

/// Names of the scenario files shipped under data/scenarios.
const std::vector<std::string>& builtin_scenarios();

/// Loads a scenario file, or a built-in scenario when `ref` names one.
Scenario load_scenario(const std::string& ref, const ScenarioOverrides& overrides = {});
Scenario parse_scenario(const KvDocument& doc, const DataPaths& paths,
                        const ScenarioOverrides& overrides = {});

struct DroneMetrics {
  double max_z = 0.0;
  double min_z = 0.0;
  double max_vz = 0.0;
  Vec3 final_position = Vec3::Zero();
};

struct SubRunResult {
  std::string label;
  std::filesystem::path log_path;
  std::size_t rows = 0;
  std::uint64_t steps = 0;
  std::string done_reason;
  /// RMS planar distance to the policy's reference point (tracking policies).
  double rms_tracking_error = 0.0;
  /// RMS 3-D distance to the policy's reference point.
  double rms_position_error = 0.0;
  std::vector<DroneMetrics> drones;
};

struct ScenarioResult {
  std::string name;
  std::vector<SubRunResult> runs;
  std::filesystem::path manifest_path;

  const SubRunResult& run(std::string_view label) const;
};

/// Runs a scenario deterministically, writing step logs and manifest.json under
/// `out_dir` (created if needed). Throws on unwritable output or a non-finite state.
ScenarioResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

}  // namespace dronesim
