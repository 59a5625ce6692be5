#pragma once

#include <cstdint>
#include <string>

#include "dronesim/types.hpp"

namespace dronesim {

struct BenchOptions {
  int drones = 1;  // per environment
  int envs = 1;
  double duration_s = 10.0;
  int threads = 1;
  int physics_hz = 240;
  int control_hz = 48;
  Integrator integrator = Integrator::euler;
  AeroToggle effects;
};

struct BenchReport {
  int drones = 0;
  int envs = 0;
  int physics_hz = 0;
  int control_hz = 0;
  double wall_seconds = 0.0;
  double sim_seconds = 0.0;  // per environment
  /// Simulated seconds generated per wall-clock second, summed over envs.
  double speedup = 0.0;
  /// Control steps (all envs) per wall-clock second.
  double steps_per_second = 0.0;
  std::uint64_t steps = 0;
  /// FNV-1a over the final states of every env, in env order.
  std::string checksum;
};

/// Steps `envs` independent PID-hover environments, whole environments
/// distributed round-robin over `threads` workers. Throws std::invalid_argument
/// for counts < 1 or a non-positive duration.
BenchReport bench(const BenchOptions& options);

std::string to_json(const BenchReport& report);

}  // namespace dronesim
