#pragma once

#include <map>
#include <ostream>
#include <string_view>

#include "dronesim/env.hpp"

namespace dronesim {

/// Column header of the per-drone step log.
///
///   step, t, drone, x, y, z, qw, qx, qy, qz, roll, pitch, yaw,
///   vx, vy, vz, wx, wy, wz, rpm0..rpm3, cmd0..cmd3, reward
///
/// `step` is the 0-based control step, `t` the simulated time after it, the
/// 20 state columns are unnormalized, `reward` is empty when the drone has none.
/// Reals are written with 17 significant digits.
std::string_view step_log_header();

class StepLogWriter {
 public:
  explicit StepLogWriter(std::ostream& out);

  /// One row per drone for the environment's most recent step.
  void write(const Env& env, const std::map<int, double>& rewards);

  std::size_t rows() const { return rows_; }

 private:
  std::ostream& out_;
  std::size_t rows_ = 0;
};

}  // namespace dronesim
