#pragma once

#include <filesystem>
#include <string>

#include "dronesim/kv_file.hpp"
#include "dronesim/types.hpp"

namespace dronesim {

/// Cascade PID gains. Position gains map errors to acceleration (1/s^2, 1/s^3,
/// 1/s); attitude gains map errors to angular acceleration. The integrator
/// limits bound the force and torque the integral terms may contribute.
struct PidGains {
  Vec3 pos_p{6.0, 6.0, 10.0};
  Vec3 pos_i{0.5, 0.5, 0.2};
  Vec3 pos_d{4.0, 4.0, 6.0};
  Vec3 att_p{250.0, 250.0, 80.0};
  Vec3 att_i{0.0, 0.0, 0.0};
  Vec3 att_d{30.0, 30.0, 16.0};
  double force_limit = 0.05;    // N
  double torque_limit = 1e-4;   // N m

  friend bool operator==(const PidGains&, const PidGains&) = default;
};

void validate(const PidGains& gains);
PidGains parse_pid_gains(const KvDocument& doc);
PidGains load_pid_gains(const std::filesystem::path& path);
std::string serialize_pid_gains(const PidGains& gains);

}  // namespace dronesim
