#pragma once

#include <Eigen/Geometry>

#include "dronesim/dynamics.hpp"
#include "dronesim/params.hpp"
#include "dronesim/pid_gains.hpp"

namespace dronesim {

/// Per-drone controller memory. Single owner; reset to default between episodes.
struct ControllerState {
  Vec3 pos_integral = Vec3::Zero();  // m s
  Vec3 att_integral = Vec3::Zero();  // rad s
  /// Last attitude target, held when the commanded thrust vanishes.
  Eigen::Quaterniond att_target = Eigen::Quaterniond::Identity();
  bool has_att_target = false;
};

struct ControlOutput {
  Rpm4 rpms = Rpm4::Zero();
  ControllerState state;
  double thrust = 0.0;          // N, before allocation
  Vec3 torques = Vec3::Zero();  // N m, before allocation
};

/// Allocates collective thrust and body torques to motors: solves
/// M s = [thrust, torques] for squared speeds s >= 0 (exactly when feasible,
/// otherwise in the non-negative least-squares sense), then RPM = sqrt(s)
/// clipped to max_rpm.
Rpm4 thrust_torques_to_rpms(const DroneModel& model, double thrust, const Vec3& torques);

/// Position/attitude cascade. Outputs always lie in [0, max_rpm].
ControlOutput pid_step(const DroneModel& model, const DroneState& state, const Vec3& target_pos,
                       const Vec3& target_vel, double target_yaw, const PidGains& gains,
                       const ControllerState& ctl, double dt, double gravity);

/// Speed at which drag at hover rotor speed reaches 20% of hover thrust.
/// Infinite for a drag-free model.
double max_speed(const DroneModel& model, double gravity);

/// Velocity-mode command [vx, vy, vz, vM]: the direction is normalized (zero
/// means hover in place) and the magnitude capped at max_speed. Throws
/// std::invalid_argument for negative vM.
ControlOutput velocity_command_to_rpms(const DroneModel& model, const DroneState& state,
                                       const Vec4& cmd, const PidGains& gains,
                                       const ControllerState& ctl, double dt, double gravity);

/// Target velocity implied by a velocity command (after normalization and cap).
Vec3 velocity_target(const DroneModel& model, const Vec4& cmd, double gravity);

}  // namespace dronesim
