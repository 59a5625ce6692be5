#pragma once

#include <stdexcept>

#include <Eigen/Geometry>

#include "dronesim/params.hpp"
#include "dronesim/types.hpp"

namespace dronesim {

/// Kinematic state of one vehicle. Attitude is stored only as a quaternion
/// (world from body); Euler angles are derived on demand.
struct DroneState {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond quaternion = Eigen::Quaterniond::Identity();
  Vec3 velocity = Vec3::Zero();      // world frame
  Vec3 ang_velocity = Vec3::Zero();  // body frame
  Rpm4 last_rpms = Rpm4::Zero();

  Mat3 rotation() const { return quaternion.toRotationMatrix(); }
};

bool bitwise_equal(const DroneState& a, const DroneState& b);

/// Forces computed outside the rigid-body model (aerodynamic effects).
struct ExternalForces {
  Vec3 world_force = Vec3::Zero();              // N, at the center of mass
  Vec4 per_motor_thrust_bonus = Vec4::Zero();   // N, body +z at each motor station

  ExternalForces& operator+=(const ExternalForces& o) {
    world_force += o.world_force;
    per_motor_thrust_bonus += o.per_motor_thrust_bonus;
    return *this;
  }
};

struct MotorWrench {
  Vec4 forces = Vec4::Zero();  // N per motor
  double yaw_torque = 0.0;     // N m
};

struct Accelerations {
  Vec3 linear = Vec3::Zero();   // world frame, m/s^2
  Vec3 angular = Vec3::Zero();  // body frame, rad/s^2
};

struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Thrown when integration produces a non-finite state.
class NonFiniteStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-motor thrust and the reaction yaw torque. Throws std::invalid_argument
/// for speeds outside [0, max_rpm].
MotorWrench motor_wrench(const DroneModel& model, const Rpm4& rpms);

Accelerations accelerations(const DroneModel& model, const DroneState& state, const Rpm4& rpms,
                            const ExternalForces& ext, double gravity);

/// One integration step. External forces are held constant across the step.
DroneState step_dynamics(const DroneModel& model, const DroneState& state, const Rpm4& rpms,
                         const ExternalForces& ext, double dt, Integrator integrator,
                         double gravity);

/// ZYX (yaw-pitch-roll) angles. At gimbal lock roll is reported as 0 and yaw
/// absorbs the free angle.
EulerAngles euler_angles(const Eigen::Quaterniond& q);
inline EulerAngles euler_angles(const DroneState& s) { return euler_angles(s.quaternion); }

Eigen::Quaterniond quaternion_from_euler(double roll, double pitch, double yaw);

}  // namespace dronesim
