#include "dronesim/control.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "dronesim/nnls.hpp"

namespace dronesim {

namespace {

Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

Vec3 clamp_symmetric(const Vec3& v, const Vec3& limit) {
  return v.cwiseMax(-limit).cwiseMin(limit);
}

/// Integral bound per axis so that gain * integral * scale stays within `limit`.
Vec3 integral_bound(const Vec3& gain, const Vec3& scale, double limit) {
  Vec3 bound;
  for (int k = 0; k < 3; ++k) {
    bound[k] = gain[k] > 0.0 ? limit / (gain[k] * scale[k]) : 0.0;
  }
  return bound;
}

Eigen::Quaterniond attitude_from_thrust(const Vec3& z_axis, double yaw) {
  const Vec3 heading(std::cos(yaw), std::sin(yaw), 0.0);
  Vec3 y_axis = z_axis.cross(heading);
  if (y_axis.norm() < 1e-9) {
    // Thrust along the heading: fall back to the body x axis perpendicular to it.
    y_axis = z_axis.cross(Vec3::UnitZ().cross(heading));
  }
  y_axis.normalize();
  const Vec3 x_axis = y_axis.cross(z_axis);
  Mat3 r;
  r.col(0) = x_axis;
  r.col(1) = y_axis;
  r.col(2) = z_axis;
  return Eigen::Quaterniond(r);
}

}  // namespace

Rpm4 thrust_torques_to_rpms(const DroneModel& model, double thrust, const Vec3& torques) {
  if (!std::isfinite(thrust) || !torques.allFinite()) {
    throw std::invalid_argument("thrust_torques_to_rpms: non-finite input");
  }
  // Solve in units of max_rpm^2 to keep the columns O(1); the residual is unchanged.
  const double scale = model.max_rpm * model.max_rpm;
  const Mat4 a = mixing_matrix(model) * scale;
  const Vec4 b(thrust, torques.x(), torques.y(), torques.z());
  Vec4 u = a.partialPivLu().solve(b);
  if ((u.array() < 0.0).any()) u = nnls_solve(a, b).x;
  Rpm4 rpms;
  for (int i = 0; i < 4; ++i) {
    rpms[i] = std::min(std::sqrt(std::max(u[i], 0.0) * scale), model.max_rpm);
  }
  return rpms;
}

ControlOutput pid_step(const DroneModel& model, const DroneState& state, const Vec3& target_pos,
                       const Vec3& target_vel, double target_yaw, const PidGains& gains,
                       const ControllerState& ctl, double dt, double gravity) {
  if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be positive");
  ControlOutput out;
  out.state = ctl;
  ControllerState& next = out.state;

  // Position loop.
  const Vec3 pos_err = target_pos - state.position;
  const Vec3 vel_err = target_vel - state.velocity;
  next.pos_integral += pos_err * dt;
  next.pos_integral = clamp_symmetric(
      next.pos_integral, integral_bound(gains.pos_i, Vec3::Constant(model.mass), gains.force_limit));
  const Vec3 acc_cmd = gains.pos_p.cwiseProduct(pos_err) +
                       gains.pos_i.cwiseProduct(next.pos_integral) +
                       gains.pos_d.cwiseProduct(vel_err);
  Vec3 force = model.mass * acc_cmd;
  force.z() += model.mass * gravity;

  const Mat3 rot = state.rotation();
  const double max_thrust = 4.0 * model.kf * model.max_rpm * model.max_rpm;
  out.thrust = std::clamp(force.dot(rot.col(2)), 0.0, max_thrust);

  // Desired attitude from thrust direction and yaw; hold it when thrust vanishes.
  const double force_norm = force.norm();
  if (force_norm > 1e-9 * model.mass * std::max(gravity, 1.0)) {
    next.att_target = attitude_from_thrust(force / force_norm, target_yaw);
    next.has_att_target = true;
  } else if (!next.has_att_target) {
    next.att_target = state.quaternion;
    next.has_att_target = true;
  }
  const Mat3 rot_des = next.att_target.toRotationMatrix();

  // Attitude loop.
  const Vec3 att_err = 0.5 * vee(rot_des.transpose() * rot - rot.transpose() * rot_des);
  next.att_integral += att_err * dt;
  next.att_integral = clamp_symmetric(
      next.att_integral, integral_bound(gains.att_i, model.inertia_diag, gains.torque_limit));
  const Vec3 ang_acc_cmd = -gains.att_p.cwiseProduct(att_err) -
                           gains.att_i.cwiseProduct(next.att_integral) -
                           gains.att_d.cwiseProduct(state.ang_velocity);
  const Vec3& omega = state.ang_velocity;
  out.torques = model.inertia_diag.cwiseProduct(ang_acc_cmd) +
                omega.cross(model.inertia_diag.cwiseProduct(omega));

  // Keep yaw demand inside what the collective thrust can support.
  const double yaw_cap = 0.5 * (model.kt / model.kf) * out.thrust;
  out.torques.z() = std::clamp(out.torques.z(), -yaw_cap, yaw_cap);

  out.rpms = thrust_torques_to_rpms(model, out.thrust, out.torques);
  return out;
}

double max_speed(const DroneModel& model, double gravity) {
  const double kd = model.drag_coeffs.maxCoeff();
  if (!(kd > 0.0)) return std::numeric_limits<double>::infinity();
  const double rotor_rad_s = 4.0 * (2.0 * std::numbers::pi / 60.0) * hover_rpm(model, gravity);
  return 0.2 * model.mass * gravity / (kd * rotor_rad_s);
}

Vec3 velocity_target(const DroneModel& model, const Vec4& cmd, double gravity) {
  if (!cmd.allFinite()) throw std::invalid_argument("velocity command: non-finite input");
  if (cmd[3] < 0.0) {
    throw std::invalid_argument("velocity command: negative magnitude vM = " +
                                std::to_string(cmd[3]));
  }
  const Vec3 dir = cmd.head<3>();
  const double norm = dir.norm();
  if (norm == 0.0) return Vec3::Zero();
  const double speed = std::min(cmd[3], max_speed(model, gravity));
  return (speed / norm) * dir;
}

ControlOutput velocity_command_to_rpms(const DroneModel& model, const DroneState& state,
                                       const Vec4& cmd, const PidGains& gains,
                                       const ControllerState& ctl, double dt, double gravity) {
  const Vec3 target_vel = velocity_target(model, cmd, gravity);
  const double yaw = euler_angles(state).yaw;
  return pid_step(model, state, state.position, target_vel, yaw, gains, ctl, dt, gravity);
}

}  // namespace dronesim
