#include "dronesim/dynamics.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

namespace dronesim {

namespace {

/// Body-frame thrust and torque, fixed for the duration of one step.
struct BodyWrench {
  double thrust = 0.0;
  Vec3 torque = Vec3::Zero();
};

BodyWrench body_wrench(const DroneModel& model, const Rpm4& rpms, const ExternalForces& ext) {
  const Vec4 squared = rpms.array().square();
  const Mat4 mix = mixing_matrix(model);
  const Vec4 wrench = mix * squared;
  BodyWrench out;
  out.thrust = wrench[0];
  out.torque = wrench.tail<3>();
  // Ground-effect bonuses act at motor stations: extra thrust plus roll/pitch moments.
  for (int i = 0; i < 4; ++i) {
    const double bonus = ext.per_motor_thrust_bonus[i];
    if (bonus == 0.0) continue;
    const Vec3 p = motor_position(model, i);
    out.thrust += bonus;
    out.torque.x() += p.y() * bonus;
    out.torque.y() -= p.x() * bonus;
  }
  return out;
}

struct Derivative {
  Vec3 position;
  Vec4 quaternion;  // (x, y, z, w) coefficient order
  Vec3 velocity;
  Vec3 ang_velocity;
};

struct Snapshot {
  Vec3 position;
  Vec4 quaternion;
  Vec3 velocity;
  Vec3 ang_velocity;
};

Vec3 linear_acc(const DroneModel& model, const Eigen::Quaterniond& q, const BodyWrench& w,
                const ExternalForces& ext, double gravity) {
  const Vec3 thrust_world = q.toRotationMatrix().col(2) * w.thrust;
  Vec3 f = thrust_world + ext.world_force;
  f.z() -= model.mass * gravity;
  return f / model.mass;
}

Vec3 angular_acc(const DroneModel& model, const Vec3& omega, const BodyWrench& w) {
  const Vec3 j_omega = model.inertia_diag.cwiseProduct(omega);
  return (w.torque - omega.cross(j_omega)).cwiseQuotient(model.inertia_diag);
}

Vec4 quaternion_rate(const Vec4& q, const Vec3& omega) {
  // q_dot = 1/2 q (x) [0, omega], body rates.
  const Eigen::Quaterniond qq(q[3], q[0], q[1], q[2]);
  const Eigen::Quaterniond w(0.0, omega.x(), omega.y(), omega.z());
  return 0.5 * (qq * w).coeffs();
}

Derivative derivative(const DroneModel& model, const Snapshot& s, const BodyWrench& w,
                      const ExternalForces& ext, double gravity) {
  const Eigen::Quaterniond q = Eigen::Quaterniond(s.quaternion[3], s.quaternion[0],
                                                  s.quaternion[1], s.quaternion[2])
                                   .normalized();
  return {s.velocity, quaternion_rate(s.quaternion, s.ang_velocity),
          linear_acc(model, q, w, ext, gravity), angular_acc(model, s.ang_velocity, w)};
}

Snapshot advance(const Snapshot& s, const Derivative& d, double h) {
  return {s.position + h * d.position, s.quaternion + h * d.quaternion,
          s.velocity + h * d.velocity, s.ang_velocity + h * d.ang_velocity};
}

void check_range(const DroneModel& model, const Rpm4& rpms) {
  for (int i = 0; i < 4; ++i) {
    if (!(rpms[i] >= 0.0 && rpms[i] <= model.max_rpm)) {
      throw std::invalid_argument("rpm[" + std::to_string(i) + "] = " + std::to_string(rpms[i]) +
                                  " outside [0, " + std::to_string(model.max_rpm) + "]");
    }
  }
}

void check_finite(const DroneState& s) {
  if (!s.position.allFinite()) throw NonFiniteStateError("non-finite state: position");
  if (!s.quaternion.coeffs().allFinite()) throw NonFiniteStateError("non-finite state: quaternion");
  if (!s.velocity.allFinite()) throw NonFiniteStateError("non-finite state: velocity");
  if (!s.ang_velocity.allFinite()) throw NonFiniteStateError("non-finite state: ang_velocity");
}

}  // namespace

bool bitwise_equal(const DroneState& a, const DroneState& b) {
  auto same = [](const auto& x, const auto& y) {
    return std::memcmp(x.data(), y.data(), sizeof(double) * x.size()) == 0;
  };
  return same(a.position, b.position) && same(a.quaternion.coeffs(), b.quaternion.coeffs()) &&
         same(a.velocity, b.velocity) && same(a.ang_velocity, b.ang_velocity) &&
         same(a.last_rpms, b.last_rpms);
}

MotorWrench motor_wrench(const DroneModel& model, const Rpm4& rpms) {
  check_range(model, rpms);
  MotorWrench w;
  const Vec4 squared = rpms.array().square();
  w.forces = model.kf * squared;
  w.yaw_torque = model.kt * (-squared[0] + squared[1] - squared[2] + squared[3]);
  return w;
}

Accelerations accelerations(const DroneModel& model, const DroneState& state, const Rpm4& rpms,
                            const ExternalForces& ext, double gravity) {
  check_range(model, rpms);
  const BodyWrench w = body_wrench(model, rpms, ext);
  return {linear_acc(model, state.quaternion.normalized(), w, ext, gravity),
          angular_acc(model, state.ang_velocity, w)};
}

DroneState step_dynamics(const DroneModel& model, const DroneState& state, const Rpm4& rpms,
                         const ExternalForces& ext, double dt, Integrator integrator,
                         double gravity) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step_dynamics: dt must be positive, got " + std::to_string(dt));
  }
  check_range(model, rpms);
  const BodyWrench w = body_wrench(model, rpms, ext);
  const Snapshot s0{state.position, state.quaternion.coeffs(), state.velocity,
                    state.ang_velocity};

  Snapshot s1;
  if (integrator == Integrator::euler) {
    s1 = advance(s0, derivative(model, s0, w, ext, gravity), dt);
  } else {
    const Derivative k1 = derivative(model, s0, w, ext, gravity);
    const Derivative k2 = derivative(model, advance(s0, k1, 0.5 * dt), w, ext, gravity);
    const Derivative k3 = derivative(model, advance(s0, k2, 0.5 * dt), w, ext, gravity);
    const Derivative k4 = derivative(model, advance(s0, k3, dt), w, ext, gravity);
    const double h6 = dt / 6.0;
    s1.position = s0.position + h6 * (k1.position + 2.0 * k2.position + 2.0 * k3.position + k4.position);
    s1.quaternion = s0.quaternion + h6 * (k1.quaternion + 2.0 * k2.quaternion +
                                          2.0 * k3.quaternion + k4.quaternion);
    s1.velocity = s0.velocity + h6 * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity);
    s1.ang_velocity = s0.ang_velocity + h6 * (k1.ang_velocity + 2.0 * k2.ang_velocity +
                                              2.0 * k3.ang_velocity + k4.ang_velocity);
  }

  DroneState out;
  out.position = s1.position;
  out.quaternion = Eigen::Quaterniond(s1.quaternion[3], s1.quaternion[0], s1.quaternion[1],
                                      s1.quaternion[2]);
  out.quaternion.normalize();
  out.velocity = s1.velocity;
  out.ang_velocity = s1.ang_velocity;
  out.last_rpms = rpms;
  check_finite(out);
  return out;
}

EulerAngles euler_angles(const Eigen::Quaterniond& q) {
  const Mat3 r = q.normalized().toRotationMatrix();
  EulerAngles e;
  const double cos_pitch = std::hypot(r(0, 0), r(1, 0));
  e.pitch = std::atan2(-r(2, 0), cos_pitch);
  if (cos_pitch < 1e-12) {
    e.roll = 0.0;
    e.yaw = std::atan2(-r(0, 1), r(1, 1));
  } else {
    e.roll = std::atan2(r(2, 1), r(2, 2));
    e.yaw = std::atan2(r(1, 0), r(0, 0));
  }
  // Half-open ranges (-pi, pi].
  if (e.roll == -std::numbers::pi) e.roll = std::numbers::pi;
  if (e.yaw == -std::numbers::pi) e.yaw = std::numbers::pi;
  return e;
}

Eigen::Quaterniond quaternion_from_euler(double roll, double pitch, double yaw) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                            Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

}  // namespace dronesim
