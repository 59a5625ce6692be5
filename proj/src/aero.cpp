#include "dronesim/aero.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dronesim::aero {

Vec3 drag_force(const DroneModel& model, const DroneState& state) {
  const double rotor_rad_s = (2.0 * std::numbers::pi / 60.0) * state.last_rpms.sum();
  return -(model.drag_coeffs.cwiseProduct(state.velocity)) * rotor_rad_s;
}

double ground_effect_thrust(const DroneModel& model, double rpm, double altitude) {
  const double ratio = model.prop_radius / (4.0 * altitude);
  return model.kg_coeff * model.kf * ratio * ratio * rpm * rpm;
}

Vec4 motor_altitudes(const DroneModel& model, const DroneState& state) {
  const Vec3 row_z = state.rotation().row(2);
  Vec4 h;
  for (int i = 0; i < 4; ++i) h[i] = state.position.z() + row_z.dot(motor_position(model, i));
  return h;
}

Vec4 ground_effect(const DroneModel& model, const DroneState& state) {
  const EulerAngles e = euler_angles(state);
  if (std::abs(e.roll) > kGroundEffectMaxTilt || std::abs(e.pitch) > kGroundEffectMaxTilt) {
    return Vec4::Zero();
  }
  const Vec4 h = motor_altitudes(model, state);
  Vec4 g;
  for (int i = 0; i < 4; ++i) {
    g[i] = ground_effect_thrust(model, state.last_rpms[i], std::max(h[i], model.prop_radius));
  }
  return g;
}

Vec3 downwash_force(const DroneModel& model, const DroneState& below, const DroneState& above) {
  const Vec3 delta = above.position - below.position;
  if (!(delta.z() > 0.0)) return Vec3::Zero();
  const double dz = std::max(delta.z(), model.prop_radius);
  const double planar = std::hypot(delta.x(), delta.y());
  const double width = std::abs(model.kd2 * dz + model.kd3);
  double spread = 1.0;
  if (width > 0.0) {
    const double u = planar / width;
    spread = std::exp(-0.5 * u * u);
  } else if (planar > 0.0) {
    spread = 0.0;  // zero-width wake only reaches the vertical axis
  }
  const double ratio = model.prop_radius / (4.0 * dz);
  const double w = model.kd1 * ratio * ratio * spread;
  if (std::abs(w) < kDownwashCutoff) return Vec3::Zero();
  return {0.0, 0.0, -w};
}

void accumulate_effects(std::span<const DroneModel> models, std::span<const DroneState> states,
                        const AeroToggle& toggles, std::span<ExternalForces> out) {
  if (models.size() != states.size() || out.size() != states.size()) {
    throw std::invalid_argument("accumulate_effects: size mismatch");
  }
  const std::size_t n = states.size();
  for (std::size_t i = 0; i < n; ++i) {
    ExternalForces f;
    if (toggles.drag) f.world_force = drag_force(models[i], states[i]);
    if (toggles.ground_effect) f.per_motor_thrust_bonus = ground_effect(models[i], states[i]);
    if (toggles.downwash) {
      Vec3 wake = Vec3::Zero();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        wake += downwash_force(models[j], states[i], states[j]);
      }
      f.world_force += wake;
    }
    out[i] = f;
  }
}

std::vector<ExternalForces> accumulate_effects(std::span<const DroneModel> models,
                                               std::span<const DroneState> states,
                                               const AeroToggle& toggles) {
  std::vector<ExternalForces> out(states.size());
  accumulate_effects(models, states, toggles, out);
  return out;
}

}  // namespace dronesim::aero
