#pragma once

#include <span>
#include <vector>

#include "dronesim/dynamics.hpp"
#include "dronesim/params.hpp"

namespace dronesim::aero {

/// Roll/pitch beyond which the (level-hover identified) ground effect is dropped.
inline constexpr double kGroundEffectMaxTilt = 30.0 * 3.14159265358979323846 / 180.0;
/// Downwash magnitudes below this are treated as zero.
inline constexpr double kDownwashCutoff = 1e-8;

/// Propeller drag, world frame, from the state's last commanded speeds.
Vec3 drag_force(const DroneModel& model, const DroneState& state);

/// Raw inverse-square ground-effect thrust of one rotor at `altitude` (no clamping).
double ground_effect_thrust(const DroneModel& model, double rpm, double altitude);

/// Motor altitudes above the z = 0 plane.
Vec4 motor_altitudes(const DroneModel& model, const DroneState& state);

/// Per-motor ground-effect bonus. Altitudes are clamped to one propeller
/// radius; the bonus vanishes past the tilt cutoff.
Vec4 ground_effect(const DroneModel& model, const DroneState& state);

/// Downwash on `below` from the wake of `above` (whose constants are in
/// `model`). Returns (0, 0, -W); zero unless `above` is strictly higher.
Vec3 downwash_force(const DroneModel& model, const DroneState& below, const DroneState& above);

/// Sums all enabled effects for every drone. `out` must match `states` in size.
void accumulate_effects(std::span<const DroneModel> models, std::span<const DroneState> states,
                        const AeroToggle& toggles, std::span<ExternalForces> out);

std::vector<ExternalForces> accumulate_effects(std::span<const DroneModel> models,
                                               std::span<const DroneState> states,
                                               const AeroToggle& toggles);

}  // namespace dronesim::aero
