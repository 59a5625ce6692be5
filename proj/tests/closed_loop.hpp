#pragma once

// Small single-drone closed loop: PID at the control rate, physics at 240 Hz.

#include <functional>
#include <vector>

#include "dronesim/control.hpp"
#include "dronesim/dynamics.hpp"

namespace dronesim::testing {

struct Sample {
  double t = 0.0;
  DroneState state;
};

using CommandFn = std::function<ControlOutput(const DroneState&, const ControllerState&, double dt)>;

inline std::vector<Sample> fly(const DroneModel& model, DroneState s, double seconds,
                               const CommandFn& command, int physics_hz = 240,
                               int control_hz = 48) {
  constexpr double g = 9.8;
  const int sub = physics_hz / control_hz;
  const double dt = 1.0 / physics_hz;
  ControllerState ctl;
  std::vector<Sample> out;
  const long steps = std::lround(seconds * control_hz);
  for (long k = 0; k < steps; ++k) {
    const ControlOutput c = command(s, ctl, 1.0 / control_hz);
    ctl = c.state;
    for (int j = 0; j < sub; ++j) s = step_dynamics(model, s, c.rpms, {}, dt, Integrator::euler, g);
    out.push_back({static_cast<double>(k + 1) / control_hz, s});
  }
  return out;
}

}  // namespace dronesim::testing
