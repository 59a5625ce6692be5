#include "dronesim/types.hpp"

#include <string>

#include "dronesim/kv_file.hpp"

namespace dronesim {

std::string_view to_string(Frame f) { return f == Frame::cross ? "cross" : "plus"; }

std::string_view to_string(Integrator i) { return i == Integrator::euler ? "euler" : "rk4"; }

std::string_view to_string(ActionMode m) {
  switch (m) {
    case ActionMode::rpm: return "rpm";
    case ActionMode::velocity: return "velocity";
    case ActionMode::thrust_torques: return "thrust_torques";
    case ActionMode::one_d_rpm: return "one_d_rpm";
  }
  return "?";
}

std::string_view to_string(TaskKind t) {
  switch (t) {
    case TaskKind::none: return "none";
    case TaskKind::hover_single: return "hover_single";
    case TaskKind::leader_follower: return "leader_follower";
  }
  return "?";
}

Frame parse_frame(std::string_view s) {
  if (s == "cross" || s == "x") return Frame::cross;
  if (s == "plus" || s == "+") return Frame::plus;
  throw ConfigError("invalid value for frame: '" + std::string(s) + "'");
}

Integrator parse_integrator(std::string_view s) {
  if (s == "euler") return Integrator::euler;
  if (s == "rk4") return Integrator::rk4;
  throw ConfigError("invalid value for integrator: '" + std::string(s) + "'");
}

ActionMode parse_action_mode(std::string_view s) {
  if (s == "rpm") return ActionMode::rpm;
  if (s == "velocity") return ActionMode::velocity;
  if (s == "thrust_torques") return ActionMode::thrust_torques;
  if (s == "one_d_rpm" || s == "one_d") return ActionMode::one_d_rpm;
  throw ConfigError("invalid value for action_mode: '" + std::string(s) + "'");
}

TaskKind parse_task(std::string_view s) {
  if (s == "none") return TaskKind::none;
  if (s == "hover_single") return TaskKind::hover_single;
  if (s == "leader_follower") return TaskKind::leader_follower;
  throw ConfigError("invalid value for task: '" + std::string(s) + "'");
}

AeroToggle parse_effects(std::string_view s) {
  AeroToggle t;
  if (trim(s) == "none" || trim(s).empty()) return t;
  for (const auto& item : split(s, ',')) {
    if (item == "drag") {
      t.drag = true;
    } else if (item == "ground_effect") {
      t.ground_effect = true;
    } else if (item == "downwash") {
      t.downwash = true;
    } else {
      throw ConfigError("invalid value for effects: '" + item + "'");
    }
  }
  return t;
}

std::string effects_to_string(const AeroToggle& t) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add(t.drag, "drag");
  add(t.ground_effect, "ground_effect");
  add(t.downwash, "downwash");
  return out.empty() ? "none" : out;
}

}  // namespace dronesim
