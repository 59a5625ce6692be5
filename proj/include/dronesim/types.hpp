#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

namespace dronesim {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Motor speeds in RPM, indexed by motor (0..3 counterclockwise from above).
using Rpm4 = Eigen::Vector4d;

enum class Frame { cross, plus };
enum class Integrator { euler, rk4 };
enum class ActionMode { rpm, velocity, thrust_torques, one_d_rpm };
enum class TaskKind { none, hover_single, leader_follower };

/// Which optional aerodynamic contributions are active. Any combination is valid.
struct AeroToggle {
  bool drag = false;
  bool ground_effect = false;
  bool downwash = false;

  bool any() const { return drag || ground_effect || downwash; }
  friend bool operator==(const AeroToggle&, const AeroToggle&) = default;
};

std::string_view to_string(Frame f);
std::string_view to_string(Integrator i);
std::string_view to_string(ActionMode m);
std::string_view to_string(TaskKind t);

Frame parse_frame(std::string_view s);
Integrator parse_integrator(std::string_view s);
ActionMode parse_action_mode(std::string_view s);
TaskKind parse_task(std::string_view s);
/// Comma-separated subset of {drag, ground_effect, downwash}, or "none".
AeroToggle parse_effects(std::string_view s);
std::string effects_to_string(const AeroToggle& t);

}  // namespace dronesim
