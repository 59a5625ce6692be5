#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dronesim/control.hpp"
#include "dronesim/dynamics.hpp"
#include "dronesim/params.hpp"

namespace dronesim {

/// Length of the per-drone kinematic observation:
/// position(3) quaternion w,x,y,z(4) roll,pitch,yaw(3) velocity(3) body rates(3) rpm(4).
inline constexpr std::size_t kStateSize = 20;
using StateVector = std::array<double, kStateSize>;

struct DroneObservation {
  StateVector state{};
  /// Adjacency row (entry n is always false), present when the world enables it.
  std::optional<std::vector<bool>> neighbors;

  friend bool operator==(const DroneObservation&, const DroneObservation&) = default;
};

/// Indexed by drone id (ascending, 0..N-1).
using ObservationSet = std::vector<DroneObservation>;

struct RpmAction {
  Rpm4 rpms = Rpm4::Zero();
};
/// [vx, vy, vz] direction (need not be normalized) and magnitude vM.
struct VelocityAction {
  Vec4 command = Vec4::Zero();
};
struct ThrustTorquesAction {
  double thrust = 0.0;
  Vec3 torques = Vec3::Zero();
};
/// Normalized collective command in [-1, 1].
struct OneDAction {
  double value = 0.0;
};

using Action = std::variant<RpmAction, VelocityAction, ThrustTorquesAction, OneDAction>;
/// One action per drone, indexed by drone id.
using ActionSet = std::vector<Action>;

struct StepResult {
  ObservationSet obs;
  std::map<int, double> rewards;
  bool done = false;
  std::map<std::string, std::string> info;
};

/// Axis-aligned bounds of a per-drone space.
struct Box {
  std::vector<double> low;
  std::vector<double> high;

  bool contains(std::span<const double> v) const;
};

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// A_ij = true iff i != j and ||x_i - x_j|| <= radius. Throws for radius <= 0.
BoolMatrix adjacency(std::span<const DroneState> states, double radius);

double reward_hover(const DroneState& state, const Vec3& target);
std::pair<double, double> reward_leader_follower(const DroneState& leader,
                                                 const DroneState& follower,
                                                 const Vec3& leader_target,
                                                 double follower_offset = 0.0);

/// Raw 20-number state in observation order.
StateVector state_vector(const DroneState& state);

/// Multi-drone environment. Single owner: no concurrent calls on one instance.
class Env {
 public:
  /// Validates the config (ConfigError on failure) and resets.
  explicit Env(WorldConfig config);

  static std::pair<Env, ObservationSet> create(WorldConfig config);

  ObservationSet reset();

  /// Applies actions and advances one control step. Throws std::invalid_argument
  /// (leaving the environment untouched) when actions do not match the drone
  /// set or the configured action mode, or contain non-finite values.
  StepResult step(const ActionSet& actions);

  /// The physics part of step() without observation/info assembly; allocation
  /// free after the first call.
  void advance(const ActionSet& actions);

  ObservationSet observe() const;
  std::map<int, double> rewards() const;
  bool done() const { return !done_reason_.empty(); }
  const std::string& done_reason() const { return done_reason_; }

  const WorldConfig& config() const { return config_; }
  const std::vector<DroneState>& states() const { return states_; }
  const std::vector<Rpm4>& commanded_rpms() const { return commanded_; }
  /// Per drone: whether the last action had to be clipped to the action bounds.
  const std::vector<bool>& action_clipped() const { return clipped_; }
  std::size_t num_drones() const { return states_.size(); }
  std::uint64_t step_count() const { return step_count_; }
  double sim_time() const;
  std::uint64_t episode_steps() const { return episode_steps_; }
  std::mt19937_64& rng() { return rng_; }

  Box observation_space(std::size_t drone) const;
  Box action_space(std::size_t drone) const;

  /// Velocity used to normalize observations of drone `n`.
  double velocity_bound(std::size_t drone) const;

 private:
  void validate_actions(const ActionSet& actions) const;
  Rpm4 translate(std::size_t drone, const Action& action, bool& clipped);
  void update_done();
  std::map<std::string, std::string> make_info() const;

  WorldConfig config_;
  std::vector<DroneModel> models_;
  std::vector<DroneState> states_;
  std::vector<ControllerState> controllers_;
  std::vector<Rpm4> commanded_;
  std::vector<bool> clipped_;
  std::vector<ExternalForces> ext_;
  std::uint64_t step_count_ = 0;
  std::uint64_t episode_steps_ = 0;
  std::string done_reason_;
  std::mt19937_64 rng_;
};

}  // namespace dronesim
