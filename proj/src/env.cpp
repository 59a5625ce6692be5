#include "dronesim/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dronesim/aero.hpp"

namespace dronesim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kMaxTilt = 75.0 * kPi / 180.0;

std::size_t action_index(ActionMode mode) {
  switch (mode) {
    case ActionMode::rpm: return 0;
    case ActionMode::velocity: return 1;
    case ActionMode::thrust_torques: return 2;
    case ActionMode::one_d_rpm: return 3;
  }
  return 0;
}

bool finite(const Action& action) {
  return std::visit(
      [](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, RpmAction>) return a.rpms.allFinite();
        if constexpr (std::is_same_v<T, VelocityAction>) return a.command.allFinite();
        if constexpr (std::is_same_v<T, ThrustTorquesAction>) {
          return std::isfinite(a.thrust) && a.torques.allFinite();
        }
        if constexpr (std::is_same_v<T, OneDAction>) return std::isfinite(a.value);
      },
      action);
}

/// Clamps `v` into [lo, hi] and records whether it moved.
double clip(double v, double lo, double hi, bool& clipped) {
  const double c = std::clamp(v, lo, hi);
  if (c != v) clipped = true;
  return c;
}

/// Per-axis torque magnitude reachable with all speeds in [0, max_rpm].
Vec3 torque_bounds(const DroneModel& model) {
  const Mat4 mix = mixing_matrix(model);
  const double s_max = model.max_rpm * model.max_rpm;
  Vec3 out;
  for (int r = 0; r < 3; ++r) {
    double pos = 0.0;
    for (int i = 0; i < 4; ++i) pos += std::max(mix(r + 1, i), 0.0) * s_max;
    out[r] = pos;
  }
  return out;
}

std::string join17(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double17(values[i]);
  }
  return out;
}

}  // namespace

bool Box::contains(std::span<const double> v) const {
  if (v.size() != low.size()) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= low[i] && v[i] <= high[i])) return false;
  }
  return true;
}

BoolMatrix adjacency(std::span<const DroneState> states, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("adjacency: radius must be positive");
  const auto n = static_cast<Eigen::Index>(states.size());
  BoolMatrix a = BoolMatrix::Constant(n, n, false);
  const double r2 = radius * radius;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool near = (states[i].position - states[j].position).squaredNorm() <= r2;
      a(i, j) = near;
      a(j, i) = near;
    }
  }
  return a;
}

double reward_hover(const DroneState& state, const Vec3& target) {
  return -(target - state.position).squaredNorm();
}

std::pair<double, double> reward_leader_follower(const DroneState& leader,
                                                 const DroneState& follower,
                                                 const Vec3& leader_target,
                                                 double follower_offset) {
  const double dz = follower.position.z() - leader.position.z() - follower_offset;
  return {-(leader_target - leader.position).squaredNorm(), -0.5 * dz * dz};
}

StateVector state_vector(const DroneState& s) {
  const EulerAngles e = euler_angles(s);
  const auto& q = s.quaternion;
  return {s.position.x(), s.position.y(), s.position.z(),
          q.w(), q.x(), q.y(), q.z(),
          e.roll, e.pitch, e.yaw,
          s.velocity.x(), s.velocity.y(), s.velocity.z(),
          s.ang_velocity.x(), s.ang_velocity.y(), s.ang_velocity.z(),
          s.last_rpms[0], s.last_rpms[1], s.last_rpms[2], s.last_rpms[3]};
}

Env::Env(WorldConfig config) : config_(std::move(config)) {
  validate(config_);
  models_.reserve(config_.drones.size());
  for (const auto& d : config_.drones) models_.push_back(d.model);
  reset();
}

std::pair<Env, ObservationSet> Env::create(WorldConfig config) {
  Env env(std::move(config));
  auto obs = env.observe();
  return {std::move(env), std::move(obs)};
}

ObservationSet Env::reset() {
  const std::size_t n = config_.drones.size();
  states_.assign(n, DroneState{});
  for (std::size_t i = 0; i < n; ++i) {
    states_[i].position = config_.drones[i].position;
    states_[i].quaternion = quaternion_from_euler(0.0, 0.0, config_.drones[i].yaw);
  }
  controllers_.assign(n, ControllerState{});
  commanded_.assign(n, Rpm4::Zero());
  clipped_.assign(n, false);
  ext_.assign(n, ExternalForces{});
  step_count_ = 0;
  episode_steps_ = static_cast<std::uint64_t>(
      std::llround(config_.duration_s * static_cast<double>(config_.control_hz)));
  done_reason_.clear();
  rng_.seed(config_.seed);
  return observe();
}

double Env::sim_time() const {
  return static_cast<double>(step_count_) / static_cast<double>(config_.control_hz);
}

double Env::velocity_bound(std::size_t drone) const {
  const double cap = max_speed(models_[drone], config_.gravity);
  return std::isfinite(cap) ? cap : config_.workspace_bound;
}

void Env::validate_actions(const ActionSet& actions) const {
  if (actions.size() != states_.size()) {
    throw std::invalid_argument("step: expected actions for " + std::to_string(states_.size()) +
                                " drones, got " + std::to_string(actions.size()));
  }
  const std::size_t expected = action_index(config_.action_mode);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].index() != expected) {
      throw std::invalid_argument("step: action for drone " + std::to_string(i) +
                                  " does not match action_mode " +
                                  std::string(to_string(config_.action_mode)));
    }
    if (!finite(actions[i])) {
      throw std::invalid_argument("step: non-finite action for drone " + std::to_string(i));
    }
  }
}

Rpm4 Env::translate(std::size_t i, const Action& action, bool& clipped) {
  const DroneModel& model = models_[i];
  const double dt = 1.0 / static_cast<double>(config_.control_hz);
  const double g = config_.gravity;
  clipped = false;
  switch (action.index()) {
    case 0: {
      Rpm4 rpms = std::get<RpmAction>(action).rpms;
      for (int k = 0; k < 4; ++k) rpms[k] = clip(rpms[k], 0.0, model.max_rpm, clipped);
      return rpms;
    }
    case 1: {
      Vec4 cmd = std::get<VelocityAction>(action).command;
      for (int k = 0; k < 3; ++k) cmd[k] = clip(cmd[k], -1.0, 1.0, clipped);
      cmd[3] = clip(cmd[3], 0.0, velocity_bound(i), clipped);
      auto out = velocity_command_to_rpms(model, states_[i], cmd, config_.drones[i].gains,
                                          controllers_[i], dt, g);
      controllers_[i] = out.state;
      return out.rpms;
    }
    case 2: {
      const auto& a = std::get<ThrustTorquesAction>(action);
      const double max_thrust = 4.0 * model.kf * model.max_rpm * model.max_rpm;
      const Vec3 tau_max = torque_bounds(model);
      const double thrust = clip(a.thrust, 0.0, max_thrust, clipped);
      Vec3 torques;
      for (int k = 0; k < 3; ++k) torques[k] = clip(a.torques[k], -tau_max[k], tau_max[k], clipped);
      return thrust_torques_to_rpms(model, thrust, torques);
    }
    default: {
      const double v = clip(std::get<OneDAction>(action).value, -1.0, 1.0, clipped);
      const double rpm = hover_rpm(model, g) * (1.0 + config_.one_d_scale * v);
      return Rpm4::Constant(std::clamp(rpm, 0.0, model.max_rpm));
    }
  }
}

void Env::advance(const ActionSet& actions) {
  validate_actions(actions);
  const std::size_t n = states_.size();
  for (std::size_t i = 0; i < n; ++i) {
    bool clipped = false;
    commanded_[i] = translate(i, actions[i], clipped);
    clipped_[i] = clipped;
    // Motors reach the commanded speed within the control step.
    states_[i].last_rpms = commanded_[i];
  }

  const double dt = 1.0 / static_cast<double>(config_.physics_hz);
  const int substeps = config_.substeps();
  for (int s = 0; s < substeps; ++s) {
    if (config_.effects.any()) aero::accumulate_effects(models_, states_, config_.effects, ext_);
    for (std::size_t i = 0; i < n; ++i) {
      states_[i] = step_dynamics(models_[i], states_[i], commanded_[i], ext_[i], dt,
                                 config_.integrator, config_.gravity);
    }
  }
  ++step_count_;
  update_done();
}

void Env::update_done() {
  done_reason_.clear();
  for (const auto& s : states_) {
    if (s.position.z() < 0.0) {
      done_reason_ = "crash";
      return;
    }
    const EulerAngles e = euler_angles(s);
    if (std::abs(e.roll) > kMaxTilt || std::abs(e.pitch) > kMaxTilt) {
      done_reason_ = "attitude";
      return;
    }
  }
  if (step_count_ >= episode_steps_) done_reason_ = "time_limit";
}

StepResult Env::step(const ActionSet& actions) {
  advance(actions);
  StepResult r;
  r.obs = observe();
  r.rewards = rewards();
  r.done = done();
  r.info = make_info();
  return r;
}

ObservationSet Env::observe() const {
  const std::size_t n = states_.size();
  ObservationSet obs(n);
  std::optional<BoolMatrix> adj;
  if (config_.adjacency_radius) adj = adjacency(states_, *config_.adjacency_radius);
  for (std::size_t i = 0; i < n; ++i) {
    StateVector v = state_vector(states_[i]);
    if (config_.normalized_observations()) {
      const double pos_bound = config_.workspace_bound;
      const double vel_bound = velocity_bound(i);
      auto norm = [](double x, double b) { return std::clamp(x / b, -1.0, 1.0); };
      for (int k = 0; k < 3; ++k) v[k] = norm(v[k], pos_bound);
      for (int k = 7; k < 10; ++k) v[k] = norm(v[k], kPi);
      for (int k = 10; k < 13; ++k) v[k] = norm(v[k], vel_bound);
      for (int k = 13; k < 16; ++k) v[k] = norm(v[k], config_.ang_rate_bound);
      for (int k = 16; k < 20; ++k) v[k] = std::clamp(v[k] / models_[i].max_rpm, 0.0, 1.0);
    }
    obs[i].state = v;
    if (adj) {
      std::vector<bool> row(n);
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = (*adj)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      obs[i].neighbors = std::move(row);
    }
  }
  return obs;
}

std::map<int, double> Env::rewards() const {
  std::map<int, double> r;
  switch (config_.task.kind) {
    case TaskKind::none:
      break;
    case TaskKind::hover_single:
      r[0] = reward_hover(states_[0], config_.task.target);
      break;
    case TaskKind::leader_follower: {
      const auto [r0, r1] = reward_leader_follower(states_[0], states_[1], config_.task.target,
                                                   config_.task.follower_offset);
      r[0] = r0;
      r[1] = r1;
      break;
    }
  }
  return r;
}

std::map<std::string, std::string> Env::make_info() const {
  std::map<std::string, std::string> info;
  info["step"] = std::to_string(step_count_);
  info["sim_time"] = format_double17(sim_time());
  info["done_reason"] = done_reason_;
  std::string clipped_list;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const std::string prefix = "drone." + std::to_string(i) + ".";
    const StateVector v = state_vector(states_[i]);
    info[prefix + "state"] = join17(v);
    info[prefix + "rpm_cmd"] = join17(std::span<const double>(commanded_[i].data(), 4));
    info[prefix + "clipped"] = clipped_[i] ? "1" : "0";
    if (clipped_[i]) {
      if (!clipped_list.empty()) clipped_list += ',';
      clipped_list += std::to_string(i);
    }
  }
  info["clipped"] = clipped_list;
  if (config_.normalized_observations()) {
    info["obs.position_bound"] = format_double17(config_.workspace_bound);
    info["obs.velocity_bound"] = format_double17(velocity_bound(0));
    info["obs.angle_bound"] = format_double17(kPi);
    info["obs.ang_rate_bound"] = format_double17(config_.ang_rate_bound);
  }
  return info;
}

Box Env::observation_space(std::size_t drone) const {
  Box b;
  if (config_.normalized_observations()) {
    b.low.assign(kStateSize, -1.0);
    b.high.assign(kStateSize, 1.0);
    for (int k = 16; k < 20; ++k) b.low[k] = 0.0;
    return b;
  }
  const double max_rpm = models_.at(drone).max_rpm;
  b.low = {-kInf, -kInf, -kInf, -1, -1, -1, -1, -kPi, -kPi / 2, -kPi,
           -kInf, -kInf, -kInf, -kInf, -kInf, -kInf, 0, 0, 0, 0};
  b.high = {kInf, kInf, kInf, 1, 1, 1, 1, kPi, kPi / 2, kPi,
            kInf, kInf, kInf, kInf, kInf, kInf, max_rpm, max_rpm, max_rpm, max_rpm};
  return b;
}

Box Env::action_space(std::size_t drone) const {
  const DroneModel& model = models_.at(drone);
  Box b;
  switch (config_.action_mode) {
    case ActionMode::rpm:
      b.low.assign(4, 0.0);
      b.high.assign(4, model.max_rpm);
      break;
    case ActionMode::velocity:
      b.low = {-1.0, -1.0, -1.0, 0.0};
      b.high = {1.0, 1.0, 1.0, velocity_bound(drone)};
      break;
    case ActionMode::thrust_torques: {
      const Vec3 tau = torque_bounds(model);
      b.low = {0.0, -tau.x(), -tau.y(), -tau.z()};
      b.high = {4.0 * model.kf * model.max_rpm * model.max_rpm, tau.x(), tau.y(), tau.z()};
      break;
    }
    case ActionMode::one_d_rpm:
      b.low = {-1.0};
      b.high = {1.0};
      break;
  }
  return b;
}

}  // namespace dronesim
