#include "dronesim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "dronesim/step_log.hpp"
#include "dronesim/version.hpp"

namespace dronesim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys = {
      // world
      "gravity", "physics_hz", "control_hz", "integrator", "effects", "duration_s", "seed",
      "task", "target", "follower_offset", "action_mode", "one_d_scale", "adjacency_radius",
      "workspace_bound", "ang_rate_bound", "gains", "drone", "models_dir", "gains_dir",
      // harness
      "name", "policy", "compare", "hover_altitude", "circle_center", "circle_period",
      "crossing_period", "vel_cmd", "one_d_kp", "one_d_kd"};
  return keys;
}

PolicyKind parse_policy(std::string_view s) {
  if (s == "hover") return PolicyKind::hover;
  if (s == "circle") return PolicyKind::circle;
  if (s == "crossing") return PolicyKind::crossing;
  if (s == "velocity") return PolicyKind::velocity;
  if (s == "one_d") return PolicyKind::one_d;
  throw ConfigError("invalid value for policy: '" + std::string(s) + "'");
}

/// Reference point (and its rate) a policy steers drone `i` towards at time t.
struct Reference {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

/// Scripted controller feeding the environment one ActionSet per control step.
class ScriptedPolicy {
 public:
  ScriptedPolicy(const Scenario& sc, const Env& env)
      : sc_(sc), controllers_(env.num_drones()), actions_(env.num_drones()) {}

  bool has_reference() const { return sc_.policy.kind != PolicyKind::velocity; }

  Reference reference(const Env& env, std::size_t i, double t) const {
    const auto& p = sc_.policy;
    const auto& start = sc_.world.drones[i].position;
    Reference r;
    switch (p.kind) {
      case PolicyKind::hover:
        r.position = {start.x(), start.y(), p.hover_altitude};
        break;
      case PolicyKind::circle: {
        const Vec3 rel = start - p.circle_center;
        const double radius = std::hypot(rel.x(), rel.y());
        const double phase = std::atan2(rel.y(), rel.x());
        const double w = kTwoPi / p.circle_period;
        const double a = w * t + phase;
        r.position = {p.circle_center.x() + radius * std::cos(a),
                      p.circle_center.y() + radius * std::sin(a), start.z()};
        r.velocity = {-radius * w * std::sin(a), radius * w * std::cos(a), 0.0};
        break;
      }
      case PolicyKind::crossing: {
        const double w = kTwoPi / p.crossing_period;
        r.position = {start.x() * std::cos(w * t), start.y(), start.z()};
        r.velocity = {-start.x() * w * std::sin(w * t), 0.0, 0.0};
        break;
      }
      case PolicyKind::velocity:
        r.position = env.states()[i].position;
        break;
      case PolicyKind::one_d: {
        const auto& task = sc_.world.task;
        r.position = {start.x(), start.y(), task.target.z()};
        if (task.kind == TaskKind::leader_follower && i == 1) {
          r.position.z() = env.states()[0].position.z() + task.follower_offset;
        } else if (task.kind != TaskKind::none) {
          r.position = task.target;
        }
        break;
      }
    }
    return r;
  }

  const ActionSet& actions(const Env& env) {
    const double dt = 1.0 / sc_.world.control_hz;
    const double t_next = env.sim_time() + dt;
    const double g = sc_.world.gravity;
    for (std::size_t i = 0; i < env.num_drones(); ++i) {
      const DroneState& s = env.states()[i];
      const DroneSpec& spec = sc_.world.drones[i];
      switch (sc_.policy.kind) {
        case PolicyKind::velocity:
          actions_[i] = VelocityAction{velocity_command(i, env.sim_time())};
          break;
        case PolicyKind::one_d: {
          const double err = reference(env, i, t_next).position.z() - s.position.z();
          const double a = sc_.policy.one_d_kp * err - sc_.policy.one_d_kd * s.velocity.z();
          actions_[i] = OneDAction{std::clamp(a, -1.0, 1.0)};
          break;
        }
        default: {
          const Reference ref = reference(env, i, t_next);
          const auto out = pid_step(spec.model, s, ref.position, ref.velocity, spec.yaw,
                                    spec.gains, controllers_[i], dt, g);
          controllers_[i] = out.state;
          if (sc_.world.action_mode == ActionMode::thrust_torques) {
            actions_[i] = ThrustTorquesAction{out.thrust, out.torques};
          } else {
            actions_[i] = RpmAction{out.rpms};
          }
        }
      }
    }
    return actions_;
  }

 private:
  Vec4 velocity_command(std::size_t drone, double t) const {
    Vec4 cmd = Vec4::Zero();
    double latest = -1.0;
    for (const auto& c : sc_.policy.velocity_schedule) {
      if (c.drone == static_cast<int>(drone) && c.start_s <= t + 1e-12 && c.start_s >= latest) {
        cmd = c.command;
        latest = c.start_s;
      }
    }
    return cmd;
  }

  const Scenario& sc_;
  std::vector<ControllerState> controllers_;
  ActionSet actions_;
};

void check_policy_mode(const Scenario& sc) {
  const auto mode = sc.world.action_mode;
  const auto kind = sc.policy.kind;
  const bool ok = kind == PolicyKind::velocity   ? mode == ActionMode::velocity
                  : kind == PolicyKind::one_d    ? mode == ActionMode::one_d_rpm
                                                 : (mode == ActionMode::rpm ||
                                                    mode == ActionMode::thrust_torques);
  if (!ok) {
    throw ConfigError("action_mode " + std::string(to_string(mode)) +
                      " cannot be driven by the selected policy");
  }
}

SubRunResult run_once(const Scenario& sc, WorldConfig world, const std::string& label,
                      const std::filesystem::path& log_path) {
  SubRunResult result;
  result.label = label;
  result.log_path = log_path;

  std::ofstream out(log_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write log: " + log_path.string());

  Scenario local = sc;
  local.world = std::move(world);
  Env env(local.world);
  ScriptedPolicy policy(local, env);
  StepLogWriter log(out);

  const std::size_t n = env.num_drones();
  result.drones.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = env.states()[i];
    result.drones[i] = {s.position.z(), s.position.z(), s.velocity.z(), s.position};
  }
  double planar_sq = 0.0;
  double full_sq = 0.0;
  std::size_t samples = 0;

  while (!env.done()) {
    const StepResult step = env.step(policy.actions(env));
    log.write(env, step.rewards);
    for (std::size_t i = 0; i < n; ++i) {
      const DroneState& s = env.states()[i];
      auto& m = result.drones[i];
      m.max_z = std::max(m.max_z, s.position.z());
      m.min_z = std::min(m.min_z, s.position.z());
      m.max_vz = std::max(m.max_vz, s.velocity.z());
      m.final_position = s.position;
      if (policy.has_reference()) {
        const Vec3 err = policy.reference(env, i, env.sim_time()).position - s.position;
        planar_sq += err.head<2>().squaredNorm();
        full_sq += err.squaredNorm();
        ++samples;
      }
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing log: " + log_path.string());

  result.rows = log.rows();
  result.steps = env.step_count();
  result.done_reason = env.done_reason();
  if (samples > 0) {
    result.rms_tracking_error = std::sqrt(planar_sq / static_cast<double>(samples));
    result.rms_position_error = std::sqrt(full_sq / static_cast<double>(samples));
  }
  return result;
}

nlohmann::json to_json(const SubRunResult& r) {
  nlohmann::json drones = nlohmann::json::array();
  for (const auto& d : r.drones) {
    drones.push_back({{"max_z", d.max_z},
                      {"min_z", d.min_z},
                      {"max_vz", d.max_vz},
                      {"final_position", {d.final_position.x(), d.final_position.y(),
                                          d.final_position.z()}}});
  }
  return {{"label", r.label},
          {"log", r.log_path.filename().string()},
          {"rows", r.rows},
          {"steps", r.steps},
          {"done_reason", r.done_reason},
          {"rms_tracking_error", r.rms_tracking_error},
          {"rms_position_error", r.rms_position_error},
          {"drones", drones}};
}

}  // namespace

const std::vector<std::string>& builtin_scenarios() {
  static const std::vector<std::string> names = {"circle4",  "velstep4",   "takeoff-ge",
                                                 "downwash2", "hover-task", "leader-follower"};
  return names;
}

Scenario parse_scenario(const KvDocument& doc, const DataPaths& paths,
                        const ScenarioOverrides& overrides) {
  for (const auto& e : doc.entries()) {
    if (!known_keys().contains(e.key)) throw ConfigError("unknown key: " + e.key);
  }
  KvDocument echo = doc;
  if (overrides.seed) echo.set("seed", std::to_string(*overrides.seed));
  if (overrides.integrator) echo.set("integrator", std::string(to_string(*overrides.integrator)));

  Scenario sc;
  sc.name = doc.find("name").value_or("scenario");
  sc.world = parse_world_config(echo, paths);

  auto& p = sc.policy;
  p.kind = parse_policy(doc.find("policy").value_or("hover"));
  p.hover_altitude = doc.get_double("hover_altitude", p.hover_altitude);
  if (auto v = doc.find("circle_center")) {
    const auto parts = split(*v, ',');
    if (parts.size() != 2) throw ConfigError("circle_center needs 'x, y', got '" + *v + "'");
    p.circle_center = {parse_double(parts[0], "circle_center"),
                       parse_double(parts[1], "circle_center"), 0.0};
  }
  p.circle_period = doc.get_double("circle_period", p.circle_period);
  p.crossing_period = doc.get_double("crossing_period", p.crossing_period);
  if (!(p.circle_period > 0.0)) throw ConfigError("non-positive constant: circle_period");
  if (!(p.crossing_period > 0.0)) throw ConfigError("non-positive constant: crossing_period");
  p.one_d_kp = doc.get_double("one_d_kp", p.one_d_kp);
  p.one_d_kd = doc.get_double("one_d_kd", p.one_d_kd);
  for (const auto& line : doc.all("vel_cmd")) {
    const auto parts = split(line, ',');
    if (parts.size() != 6) {
      throw ConfigError("vel_cmd needs '<drone>, <t>, <vx>, <vy>, <vz>, <vM>', got '" + line + "'");
    }
    VelocityCommand c;
    c.drone = static_cast<int>(parse_uint(parts[0], "vel_cmd"));
    if (c.drone >= static_cast<int>(sc.world.drones.size())) {
      throw ConfigError("vel_cmd names unknown drone " + parts[0]);
    }
    c.start_s = parse_double(parts[1], "vel_cmd");
    for (int k = 0; k < 4; ++k) c.command[k] = parse_double(parts[2 + k], "vel_cmd");
    if (c.command[3] < 0.0) throw ConfigError("vel_cmd has negative magnitude: '" + line + "'");
    p.velocity_schedule.push_back(c);
  }
  if (auto v = doc.find("compare")) {
    sc.compare = parse_effects(*v);
    if (!sc.compare->any()) sc.compare.reset();
  }
  check_policy_mode(sc);
  sc.echo = std::move(echo);
  return sc;
}

Scenario load_scenario(const std::string& ref, const ScenarioOverrides& overrides) {
  std::filesystem::path path(ref);
  if (!std::filesystem::exists(path) &&
      std::find(builtin_scenarios().begin(), builtin_scenarios().end(), ref) !=
          builtin_scenarios().end()) {
    path = DataPaths::data_root() / "scenarios" / (ref + ".cfg");
  }
  auto paths = DataPaths::defaults();
  const auto doc = KvDocument::load(path);
  const auto base = path.parent_path();
  if (auto v = doc.find("models_dir")) paths.models_dir = base / *v;
  if (auto v = doc.find("gains_dir")) paths.gains_dir = base / *v;
  try {
    Scenario sc = parse_scenario(doc, paths, overrides);
    if (!doc.contains("name")) sc.name = path.stem().string();
    return sc;
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

const SubRunResult& ScenarioResult::run(std::string_view label) const {
  for (const auto& r : runs) {
    if (r.label == label) return r;
  }
  throw std::out_of_range("no sub-run labelled " + std::string(label));
}

ScenarioResult run_scenario(const Scenario& sc, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw std::runtime_error("cannot create output directory: " + out_dir.string());
  }

  ScenarioResult result;
  result.name = sc.name;
  if (sc.compare) {
    WorldConfig on = sc.world;
    on.effects.drag |= sc.compare->drag;
    on.effects.ground_effect |= sc.compare->ground_effect;
    on.effects.downwash |= sc.compare->downwash;
    WorldConfig off = sc.world;
    off.effects.drag &= !sc.compare->drag;
    off.effects.ground_effect &= !sc.compare->ground_effect;
    off.effects.downwash &= !sc.compare->downwash;
    result.runs.push_back(run_once(sc, on, "on", out_dir / (sc.name + "_on.csv")));
    result.runs.push_back(run_once(sc, off, "off", out_dir / (sc.name + "_off.csv")));
  } else {
    result.runs.push_back(run_once(sc, sc.world, "main", out_dir / (sc.name + ".csv")));
  }

  nlohmann::json manifest;
  manifest["version"] = std::string(version());
  manifest["scenario"] = sc.name;
  nlohmann::json config = nlohmann::json::array();
  for (const auto& e : sc.echo.entries()) config.push_back(e.key + " = " + e.value);
  manifest["config"] = config;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : result.runs) runs.push_back(to_json(r));
  manifest["runs"] = runs;

  result.manifest_path = out_dir / "manifest.json";
  std::ofstream mf(result.manifest_path);
  if (!mf) throw std::runtime_error("cannot write manifest: " + result.manifest_path.string());
  mf << manifest.dump(2) << '\n';
  return result;
}

}  // namespace dronesim
