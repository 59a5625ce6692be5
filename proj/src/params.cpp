#include "dronesim/params.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <sstream>

#ifndef DRONESIM_DATA_DIR
#define DRONESIM_DATA_DIR "data"
#endif

namespace dronesim {

namespace {

Vec3 parse_vec3(std::string_view text, std::string_view key) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) {
    throw ConfigError("expected 3 comma-separated values for " + std::string(key) + ": '" +
                      std::string(text) + "'");
  }
  return {parse_double(parts[0], key), parse_double(parts[1], key), parse_double(parts[2], key)};
}

std::string vec3_to_string(const Vec3& v) {
  return format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z());
}

void require_positive(double v, std::string_view key) {
  if (!(v > 0.0)) {
    throw ConfigError("non-positive constant: " + std::string(key) + " = " + format_double(v));
  }
}

void require_finite(double v, std::string_view key) {
  if (!std::isfinite(v)) {
    throw ConfigError("non-finite constant: " + std::string(key) + " = " + format_double(v));
  }
}

}  // namespace

void validate(const DroneModel& m, double gravity) {
  require_positive(m.mass, "mass");
  require_positive(m.arm, "arm");
  for (int i = 0; i < 3; ++i) require_positive(m.inertia_diag[i], "inertia_diag");
  require_positive(m.kf, "kf");
  require_positive(m.kt, "kt");
  require_positive(m.prop_radius, "prop_radius");
  require_positive(m.max_rpm, "max_rpm");
  for (int i = 0; i < 3; ++i) {
    require_finite(m.drag_coeffs[i], "drag_coeffs");
    if (m.drag_coeffs[i] < 0.0) {
      throw ConfigError("negative constant: drag_coeffs = " + vec3_to_string(m.drag_coeffs));
    }
  }
  require_finite(m.kg_coeff, "kg_coeff");
  require_finite(m.kd1, "kd1");
  require_finite(m.kd2, "kd2");
  require_finite(m.kd3, "kd3");
  require_finite(m.neighbor_radius_default, "neighbor_radius_default");
  const double hover = hover_rpm(m, gravity);
  if (!(hover < m.max_rpm)) {
    throw ConfigError("hover rpm " + format_double(hover) + " not below max_rpm = " +
                      format_double(m.max_rpm));
  }
}

DroneModel parse_drone_model(const KvDocument& doc, double gravity) {
  DroneModel m;
  m.name = doc.require("name");
  m.frame = parse_frame(doc.require("frame"));
  m.mass = doc.require_double("mass");
  m.arm = doc.require_double("arm");
  m.inertia_diag = parse_vec3(doc.require("inertia_diag"), "inertia_diag");
  m.kf = doc.require_double("kf");
  m.kt = doc.require_double("kt");
  m.prop_radius = doc.require_double("prop_radius");
  m.max_rpm = doc.require_double("max_rpm");
  m.drag_coeffs = parse_vec3(doc.require("drag_coeffs"), "drag_coeffs");
  m.kg_coeff = doc.require_double("kg_coeff");
  m.kd1 = doc.require_double("kd1");
  m.kd2 = doc.require_double("kd2");
  m.kd3 = doc.require_double("kd3");
  m.neighbor_radius_default = doc.require_double("neighbor_radius_default");
  validate(m, gravity);
  return m;
}

DroneModel load_drone_model(const std::filesystem::path& path, double gravity) {
  const auto doc = KvDocument::load(path);
  try {
    return parse_drone_model(doc, gravity);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_drone_model(const DroneModel& m) {
  KvDocument doc;
  doc.append("name", m.name);
  doc.append("frame", std::string(to_string(m.frame)));
  doc.append("mass", format_double(m.mass));
  doc.append("arm", format_double(m.arm));
  doc.append("inertia_diag", vec3_to_string(m.inertia_diag));
  doc.append("kf", format_double(m.kf));
  doc.append("kt", format_double(m.kt));
  doc.append("prop_radius", format_double(m.prop_radius));
  doc.append("max_rpm", format_double(m.max_rpm));
  doc.append("drag_coeffs", vec3_to_string(m.drag_coeffs));
  doc.append("kg_coeff", format_double(m.kg_coeff));
  doc.append("kd1", format_double(m.kd1));
  doc.append("kd2", format_double(m.kd2));
  doc.append("kd3", format_double(m.kd3));
  doc.append("neighbor_radius_default", format_double(m.neighbor_radius_default));
  return doc.serialize();
}

double hover_rpm(const DroneModel& model, double gravity) {
  return std::sqrt(model.mass * gravity / (4.0 * model.kf));
}

Vec3 motor_position(const DroneModel& model, int motor) {
  // Counterclockwise from above; plus puts motor 0 on +x, cross at +45 deg.
  static constexpr int kPlus[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  static constexpr int kCross[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  const auto& sign = model.frame == Frame::plus ? kPlus[motor] : kCross[motor];
  const double r = model.frame == Frame::plus ? model.arm : model.arm / std::numbers::sqrt2;
  return {sign[0] * r, sign[1] * r, 0.0};
}

Mat4 mixing_matrix(const DroneModel& model) {
  // Thrust f along body +z at station p gives torque p x (0,0,f) = (p_y f, -p_x f, 0).
  Mat4 m;
  for (int i = 0; i < 4; ++i) {
    const Vec3 p = motor_position(model, i);
    m(0, i) = model.kf;
    m(1, i) = p.y() * model.kf;
    m(2, i) = -p.x() * model.kf;
    m(3, i) = (i % 2 == 0 ? -1.0 : 1.0) * model.kt;
  }
  return m;
}

void validate(const WorldConfig& c) {
  if (c.drones.empty()) throw ConfigError("invalid world: no drones");
  require_finite(c.gravity, "gravity");
  if (c.gravity < 0.0) throw ConfigError("negative constant: gravity = " + format_double(c.gravity));
  if (c.physics_hz <= 0) throw ConfigError("non-positive constant: physics_hz = " + std::to_string(c.physics_hz));
  if (c.control_hz <= 0) throw ConfigError("non-positive constant: control_hz = " + std::to_string(c.control_hz));
  if (c.physics_hz % c.control_hz != 0) {
    throw ConfigError("physics_hz = " + std::to_string(c.physics_hz) +
                      " is not a multiple of control_hz = " + std::to_string(c.control_hz));
  }
  require_finite(c.duration_s, "duration_s");
  if (c.duration_s < 0.0) throw ConfigError("negative constant: duration_s = " + format_double(c.duration_s));
  require_positive(c.one_d_scale, "one_d_scale");
  require_positive(c.workspace_bound, "workspace_bound");
  require_positive(c.ang_rate_bound, "ang_rate_bound");
  if (c.adjacency_radius) require_positive(*c.adjacency_radius, "adjacency_radius");
  for (std::size_t i = 0; i < c.drones.size(); ++i) {
    const auto& d = c.drones[i];
    validate(d.model, c.gravity);
    validate(d.gains);
    if (!d.position.allFinite() || !std::isfinite(d.yaw)) {
      throw ConfigError("non-finite initial pose for drone " + std::to_string(i));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (c.drones[j].position == d.position) {
        throw ConfigError("drones " + std::to_string(j) + " and " + std::to_string(i) +
                          " share initial position " + vec3_to_string(d.position));
      }
    }
  }
  if (!c.task.target.allFinite()) throw ConfigError("non-finite constant: target");
  if (c.task.kind == TaskKind::hover_single && c.drones.size() != 1) {
    throw ConfigError("task hover_single needs exactly 1 drone, got " + std::to_string(c.drones.size()));
  }
  if (c.task.kind == TaskKind::leader_follower && c.drones.size() != 2) {
    throw ConfigError("task leader_follower needs exactly 2 drones, got " +
                      std::to_string(c.drones.size()));
  }
}

std::filesystem::path DataPaths::data_root() {
  if (const char* env = std::getenv("DRONESIM_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return DRONESIM_DATA_DIR;
}

DataPaths DataPaths::defaults() {
  const auto root = data_root();
  return {root / "models", root / "gains"};
}

WorldConfig parse_world_config(const KvDocument& doc, const DataPaths& paths) {
  WorldConfig c;
  c.gravity = doc.get_double("gravity", c.gravity);
  if (auto v = doc.find("physics_hz")) c.physics_hz = static_cast<int>(parse_uint(*v, "physics_hz"));
  if (auto v = doc.find("control_hz")) c.control_hz = static_cast<int>(parse_uint(*v, "control_hz"));
  if (auto v = doc.find("integrator")) c.integrator = parse_integrator(*v);
  if (auto v = doc.find("effects")) c.effects = parse_effects(*v);
  c.duration_s = doc.get_double("duration_s", c.duration_s);
  if (auto v = doc.find("seed")) c.seed = parse_uint(*v, "seed");
  if (auto v = doc.find("task")) c.task.kind = parse_task(*v);
  if (auto v = doc.find("target")) c.task.target = parse_vec3(*v, "target");
  c.task.follower_offset = doc.get_double("follower_offset", c.task.follower_offset);
  if (auto v = doc.find("action_mode")) c.action_mode = parse_action_mode(*v);
  c.one_d_scale = doc.get_double("one_d_scale", c.one_d_scale);
  if (auto v = doc.find("adjacency_radius")) c.adjacency_radius = parse_double(*v, "adjacency_radius");
  c.workspace_bound = doc.get_double("workspace_bound", c.workspace_bound);
  c.ang_rate_bound = doc.get_double("ang_rate_bound", c.ang_rate_bound);

  std::optional<PidGains> shared_gains;
  if (auto v = doc.find("gains")) shared_gains = load_pid_gains(paths.gains_dir / *v);

  std::map<std::string, std::pair<DroneModel, PidGains>> cache;
  for (const auto& line : doc.all("drone")) {
    const auto parts = split(line, ',');
    if (parts.size() != 5) {
      throw ConfigError("drone line needs '<model>, <x>, <y>, <z>, <yaw>', got '" + line + "'");
    }
    const std::string& ref = parts[0];
    auto it = cache.find(ref);
    if (it == cache.end()) {
      std::filesystem::path model_path(ref);
      if (!model_path.has_extension()) model_path += ".model";
      if (model_path.is_relative()) model_path = paths.models_dir / model_path;
      auto model = load_drone_model(model_path, c.gravity);
      PidGains gains = shared_gains ? *shared_gains
                                    : load_pid_gains(paths.gains_dir / (model.name + ".gains"));
      it = cache.emplace(ref, std::make_pair(std::move(model), gains)).first;
    }
    DroneSpec spec;
    spec.model = it->second.first;
    spec.gains = it->second.second;
    spec.position = {parse_double(parts[1], "drone"), parse_double(parts[2], "drone"),
                     parse_double(parts[3], "drone")};
    spec.yaw = parse_double(parts[4], "drone");
    c.drones.push_back(std::move(spec));
  }
  validate(c);
  return c;
}

WorldConfig load_world_config(const std::filesystem::path& path) {
  auto paths = DataPaths::defaults();
  const auto doc = KvDocument::load(path);
  const auto base = path.parent_path();
  if (auto v = doc.find("models_dir")) paths.models_dir = base / *v;
  if (auto v = doc.find("gains_dir")) paths.gains_dir = base / *v;
  return parse_world_config(doc, paths);
}

}  // namespace dronesim
