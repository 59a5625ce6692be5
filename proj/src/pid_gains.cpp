#include "dronesim/pid_gains.hpp"

#include <cmath>

namespace dronesim {

namespace {

Vec3 read_vec3(const KvDocument& doc, std::string_view key) {
  const auto parts = split(doc.require(key), ',');
  if (parts.size() != 3) {
    throw ConfigError("expected 3 comma-separated values for " + std::string(key));
  }
  return {parse_double(parts[0], key), parse_double(parts[1], key), parse_double(parts[2], key)};
}

std::string vec3_text(const Vec3& v) {
  return format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z());
}

void require_nonnegative(const Vec3& v, std::string_view key) {
  if (!v.allFinite() || (v.array() < 0.0).any()) {
    throw ConfigError("negative gain: " + std::string(key) + " = " + vec3_text(v));
  }
}

}  // namespace

void validate(const PidGains& g) {
  require_nonnegative(g.pos_p, "pos_p");
  require_nonnegative(g.pos_i, "pos_i");
  require_nonnegative(g.pos_d, "pos_d");
  require_nonnegative(g.att_p, "att_p");
  require_nonnegative(g.att_i, "att_i");
  require_nonnegative(g.att_d, "att_d");
  if (!(g.force_limit > 0.0) || !std::isfinite(g.force_limit)) {
    throw ConfigError("non-positive constant: force_limit = " + format_double(g.force_limit));
  }
  if (!(g.torque_limit > 0.0) || !std::isfinite(g.torque_limit)) {
    throw ConfigError("non-positive constant: torque_limit = " + format_double(g.torque_limit));
  }
}

PidGains parse_pid_gains(const KvDocument& doc) {
  PidGains g;
  g.pos_p = read_vec3(doc, "pos_p");
  g.pos_i = read_vec3(doc, "pos_i");
  g.pos_d = read_vec3(doc, "pos_d");
  g.att_p = read_vec3(doc, "att_p");
  g.att_i = read_vec3(doc, "att_i");
  g.att_d = read_vec3(doc, "att_d");
  g.force_limit = doc.require_double("force_limit");
  g.torque_limit = doc.require_double("torque_limit");
  validate(g);
  return g;
}

PidGains load_pid_gains(const std::filesystem::path& path) {
  const auto doc = KvDocument::load(path);
  try {
    return parse_pid_gains(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_pid_gains(const PidGains& g) {
  KvDocument doc;
  doc.append("pos_p", vec3_text(g.pos_p));
  doc.append("pos_i", vec3_text(g.pos_i));
  doc.append("pos_d", vec3_text(g.pos_d));
  doc.append("att_p", vec3_text(g.att_p));
  doc.append("att_i", vec3_text(g.att_i));
  doc.append("att_d", vec3_text(g.att_d));
  doc.append("force_limit", format_double(g.force_limit));
  doc.append("torque_limit", format_double(g.torque_limit));
  return doc.serialize();
}

}  // namespace dronesim
