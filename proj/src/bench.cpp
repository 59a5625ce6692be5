#include "dronesim/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dronesim/control.hpp"
#include "dronesim/env.hpp"

namespace dronesim {

namespace {

DroneModel bench_model() {
  DataPaths paths = DataPaths::defaults();
  return load_drone_model(paths.models_dir / "cf2x.model");
}

PidGains bench_gains() { return load_pid_gains(DataPaths::defaults().gains_dir / "cf2x.gains"); }

WorldConfig bench_world(const BenchOptions& o, const DroneModel& model, const PidGains& gains) {
  WorldConfig w;
  w.physics_hz = o.physics_hz;
  w.control_hz = o.control_hz;
  w.integrator = o.integrator;
  w.effects = o.effects;
  w.duration_s = o.duration_s;
  w.action_mode = ActionMode::rpm;
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(o.drones))));
  for (int i = 0; i < o.drones; ++i) {
    DroneSpec d;
    d.model = model;
    d.gains = gains;
    d.position = {0.5 * (i % side), 0.5 * (i / side), 0.1 + 0.01 * (i % 3)};
    w.drones.push_back(d);
  }
  return w;
}

void fnv1a(std::uint64_t& h, const double* data, std::size_t count) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

struct EnvOutcome {
  std::uint64_t steps = 0;
  std::uint64_t hash = 0;
};

/// PID hover loop; no logging or observation assembly.
EnvOutcome run_env(const WorldConfig& world) {
  Env env(world);
  const std::size_t n = env.num_drones();
  std::vector<ControllerState> ctl(n);
  ActionSet actions(n, RpmAction{});
  const double dt = 1.0 / world.control_hz;
  while (!env.done()) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& spec = world.drones[i];
      const DroneState& s = env.states()[i];
      const Vec3 target(spec.position.x(), spec.position.y(), 1.0);
      const auto out = pid_step(spec.model, s, target, Vec3::Zero(), 0.0, spec.gains, ctl[i], dt,
                                world.gravity);
      ctl[i] = out.state;
      std::get<RpmAction>(actions[i]).rpms = out.rpms;
    }
    env.advance(actions);
  }
  EnvOutcome r;
  r.steps = env.step_count();
  r.hash = 0xcbf29ce484222325ULL;
  for (const auto& s : env.states()) {
    fnv1a(r.hash, s.position.data(), 3);
    fnv1a(r.hash, s.quaternion.coeffs().data(), 4);
    fnv1a(r.hash, s.velocity.data(), 3);
    fnv1a(r.hash, s.ang_velocity.data(), 3);
    fnv1a(r.hash, s.last_rpms.data(), 4);
  }
  return r;
}

}  // namespace

BenchReport bench(const BenchOptions& o) {
  if (o.drones < 1 || o.envs < 1 || o.threads < 1) {
    throw std::invalid_argument("bench: drones, envs and threads must be >= 1");
  }
  if (!(o.duration_s > 0.0)) throw std::invalid_argument("bench: duration must be positive");

  const WorldConfig world = bench_world(o, bench_model(), bench_gains());
  validate(world);

  std::vector<EnvOutcome> outcomes(static_cast<std::size_t>(o.envs));
  const int workers = std::min(o.threads, o.envs);

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int e = w; e < o.envs; e += workers) outcomes[e] = run_env(world);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  const auto stop = std::chrono::steady_clock::now();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  BenchReport r;
  r.drones = o.drones;
  r.envs = o.envs;
  r.physics_hz = o.physics_hz;
  r.control_hz = o.control_hz;
  r.wall_seconds = std::chrono::duration<double>(stop - start).count();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& out : outcomes) {
    r.steps += out.steps;
    const auto* bytes = reinterpret_cast<const unsigned char*>(&out.hash);
    for (std::size_t i = 0; i < sizeof(out.hash); ++i) {
      hash ^= bytes[i];
      hash *= 0x100000001b3ULL;
    }
  }
  r.sim_seconds = static_cast<double>(outcomes.front().steps) / o.control_hz;
  const double wall = std::max(r.wall_seconds, 1e-9);
  r.speedup = r.sim_seconds * r.envs / wall;
  r.steps_per_second = static_cast<double>(r.steps) / wall;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  r.checksum = buf;
  return r;
}

std::string to_json(const BenchReport& r) {
  nlohmann::json j = {{"drones", r.drones},
                      {"envs", r.envs},
                      {"physics_hz", r.physics_hz},
                      {"control_hz", r.control_hz},
                      {"wall_seconds", r.wall_seconds},
                      {"sim_seconds", r.sim_seconds},
                      {"speedup", r.speedup},
                      {"steps_per_second", r.steps_per_second},
                      {"steps", r.steps},
                      {"checksum", r.checksum}};
  return j.dump();
}

}  // namespace dronesim
