#include <doctest.h>

#include <random>

#include "closed_loop.hpp"
#include "dronesim/control.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace dronesim;
using namespace dronesim::testing;

namespace {

constexpr double kG = 9.8;
constexpr double kDt = 1.0 / 48.0;

DroneState hovering_at(const Vec3& p) {
  DroneState s;
  s.position = p;
  return s;
}

}  // namespace

TEST_CASE("pid at the target returns hover speed") {
  for (const DroneModel& m : {cf2x(), cf2p()}) {
    const auto out = pid_step(m, hovering_at({0, 0, 1}), {0, 0, 1}, Vec3::Zero(), 0.0, cf2_gains(),
                              {}, kDt, kG);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(out.rpms[i] - hover_rpm(m, kG)) < 1e-6);
  }
}

TEST_CASE("target above raises all motors") {
  const DroneModel m = cf2x();
  const auto out = pid_step(m, hovering_at({0, 0, 1}), {0, 0, 2}, Vec3::Zero(), 0.0, cf2_gains(),
                            {}, kDt, kG);
  CHECK(out.thrust > m.mass * kG);
  for (int i = 0; i < 4; ++i) CHECK(out.rpms[i] > hover_rpm(m, kG));
}

TEST_CASE("z step response with the shipped gains") {
  const DroneModel m = cf2x();
  const PidGains gains = cf2_gains();
  const double z0 = 1.0, step = 0.1;
  const auto trace = fly(m, hovering_at({0, 0, z0}), 5.0, [&](const DroneState& s, const ControllerState& c, double dt) {
    return pid_step(m, s, {0, 0, z0 + step}, Vec3::Zero(), 0.0, gains, c, dt, kG);
  });
  double peak = 0.0, settled_at = 0.0;
  for (const auto& smp : trace) {
    const double e = smp.state.position.z() - (z0 + step);
    peak = std::max(peak, e);
    if (std::abs(e) > 0.02 * step) settled_at = smp.t;
  }
  MESSAGE("overshoot " << peak / step << ", 2% settling " << settled_at << " s");
  CHECK(peak / step < 0.2);
  CHECK(settled_at < 2.0);
}

TEST_CASE("near-zero thrust holds the previous attitude target") {
  const DroneModel m = cf2x();
  ControllerState ctl;
  ctl.att_target = quaternion_from_euler(0.1, 0, 0);
  ctl.has_att_target = true;
  PidGains g = cf2_gains();
  g.pos_i = Vec3::Zero();
  DroneState s = hovering_at({0, 0, 1});
  s.velocity = {0, 0, 0};
  // Commanded acceleration exactly cancels gravity.
  const Vec3 target = {0, 0, 1.0 - kG / g.pos_p.z()};
  const auto out = pid_step(m, s, target, Vec3::Zero(), 0.0, g, ctl, kDt, kG);
  CHECK(out.thrust == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(out.state.att_target.angularDistance(ctl.att_target) < 1e-12);
  CHECK(out.rpms.allFinite());
}

TEST_CASE("velocity command conventions") {
  const DroneModel m = cf2x();
  CHECK(velocity_target(m, Vec4(0, 0, 0, 1), kG) == Vec3::Zero());
  const Vec3 v = velocity_target(m, Vec4(2, 0, 0, 0.5), kG);
  CHECK(v.x() == doctest::Approx(0.5));
  CHECK(v.y() == 0.0);
  CHECK(velocity_target(m, Vec4(0, 0, 1, 1e3), kG).z() == doctest::Approx(max_speed(m, kG)));
  // Drag-derived cap, evaluated by hand for the default model.
  CHECK(max_speed(m, kG) == doctest::Approx(8.46855).epsilon(1e-5));
  CHECK_THROWS_AS(velocity_target(m, Vec4(1, 0, 0, -1), kG), std::invalid_argument);

  const auto hover = velocity_command_to_rpms(m, hovering_at({0, 0, 1}), Vec4(0, 0, 0, 1),
                                              cf2_gains(), {}, kDt, kG);
  for (int i = 0; i < 4; ++i) CHECK(hover.rpms[i] == doctest::Approx(hover_rpm(m, kG)).epsilon(1e-9));
}

TEST_CASE("velocity tracking settles within 5 percent") {
  const DroneModel m = cf2x();
  const PidGains gains = cf2_gains();
  const auto trace = fly(m, hovering_at({0, 0, 1}), 6.0, [&](const DroneState& s, const ControllerState& c, double dt) {
    return velocity_command_to_rpms(m, s, Vec4(1, 0, 0, 0.5), gains, c, dt, kG);
  });
  for (const auto& smp : trace) {
    if (smp.t < 3.0) continue;
    CHECK(std::abs(smp.state.velocity.x() - 0.5) < 0.05 * 0.5);
  }
}

TEST_CASE("thrust and torques allocation") {
  const DroneModel m = cf2x();
  const Rpm4 h = thrust_torques_to_rpms(m, m.mass * kG, Vec3::Zero());
  for (int i = 0; i < 4; ++i) CHECK(h[i] == doctest::Approx(hover_rpm(m, kG)).epsilon(1e-12));
  CHECK(thrust_torques_to_rpms(m, 0.0, Vec3::Zero()) == Rpm4::Zero());

  // Round trip through the motor wrench for feasible demands.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int k = 0; k < 200; ++k) {
    const Rpm4 p = m.max_rpm * Rpm4(u(rng), u(rng), u(rng), u(rng));
    const Vec4 w = mixing_matrix(m) * p.cwiseProduct(p);
    const Rpm4 back = thrust_torques_to_rpms(m, w[0], w.tail<3>());
    const Vec4 w2 = mixing_matrix(m) * back.cwiseProduct(back);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(w2[i] - w[i]) <= 1e-6 * std::abs(w[i]) + 1e-18);
  }
}

TEST_CASE("infeasible demand is allocated in the least-squares sense") {
  const DroneModel m = cf2x();
  const double scale = m.max_rpm * m.max_rpm;
  const Mat4 a = mixing_matrix(m) * scale;
  const double thrust = 0.01 * m.mass * kG;
  const Vec3 torques(0, 0, -1e-4);
  const Vec4 b(thrust, torques.x(), torques.y(), torques.z());

  const Rpm4 p = thrust_torques_to_rpms(m, thrust, torques);
  const Vec4 s = p.cwiseProduct(p) / scale;
  const double residual = (a * s - b).norm();

  const Vec4 clipped = a.partialPivLu().solve(b).cwiseMax(0.0);
  CHECK(residual <= (a * clipped - b).norm() + 1e-12 * b.norm());

  const auto grid = grid_nnls(a, b, 1.0, 41);
  CHECK(residual * residual <= grid.objective + 1e-9);
  CHECK(kkt_violation(a, b, s) < 1e-12);
}

TEST_CASE("outputs stay in range and vary continuously") {
  const DroneModel m = cf2x();
  const PidGains gains = cf2_gains();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(-3, 3), vel(-10, 10), rate(-30, 30);
  for (int k = 0; k < 500; ++k) {
    DroneState s;
    s.position = {pos(rng), pos(rng), pos(rng)};
    s.velocity = {vel(rng), vel(rng), vel(rng)};
    s.ang_velocity = {rate(rng), rate(rng), rate(rng)};
    s.quaternion = random_attitude(rng);
    const auto out = pid_step(m, s, {pos(rng), pos(rng), pos(rng)}, Vec3::Zero(), pos(rng), gains,
                              {}, kDt, kG);
    for (int i = 0; i < 4; ++i) {
      CHECK(out.rpms[i] >= 0.0);
      CHECK(out.rpms[i] <= m.max_rpm);
    }
  }

  const DroneState base = hovering_at({0.01, -0.02, 0.98});
  const auto ref = pid_step(m, base, {0, 0, 1}, Vec3::Zero(), 0.0, gains, {}, kDt, kG);
  for (int field = 0; field < 3; ++field) {
    for (int axis = 0; axis < 3; ++axis) {
      DroneState nudged = base;
      Vec3& v = field == 0 ? nudged.position : field == 1 ? nudged.velocity : nudged.ang_velocity;
      v[axis] += 1e-6;
      const auto out = pid_step(m, nudged, {0, 0, 1}, Vec3::Zero(), 0.0, gains, {}, kDt, kG);
      CHECK((out.rpms - ref.rpms).cwiseAbs().maxCoeff() < 1e-2);
    }
  }
  const auto again = pid_step(m, base, {0, 0, 1}, Vec3::Zero(), 0.0, gains, {}, kDt, kG);
  CHECK(again.rpms == ref.rpms);
}
