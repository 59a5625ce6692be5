#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dronesim/aero.hpp"
#include "test_support.hpp"

using namespace dronesim;
using dronesim::testing::cf2x;

namespace {

DroneState at(const Vec3& p, double rpm = 0.0) {
  DroneState s;
  s.position = p;
  s.last_rpms = Rpm4::Constant(rpm);
  return s;
}

/// Direct transcription of the downwash law, without clamps or cutoffs.
double downwash_oracle(const DroneModel& m, const Vec3& delta) {
  const double ratio = m.prop_radius / (4.0 * delta.z());
  const double planar = std::sqrt(delta.x() * delta.x() + delta.y() * delta.y());
  const double width = m.kd2 * delta.z() + m.kd3;
  return m.kd1 * ratio * ratio * std::exp(-0.5 * std::pow(planar / width, 2));
}

}  // namespace

TEST_CASE("drag") {
  DroneModel m = cf2x();
  CHECK(aero::drag_force(m, at({0, 0, 1}, 14000)).norm() == 0.0);

  DroneState moving = at({0, 0, 1}, 0.0);
  moving.velocity = {1, -2, 0.5};
  CHECK(aero::drag_force(m, moving).norm() == 0.0);

  m.drag_coeffs = {9.17e-7, 9.17e-7, 10.311e-7};
  DroneState s = at({0, 0, 1}, 14468.6);
  s.velocity = {1, 0, 0};
  // Hand evaluation: -9.17e-7 * (4 * 2 pi * 14468.6 / 60).
  CHECK(aero::drag_force(m, s).x() == doctest::Approx(-0.00555756377705436693).epsilon(1e-12));
  CHECK(aero::drag_force(m, s).y() == 0.0);

  // Always opposes the velocity, component-wise.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> v(-5, 5), rpm(0, m.max_rpm);
  for (int k = 0; k < 500; ++k) {
    DroneState r = at({0, 0, 1});
    r.velocity = {v(rng), v(rng), v(rng)};
    r.last_rpms = {rpm(rng), rpm(rng), rpm(rng), rpm(rng)};
    const Vec3 d = aero::drag_force(m, r);
    for (int i = 0; i < 3; ++i) CHECK(d[i] * r.velocity[i] <= 0.0);
  }
}

TEST_CASE("ground effect") {
  const DroneModel m = cf2x();
  const double hover = hover_rpm(m, 9.8);

  CHECK(aero::ground_effect_thrust(m, hover, m.prop_radius / 4.0) ==
        doctest::Approx(m.kg_coeff * m.kf * hover * hover).epsilon(1e-14));

  const Vec4 far = aero::ground_effect(m, at({0, 0, 10}, hover));
  const double hover_thrust = m.mass * 9.8;
  for (int i = 0; i < 4; ++i) CHECK(far[i] < 1e-6 * hover_thrust);

  // Strictly decreasing over [h_min, 1 m].
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const double h = m.prop_radius + (1.0 - m.prop_radius) * k / 99.0;
    const double g = aero::ground_effect(m, at({0, 0, h}, hover))[0];
    CHECK(g < previous);
    previous = g;
  }

  // Clamped at one propeller radius.
  const Vec4 low = aero::ground_effect(m, at({0, 0, 0.0}, hover));
  CHECK(low[0] == doctest::Approx(aero::ground_effect_thrust(m, hover, m.prop_radius)));
  CHECK(std::isfinite(low[0]));

  // Tilted past the cutoff: no contribution.
  DroneState tilted = at({0, 0, 0.05}, hover);
  tilted.quaternion = quaternion_from_euler(0.6, 0, 0);
  CHECK(aero::ground_effect(m, tilted) == Vec4::Zero());

  // Mild roll lowers the motors on one side, raising their bonus.
  DroneState rolled = at({0, 0, 0.05}, hover);
  rolled.quaternion = quaternion_from_euler(0.2, 0, 0);
  const Vec4 h = aero::motor_altitudes(m, rolled);
  const Vec4 g = aero::ground_effect(m, rolled);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (h[i] < h[j]) CHECK(g[i] > g[j]);
    }
  }
}

TEST_CASE("downwash") {
  const DroneModel m = cf2x();
  const DroneState below = at({0, 0, 0.5});

  const double d = 0.5;
  const double ratio = m.prop_radius / (4.0 * d);
  CHECK(aero::downwash_force(m, below, at({0, 0, 0.5 + d})).z() ==
        doctest::Approx(-m.kd1 * ratio * ratio).epsilon(1e-14));
  CHECK(aero::downwash_force(m, below, at({0, 0, 0.5 + d})).head<2>() == Eigen::Vector2d::Zero());

  CHECK(aero::downwash_force(m, below, at({0, 0, 0.2})) == Vec3::Zero());
  CHECK(aero::downwash_force(m, below, at({0.1, 0, 0.5})) == Vec3::Zero());

  // Depends on the planar offset norm only.
  const double r = 0.02;
  const double w0 = aero::downwash_force(m, below, at({r, 0, 1.0})).z();
  for (int k = 0; k < 16; ++k) {
    const double a = 2 * std::numbers::pi * k / 16;
    const double wk = aero::downwash_force(m, below, at({r * std::cos(a), r * std::sin(a), 1.0})).z();
    CHECK(wk == doctest::Approx(w0).epsilon(1e-12));
  }

  // Matches the literal law away from the clamps.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dz(0.05, 0.6), dxy(-0.05, 0.05);
  for (int k = 0; k < 200; ++k) {
    const Vec3 delta(dxy(rng), dxy(rng), dz(rng));
    const double expected = downwash_oracle(m, delta);
    const double got = -aero::downwash_force(m, below, at(below.position + delta)).z();
    if (expected < aero::kDownwashCutoff) {
      CHECK(got == 0.0);
    } else {
      CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  // Overlapping vehicles stay finite.
  CHECK(std::isfinite(aero::downwash_force(m, below, at({0, 0, 0.5 + 1e-12})).z()));
  CHECK(std::isfinite(aero::downwash_force(m, below, at({0, 0, 0.5 + 0.6875})).z()));
}

TEST_CASE("accumulate effects") {
  const DroneModel m = cf2x();
  const double hover = hover_rpm(m, 9.8);
  std::vector<DroneModel> models(3, m);
  std::vector<DroneState> states = {at({0, 0, 0.3}, hover), at({0.01, 0, 0.6}, hover),
                                    at({0, 0.01, 0.9}, hover)};
  states[0].velocity = {0.2, 0, 0};

  const auto none = aero::accumulate_effects(models, states, AeroToggle{});
  for (const auto& f : none) {
    CHECK(f.world_force == Vec3::Zero());
    CHECK(f.per_motor_thrust_bonus == Vec4::Zero());
  }

  std::vector<DroneModel> one_model(1, m);
  std::vector<DroneState> one_state(1, states[0]);
  CHECK(aero::accumulate_effects(one_model, one_state, {false, false, true})[0].world_force ==
        Vec3::Zero());

  // Stacked trio against a brute-force pairwise sum.
  const auto dw = aero::accumulate_effects(models, states, {false, false, true});
  CHECK(dw[2].world_force == Vec3::Zero());
  CHECK(dw[1].world_force == aero::downwash_force(m, states[1], states[2]));
  const Vec3 bottom =
      aero::downwash_force(m, states[0], states[1]) + aero::downwash_force(m, states[0], states[2]);
  CHECK((dw[0].world_force - bottom).norm() == 0.0);
  CHECK(dw[0].world_force.z() < dw[1].world_force.z());

  // Disjoint effect sets superpose.
  const AeroToggle all{true, true, true};
  const auto total = aero::accumulate_effects(models, states, all);
  const auto a = aero::accumulate_effects(models, states, {true, false, false});
  const auto b = aero::accumulate_effects(models, states, {false, true, true});
  for (std::size_t i = 0; i < states.size(); ++i) {
    CHECK(total[i].world_force == a[i].world_force + b[i].world_force);
    CHECK(total[i].per_motor_thrust_bonus ==
          a[i].per_motor_thrust_bonus + b[i].per_motor_thrust_bonus);
  }

  // Finite everywhere for random swarms above the clamps.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(-0.5, 0.5), z(0.0, 2.0), rpm(0, m.max_rpm);
  for (int k = 0; k < 50; ++k) {
    for (auto& s : states) {
      s.position = {pos(rng), pos(rng), z(rng)};
      s.velocity = {pos(rng), pos(rng), pos(rng)};
      s.last_rpms = Rpm4::Constant(rpm(rng));
      s.quaternion = dronesim::testing::random_attitude(rng);
    }
    for (const auto& f : aero::accumulate_effects(models, states, all)) {
      CHECK(f.world_force.allFinite());
      CHECK(f.per_motor_thrust_bonus.allFinite());
    }
  }
}
