#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/LU>

#include "dronesim/params.hpp"
#include "test_support.hpp"

using namespace dronesim;
using dronesim::testing::cf2p;
using dronesim::testing::cf2x;

namespace {

std::string default_model_text() {
  std::ifstream in(DataPaths::defaults().models_dir / "cf2x.model");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string without_line(const std::string& text, const std::string& key) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    if (line.rfind(key + " ", 0) != 0) out += line + "\n";
    start = end + 1;
  }
  return out;
}

std::string error_of(const std::string& text) {
  try {
    parse_drone_model(KvDocument::parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("default model file loads with the documented constants") {
  const DroneModel m = cf2x();
  CHECK(m.name == "cf2x");
  CHECK(m.frame == Frame::cross);
  CHECK(m.mass == 0.027);
  CHECK(m.kf == 3.16e-10);
  CHECK(m.kt == 7.94e-12);
  CHECK(m.inertia_diag == Vec3(1.4e-5, 1.4e-5, 2.17e-5));
  CHECK(cf2p().frame == Frame::plus);
}

TEST_CASE("load errors name the key and value") {
  const std::string text = default_model_text();

  SUBCASE("missing key") {
    CHECK(error_of(without_line(text, "kf")) == "missing key: kf");
  }
  SUBCASE("non-positive mass") {
    auto doc = KvDocument::parse(text);
    doc.set("mass", "0");
    std::string msg;
    try {
      parse_drone_model(doc);
    } catch (const ConfigError& e) {
      msg = e.what();
    }
    CHECK(msg.find("non-positive constant: mass") == 0);
    CHECK(msg.find("= 0") != std::string::npos);
  }
  SUBCASE("hover above saturation") {
    auto doc = KvDocument::parse(text);
    doc.set("max_rpm", "10000");
    CHECK_THROWS_WITH_AS(parse_drone_model(doc), doctest::Contains("max_rpm = 10000"), ConfigError);
  }
  SUBCASE("malformed vector") {
    auto doc = KvDocument::parse(text);
    doc.set("inertia_diag", "1e-5, 2e-5");
    CHECK_THROWS_AS(parse_drone_model(doc), ConfigError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_drone_model("/nonexistent/model.model"), ConfigError);
  }
}

TEST_CASE("serialize then load reproduces the model") {
  for (const DroneModel& m : {cf2x(), cf2p()}) {
    const auto again = parse_drone_model(KvDocument::parse(serialize_drone_model(m)));
    CHECK(again == m);
  }
  // Perturbed constants survive the text round trip bit for bit.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int k = 0; k < 50; ++k) {
    DroneModel m = cf2x();
    m.mass *= u(rng);
    m.arm *= u(rng);
    m.kt *= u(rng);
    m.drag_coeffs *= u(rng);
    m.kd3 *= u(rng);
    const auto again = parse_drone_model(KvDocument::parse(serialize_drone_model(m)));
    CHECK(again == m);
  }
}

TEST_CASE("hover rpm") {
  DroneModel m = cf2x();
  // Root of 4 kf P^2 = m g found independently (30-digit Newton iteration).
  const double oracle = 14468.429183500698;
  CHECK(hover_rpm(m, 9.8) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(hover_rpm(m, 9.8) - 14468.6) < 0.5);

  DroneModel stiff = m;
  stiff.kf *= 4.0;
  CHECK(hover_rpm(stiff, 9.8) == doctest::Approx(hover_rpm(m, 9.8) / 2.0).epsilon(1e-14));
  CHECK(hover_rpm(m, 0.0) == 0.0);

  // Scaling mass and kf together leaves the hover speed unchanged.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int k = 0; k < 100; ++k) {
    DroneModel s = m;
    const double f = u(rng);
    s.mass *= f;
    s.kf *= f;
    CHECK(hover_rpm(s, 9.8) == doctest::Approx(hover_rpm(m, 9.8)).epsilon(1e-12));
  }
}

TEST_CASE("mixing matrix") {
  for (const DroneModel& m : {cf2x(), cf2p()}) {
    const Mat4 mix = mixing_matrix(m);
    CHECK(mix.row(0).sum() == doctest::Approx(4.0 * m.kf));
    CHECK(mix.row(3).sum() == 0.0);
    const double s = 1e8;
    const Vec4 w = mix * Vec4::Constant(s);
    CHECK(w[0] == doctest::Approx(4.0 * m.kf * s));
    CHECK(w[1] == 0.0);
    CHECK(w[2] == 0.0);
    CHECK(w[3] == 0.0);
    // Invertible: normalize rows to O(1) before taking the determinant.
    Mat4 unit = mix;
    for (int r = 0; r < 4; ++r) unit.row(r) /= unit.row(r).cwiseAbs().maxCoeff();
    CHECK(std::abs(unit.determinant()) > 1.0);
  }

  const DroneModel plus = cf2p();
  const Vec4 only_front = mixing_matrix(plus) * Vec4(1e8, 0, 0, 0);
  CHECK(only_front[1] == 0.0);
  CHECK(only_front[2] < 0.0);
  CHECK(only_front[2] == doctest::Approx(-plus.arm * plus.kf * 1e8));

  const DroneModel cross = cf2x();
  const Vec4 m0 = mixing_matrix(cross) * Vec4(1e8, 0, 0, 0);
  CHECK(m0[1] == doctest::Approx(cross.arm / std::sqrt(2.0) * cross.kf * 1e8));
  CHECK(m0[2] == doctest::Approx(-cross.arm / std::sqrt(2.0) * cross.kf * 1e8));
  CHECK(m0[3] == doctest::Approx(-cross.kt * 1e8));
}

TEST_CASE("world config validation") {
  auto w = dronesim::testing::world_with({{0, 0, 1}, {1, 0, 1}});
  CHECK_NOTHROW(validate(w));

  SUBCASE("control rate must divide physics rate") {
    w.control_hz = 50;
    CHECK_THROWS_WITH_AS(validate(w), doctest::Contains("multiple of control_hz"), ConfigError);
  }
  SUBCASE("distinct positions") {
    w.drones[1].position = w.drones[0].position;
    CHECK_THROWS_AS(validate(w), ConfigError);
  }
  SUBCASE("no drones") {
    w.drones.clear();
    CHECK_THROWS_AS(validate(w), ConfigError);
  }
  SUBCASE("task drone count") {
    w.task.kind = TaskKind::hover_single;
    CHECK_THROWS_AS(validate(w), ConfigError);
  }
}

TEST_CASE("scenario file parsing") {
  const auto dir = std::filesystem::temp_directory_path() / "dronesim_params_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "two.cfg";
  {
    std::ofstream out(path);
    out << "# comment\nphysics_hz = 480\ncontrol_hz = 48\nintegrator = rk4\n"
           "effects = drag, downwash\nseed = 42\nduration_s = 3\n"
           "drone = cf2x, 0, 0, 1, 0.5\ndrone = cf2p, 1, 0, 1, 0\n";
  }
  const WorldConfig w = load_world_config(path);
  CHECK(w.physics_hz == 480);
  CHECK(w.substeps() == 10);
  CHECK(w.integrator == Integrator::rk4);
  CHECK(w.effects == AeroToggle{true, false, true});
  CHECK(w.seed == 42);
  REQUIRE(w.drones.size() == 2);
  CHECK(w.drones[0].yaw == 0.5);
  CHECK(w.drones[1].model.frame == Frame::plus);
  CHECK(w.drones[0].gains == dronesim::testing::cf2_gains());

  {
    std::ofstream out(path);
    out << "drone = cf2x, 0, 0, 1\n";
  }
  CHECK_THROWS_AS(load_world_config(path), ConfigError);
}

TEST_CASE("shipped gain file matches the built-in defaults") {
  CHECK(dronesim::testing::cf2_gains() == PidGains{});
  const auto again = parse_pid_gains(KvDocument::parse(serialize_pid_gains(PidGains{})));
  CHECK(again == PidGains{});
}
