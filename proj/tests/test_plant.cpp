#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mgrid/plant.hpp"

using namespace mgrid;

namespace {

PowerCommand golden_command() {
  PowerCommand c;
  c.p.resize(6);
  c.p << 400.0, 300.0, 200.0, 100.0, 500.0, 100.0;
  c.p_o = 1600.0;
  c.e = 0.0;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(validate(PlantConfig{PlantMode::ideal, 0.0, 0.0}));
  CHECK_NOTHROW(validate(PlantConfig{PlantMode::ideal, 0.0, 0.05}));
  CHECK_NOTHROW(validate(PlantConfig{PlantMode::first_order, 0.05, 0.01}));
  CHECK_THROWS_AS(validate(PlantConfig{PlantMode::ideal, 0.0, -0.01}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(PlantConfig{PlantMode::ideal, 0.0, 0.06}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(PlantConfig{PlantMode::first_order, 0.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("lossless ideal plant is a bitwise pass-through") {
  const PowerCommand cmd = golden_command();
  const Eigen::VectorXd prev = Eigen::VectorXd::Zero(6);
  const Eigen::VectorXd out =
      deliver(cmd, PlantConfig{PlantMode::ideal, 0.0, 0.0}, prev, 1e-3);
  for (int i = 0; i < 6; ++i) CHECK(out[i] == cmd.p[i]);
}

TEST_CASE("resistive loss scales delivery") {
  const PowerCommand cmd = golden_command();
  const Eigen::VectorXd prev = Eigen::VectorXd::Zero(6);
  const Eigen::VectorXd out =
      deliver(cmd, PlantConfig{PlantMode::ideal, 0.0, 0.01}, prev, 1e-3);
  double total = 0.0;
  for (int i = 0; i < 6; ++i) total += out[i];
  CHECK(total == doctest::Approx(1584.0).epsilon(1e-12));
}

TEST_CASE("first-order lag settles to the scaled command") {
  const PowerCommand cmd = golden_command();
  const PlantConfig cfg{PlantMode::first_order, 0.05, 0.01};
  Eigen::VectorXd state = Eigen::VectorXd::Zero(6);
  for (int w = 0; w < 2000; ++w) state = deliver(cmd, cfg, state, 1e-3);
  for (int i = 0; i < 6; ++i) {
    const double target = 0.99 * cmd.p[i];
    CHECK(std::abs(state[i] - target) <= 1e-6 * target);
  }
}

TEST_CASE("first-order lag rejects unstable steps") {
  const PowerCommand cmd = golden_command();
  const Eigen::VectorXd prev = Eigen::VectorXd::Zero(6);
  const PlantConfig cfg{PlantMode::first_order, 0.05, 0.0};
  CHECK_THROWS_WITH_AS(deliver(cmd, cfg, prev, 0.025),
                       doctest::Contains("dt must be below tau/2"),
                       std::invalid_argument);
  CHECK_NOTHROW(deliver(cmd, cfg, prev, 0.02));
  CHECK_THROWS_AS(deliver(cmd, cfg, prev, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(
      deliver(cmd, cfg, Eigen::VectorXd::Zero(3), 0.001),
      std::invalid_argument);
}
