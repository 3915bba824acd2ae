#include "vortexlab/error.hpp"
#include "vortexlab/ode.hpp"
#include "vortexlab/renormalized_energy.hpp"

#include "../support/box_ode.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace vortexlab;
using std::numbers::pi;

namespace {

const Domain kPlane = Domain::plane();
const AnalyticPotential kZero;

}  // namespace

TEST_CASE("velocity reference values") {
  const double l = 0.8;
  const auto v = vortex_velocity(VortexConfig({{0, l / 2}, {0, -l / 2}}, {1, -1}), kPlane, kZero,
                                 DynamicsKind::Schrodinger);
  for (const auto& vk : v) {
    CHECK(vk.x() == doctest::Approx(2.0 / l).epsilon(1e-14));
    CHECK(vk.y() == doctest::Approx(0.0));
  }
  const auto s = vortex_velocity(VortexConfig({{-l / 2, 0}, {l / 2, 0}}, {1, 1}), kPlane, kZero,
                                 DynamicsKind::Schrodinger);
  CHECK((s[0] + s[1]).norm() <= 1e-14);
  CHECK(std::abs(s[0].y()) == doctest::Approx(2.0 / l).epsilon(1e-14));

  const auto m = velocity_from_gradient({{1.0, 0.0}}, {1}, DynamicsKind::Mixed);
  CHECK(m[0].x() == doctest::Approx(-1.0 / (2 * pi)));
  CHECK(m[0].y() == doctest::Approx(-1.0 / (2 * pi)));
  // (I - d M) v = -grad / pi with M v = (-v2, v1).
  const Eigen::Vector2d residual = m[0] - Eigen::Vector2d(-m[0].y(), m[0].x()) + Eigen::Vector2d(1.0, 0.0) / pi;
  CHECK(residual.norm() <= 1e-14);

  const auto g = vortex_velocity(VortexConfig({{0.5, 0}}, {1}), kPlane, builtin_potential("gaussian"),
                                 DynamicsKind::GradientFlow);
  CHECK(g[0].x() > 0.0);
  CHECK_THROWS_AS(parse_dynamics_kind("heat"), Error);
  CHECK(parse_dynamics_kind(to_string(DynamicsKind::Mixed)) == DynamicsKind::Mixed);
}

TEST_CASE("free dipole translates rigidly") {
  const double l = 0.5;
  const VortexConfig c({{0, l / 2}, {0, -l / 2}}, {1, -1});
  const Trajectory t = integrate(c, kPlane, kZero, DynamicsKind::Schrodinger, 1.0);
  REQUIRE(t.termination == Trajectory::Termination::ReachedT);
  CHECK(t.times.back() == 1.0);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK((t.states.back().position(k) - c.position(k) - Point(2.0 / l, 0)).norm() <= 1e-8);
  }
  CHECK(hamiltonian_drift(t) <= 1e-8 * std::abs(t.h0.front()) + 1e-10);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
}

TEST_CASE("same-sign pair returns after one rotation period") {
  const double l = 0.6;
  const VortexConfig c({{-l / 2, 0}, {l / 2, 0}}, {1, 1});
  const double period = 2.0 * pi / (4.0 / (l * l));
  const Trajectory t = integrate(c, kPlane, kZero, DynamicsKind::Schrodinger, period);
  for (std::size_t k = 0; k < 2; ++k) CHECK((t.states.back().position(k) - c.position(k)).norm() <= 1e-6);
  for (const VortexConfig& s : t.states) {
    CHECK((s.position(0) - s.position(1)).norm() == doctest::Approx(l).epsilon(1e-8));
    CHECK((s.position(0) + s.position(1)).norm() <= 1e-8);
  }
}

TEST_CASE("gradient flow dipole collides") {
  const VortexConfig c({{-0.5, 0}, {0.5, 0}}, {1, -1});
  const Trajectory t = integrate(c, kPlane, kZero, DynamicsKind::GradientFlow, 1.0);
  REQUIRE(t.termination == Trajectory::Termination::Collision);
  // Each vortex approaches the other at speed 2/l, so d(l^2)/dt = -8.
  CHECK(t.collision_time == doctest::Approx(0.125).epsilon(1e-5));
  CHECK(dissipation_check(t).monotone);
  CHECK(t.r_alpha.back() <= 1.01e-4 * t.r_alpha.front());
}

TEST_CASE("conservation and dissipation on random configurations") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Point> p = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    for (auto& x : p) x += 0.3 * oracle::random_point(rng, -1, 1);
    const VortexConfig c(p, {1, -1, 1, 1});
    const Trajectory s = integrate(c, kPlane, builtin_potential("gaussian"), DynamicsKind::Schrodinger, 10.0);
    CHECK(hamiltonian_drift(s) <= 1e-7 * std::abs(s.h0.front()));
    const Trajectory g = integrate(c, kPlane, builtin_potential("gaussian"), DynamicsKind::GradientFlow, 0.5);
    CHECK(dissipation_check(g).monotone);
  }
}

TEST_CASE("single vortex follows level sets") {
  for (const char* kind : {"gaussian", "step", "double_gaussian", "lattice"}) {
    const AnalyticPotential q = builtin_potential(kind);
    const VortexConfig c({{0.4, 0.7}}, {1});
    const Trajectory t = integrate(c, kPlane, q, DynamicsKind::Schrodinger, 5.0);
    double worst = 0.0;
    for (const VortexConfig& s : t.states) worst = std::max(worst, std::abs(q.value(s.position(0)) - q.value({0.4, 0.7})));
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("critical point stays put") {
  const VortexConfig c({{0, 0}}, {1});
  const Trajectory t = integrate(c, kPlane, builtin_potential("gaussian"), DynamicsKind::GradientFlow, 1.0);
  CHECK(hamiltonian_drift(t) == 0.0);
  CHECK(t.states.back().position(0).norm() == 0.0);
}

TEST_CASE("time reversal by conjugation") {
  const VortexConfig c({{-0.4, 0.1}, {0.3, 0.5}, {0.2, -0.6}}, {1, -1, 1});
  const AnalyticPotential q = builtin_potential("step");
  const Trajectory forward = integrate(c, kPlane, q, DynamicsKind::Schrodinger, 1.0);
  const VortexConfig back0 = forward.states.back().conjugated();
  const Trajectory back = integrate(back0, kPlane, q, DynamicsKind::Schrodinger, 1.0);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK((back.states.back().position(k) - c.position(k)).norm() <= 1e-6);
}

TEST_CASE("sampling and CSV output") {
  OdeOptions opt;
  opt.sample_times = {0.25, 0.5, 0.75, 1.0};
  const VortexConfig c({{0, 0.5}, {0, -0.5}}, {1, -1});
  const Trajectory t = integrate(c, kPlane, kZero, DynamicsKind::Schrodinger, 1.0, opt);
  REQUIRE(t.size() == 5);
  CHECK(t.state_at(0.5).position(0).x() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(t.state_at(0.375).position(0).x() == doctest::Approx(0.75).epsilon(1e-9));
  std::ostringstream out;
  write_trajectory_csv(out, t);
  const std::string csv = out.str();
  CHECK(csv.substr(0, csv.find('\n')) == "t,x1,y1,d1,x2,y2,d2,H0,r_alpha");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK_THROWS_AS(integrate(c, kPlane, kZero, DynamicsKind::Schrodinger, -1.0), Error);
  CHECK_THROWS_AS(integrate(VortexConfig({{0, 0}, {0, 0}}, {1, -1}), kPlane, kZero, DynamicsKind::Schrodinger, 1.0),
                  Error);
}

TEST_CASE("rectangle oracle reduces to image pairs far from the corners") {
  const oracle::BoxVortexOde box(-200, 200, -200, 200);
  const auto dipole = box.velocity({{0, 0.3}, {0, -0.3}}, {1, -1});
  CHECK(dipole[0].x() == doctest::Approx(2.0 / 0.6).epsilon(1e-4));
  CHECK(std::abs(dipole[0].y()) <= 1e-4);
  // Near a wall the image of opposite degree sits at distance 2 delta.
  const double delta = 0.25;
  const auto wall = box.velocity({{0, -200 + delta}}, {1});
  CHECK(std::abs(wall[0].x()) == doctest::Approx(1.0 / delta).epsilon(1e-4));
  CHECK(std::abs(wall[0].y()) <= 1e-10);
}
