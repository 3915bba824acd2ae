#include "vortexlab/error.hpp"
#include "vortexlab/flat_norm.hpp"
#include "vortexlab/geometry.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace vortexlab;
using std::numbers::pi;

namespace {

AtomicMeasure unit_atoms(std::vector<std::pair<Point, int>> atoms) {
  std::vector<Atom> out;
  for (auto& [p, d] : atoms) out.push_back({p, pi * d});
  return AtomicMeasure(std::move(out));
}

AtomicMeasure random_measure(std::mt19937& rng, int max_per_sign, const Domain& box) {
  std::uniform_int_distribution<int> count(0, max_per_sign);
  std::vector<Atom> atoms;
  for (int sign : {1, -1}) {
    const int n = count(rng);
    for (int k = 0; k < n; ++k)
      atoms.push_back({oracle::random_point(rng, box.xmin() + 0.05, box.xmax() - 0.05), sign * pi});
  }
  return AtomicMeasure(std::move(atoms)).canonical();
}

}  // namespace

TEST_CASE("domain construction validates its parameters") {
  CHECK_THROWS_AS(Domain::disk(0.0), Error);
  CHECK_THROWS_AS(Domain::rectangle(1.0, 0.0, 0.0, 1.0), Error);
  const Domain box = Domain::rectangle(0.0, 2.0, 0.0, 1.0);
  CHECK(box.boundary_distance({0.5, 0.5}) == doctest::Approx(0.5));
  CHECK(box.boundary_distance({3.0, 0.5}) < 0.0);
  CHECK(Domain::disk(2.0).boundary_distance({1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(std::isinf(Domain::plane().boundary_distance({1e6, 0.0})));
}

TEST_CASE("vortex configurations reject bad degrees and sizes") {
  CHECK_THROWS_AS(VortexConfig({{0, 0}}, {2}), Error);
  CHECK_THROWS_AS(VortexConfig({{0, 0}}, {1, -1}), Error);
  CHECK_THROWS_AS(VortexConfig({{std::nan(""), 0}}, {1}), Error);
  const VortexConfig c({{0, 0}, {1, 0}}, {1, -1});
  CHECK(c.conjugated().degree(0) == -1);
  CHECK(c.with_flat(c.flatten()).position(1) == c.position(1));
  CHECK_THROWS_AS(c.require_inside(Domain::disk(0.5)), Error);
}

TEST_CASE("separation radius") {
  SUBCASE("pair far from the boundary") {
    const VortexConfig c({{0, 0}, {1, 0}}, {1, 1});
    CHECK(separation_radius(c, Domain::rectangle(-3, 4, -3, 3)) == doctest::Approx(0.125));
  }
  SUBCASE("coincident points") {
    const VortexConfig c({{0, 0}, {0, 0}}, {1, -1});
    CHECK(separation_radius(c, Domain::plane()) == 0.0);
  }
  SUBCASE("single vortex in a disk") {
    CHECK(separation_radius(VortexConfig({{0, 0}}, {1}), Domain::disk(4.0)) == doctest::Approx(0.5));
  }
  SUBCASE("single vortex on the plane") {
    CHECK(std::isinf(separation_radius(VortexConfig({{0, 0}}, {1}), Domain::plane())));
  }
  SUBCASE("permutation invariance and translation equivariance") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Point> p;
      for (int k = 0; k < 4; ++k) p.push_back(oracle::random_point(rng, -2, 2));
      const VortexConfig a(p, {1, -1, 1, -1});
      std::vector<Point> q = {p[2], p[0], p[3], p[1]};
      const VortexConfig b(q, {1, 1, -1, -1});
      const Point shift(3.5, -1.25);
      for (auto& x : p) x += shift;
      const VortexConfig c(p, {1, -1, 1, -1});
      CHECK(separation_radius(a, Domain::plane()) == doctest::Approx(separation_radius(b, Domain::plane())));
      CHECK(separation_radius(a, Domain::plane()) == doctest::Approx(separation_radius(c, Domain::plane())));
    }
  }
}

TEST_CASE("flat norm reference values") {
  const Domain box = Domain::rectangle(-3, 3, -3, 3);
  SUBCASE("identical measures") {
    const AtomicMeasure a = unit_atoms({{{0.2, 0.1}, 1}, {{-1, 1}, -1}});
    CHECK(flat_norm_distance(a, a, box) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("matched small displacements") {
    const AtomicMeasure a = unit_atoms({{{0, 0}, 1}, {{1, 0}, 1}});
    const AtomicMeasure b = unit_atoms({{{0.01, 0}, 1}, {{1, 0.02}, 1}});
    CHECK(flat_norm_distance(a, b, box) == doctest::Approx(0.03 * pi).epsilon(1e-12));
  }
  SUBCASE("mass leaves through the nearest boundary") {
    const AtomicMeasure a = unit_atoms({{{0.05, 0.5}, 1}});
    CHECK(flat_norm_distance(a, AtomicMeasure(), Domain::rectangle(0, 1, 0, 1)) ==
          doctest::Approx(0.05 * pi).epsilon(1e-12));
  }
  SUBCASE("plane requires equal total weight") {
    CHECK_THROWS_AS(flat_norm_distance(unit_atoms({{{0, 0}, 1}}), AtomicMeasure(), Domain::plane()), Error);
  }
  SUBCASE("non-finite coordinates") {
    const AtomicMeasure bad = unit_atoms({{{std::nan(""), 0}, 1}});
    CHECK_THROWS_AS(flat_norm_distance(bad, bad, box), Error);
  }
}

TEST_CASE("flat norm agrees with exhaustive enumeration") {
  std::mt19937 rng(2024);
  const Domain box = Domain::rectangle(-1, 1, -1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const AtomicMeasure a = random_measure(rng, 2, box);
    const AtomicMeasure b = random_measure(rng, 2, box);
    const double fast = flat_norm_distance(a, b, box);
    const double slow = oracle::brute_force_flat_norm(a, b, box, pi);
    REQUIRE(fast == doctest::Approx(slow).epsilon(1e-10));
  }
}

TEST_CASE("flat norm is a metric") {
  std::mt19937 rng(99);
  const Domain box = Domain::rectangle(-1, 1, -1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const AtomicMeasure a = random_measure(rng, 2, box);
    const AtomicMeasure b = random_measure(rng, 2, box);
    const AtomicMeasure c = random_measure(rng, 2, box);
    const double ab = flat_norm_distance(a, b, box), ba = flat_norm_distance(b, a, box);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= flat_norm_distance(a, c, box) + flat_norm_distance(c, b, box) + 1e-12);
    CHECK(flat_norm_distance(a, a, box) == doctest::Approx(0.0));
  }
}

TEST_CASE("flat norm equals summed displacement for small matched displacements") {
  std::mt19937 rng(5);
  std::normal_distribution<double> jitter(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point> p = {{-1, 0}, {1, 0.3}, {0.2, 1.4}};
    const VortexConfig alpha(p, {1, -1, 1});
    const double r = separation_radius(alpha, Domain::plane());
    double sum = 0.0;
    for (auto& x : p) {
      Point d(jitter(rng), jitter(rng));
      d *= 0.05 * r / d.norm() * std::abs(jitter(rng)) / 3.0;
      x += d;
      sum += d.norm();
    }
    const VortexConfig xi(p, {1, -1, 1});
    const double fn = flat_norm_distance(AtomicMeasure::from_config(alpha, 1.0), AtomicMeasure::from_config(xi, 1.0),
                                         Domain::plane());
    CHECK(fn == doctest::Approx(sum).epsilon(1e-9));
  }
}

TEST_CASE("weight quantum and canonical form") {
  CHECK(weight_quantum({pi, -2 * pi, 3 * pi}) == doctest::Approx(pi));
  CHECK(weight_quantum({1.0, 0.5}) == doctest::Approx(0.5));
  const AtomicMeasure m({{{0, 0}, pi}, {{0, 0}, -pi}, {{1, 1}, pi}, {{1, 1}, pi}});
  const AtomicMeasure c = m.canonical();
  REQUIRE(c.size() == 1);
  CHECK(c.atoms()[0].weight == doctest::Approx(2 * pi));
}

TEST_CASE("assignment solver matches brute force") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::MatrixXd cost(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) cost(i, j) = u(rng);
    const std::vector<int> a = solve_assignment(cost);
    double got = 0.0;
    for (int i = 0; i < 5; ++i) got += cost(i, a[i]);
    std::vector<int> perm = {0, 1, 2, 3, 4};
    double best = 1e300;
    do {
      double s = 0.0;
      for (int i = 0; i < 5; ++i) s += cost(i, perm[i]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("pairing respects signs") {
  SUBCASE("single pair") {
    const Pairing p = pair_configurations(VortexConfig({{0, 0}}, {1}), unit_atoms({{{0.01, 0}, 1}}));
    REQUIRE(p.matches.size() == 1);
    CHECK(p.matches[0].atom == 0);
  }
  SUBCASE("sign incompatible") {
    const Pairing p = pair_configurations(VortexConfig({{0, 0}}, {1}), unit_atoms({{{0.01, 0}, -1}}));
    CHECK(p.matches.empty());
    CHECK(p.unmatched_atoms.size() == 1);
  }
  SUBCASE("crossed order") {
    const Pairing p = pair_configurations(VortexConfig({{0, 0}, {1, 0}}, {1, -1}),
                                          unit_atoms({{{0.9, 0.1}, -1}, {{0.1, 0}, 1}}));
    REQUIRE(p.matches.size() == 2);
    for (const auto& m : p.matches) CHECK(m.atom == 1 - m.reference);
  }
}

TEST_CASE("vortex config text round trip") {
  const VortexConfig c({{0.25, -1.5}, {3, 4}}, {1, -1});
  std::stringstream ss;
  write_vortex_config(ss, c);
  std::stringstream in("# comment\n" + ss.str());
  const VortexConfig back = read_vortex_config(in);
  REQUIRE(back.size() == 2);
  CHECK(back.position(0) == c.position(0));
  CHECK(back.degree(1) == -1);
  std::stringstream bad("0 0 2\n");
  CHECK_THROWS_AS(read_vortex_config(bad), Error);
}
