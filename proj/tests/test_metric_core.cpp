#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "confdim/errors.hpp"
#include "confdim/metric_space.hpp"
#include "confdim/nets.hpp"
#include "confdim/rng.hpp"
#include "helpers.hpp"

using namespace confdim;
using namespace confdim::testing;

TEST_CASE("build_space accepts degenerate and graph metrics") {
  auto one = FiniteMetricSpace::build({0.0}, 1);
  CHECK(one.n_points() == 1);
  CHECK(one.diameter() == 0.0);

  auto p3 = path_space(3);
  CHECK(p3.dist(0, 2) == 2.0);
}

TEST_CASE("build_space rejects invariant violations") {
  CHECK_THROWS_AS(FiniteMetricSpace::build({0, 1, 2, 0}, 2), AsymmetricMatrix);
  CHECK_THROWS_AS(FiniteMetricSpace::build({0, -1, -1, 0}, 2), NegativeDistance);
  // dist(0,2) = 5 > 1 + 1 violates the triangle inequality via 1
  std::vector<double> bad{0, 1, 5, 1, 0, 1, 5, 1, 0};
  CHECK_THROWS_AS(FiniteMetricSpace::build(std::move(bad), 3), TriangleViolation);
}

TEST_CASE("ball basics") {
  auto p3 = path_space(3);
  CHECK(p3.ball(0, 1.5) == PointSet{0, 1});
  CHECK(p3.ball(1, 0.5) == PointSet{1});   // r below min positive distance
  CHECK(p3.ball(1, 10.0) == PointSet{0, 1, 2});  // r beyond diameter
}

TEST_CASE("filled ball on a path has no holes") {
  auto p5 = path_space(5);
  CHECK(p5.filled_ball(0, 1.5, 4) == PointSet{0, 1});
}

TEST_CASE("filled ball on a cycle") {
  auto c6 = cycle_space(6);
  CHECK(c6.filled_ball(0, 1.5, 3) == PointSet{0, 1, 5});
}

TEST_CASE("filled ball absorbs a pocket component") {
  // 7-point witness: star with a pocket vertex a=3 hanging off the ball and
  // the anchor chain on the other side.
  UnitGraph g(7);
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(1, 3);
  g.add_edge(2, 4);
  g.add_edge(4, 5);
  g.add_edge(5, 6);
  auto sp = g.to_metric_space(0, 6);
  PointSet ball = sp.ball(0, 1.5);
  CHECK(ball == PointSet{0, 1, 2});
  PointSet filled = sp.filled_ball(0, 1.5, 6);
  PointSet expect = ball;
  expect.push_back(3);
  std::sort(expect.begin(), expect.end());
  CHECK(filled == expect);

  // Brute-force component oracle: the complement splits into {3} and {4,5,6}.
  CHECK_THROWS_AS(sp.filled_ball(0, 1.5, 1), AnchorInsideBall);
}

TEST_CASE("ball is always contained in the filled ball, complement connected") {
  Rng rng = make_rng(7);
  auto sp = grid_space(7);
  std::uniform_int_distribution<int> pick(0, sp.n_points() - 1);
  std::uniform_real_distribution<double> radius(0.05, 0.6);
  int tried = 0;
  for (int it = 0; it < 200 && tried < 60; ++it) {
    int c = pick(rng), a = pick(rng);
    double r = radius(rng);
    if (sp.dist(c, a) < r) continue;
    ++tried;
    PointSet ball = sp.ball(c, r);
    PointSet filled = sp.filled_ball(c, r, a);
    CHECK(std::includes(filled.begin(), filled.end(), ball.begin(), ball.end()));
    // complement of the filled ball is one proximity component holding a
    std::vector<char> in_filled(sp.n_points(), 0);
    for (int p : filled) in_filled[p] = 1;
    REQUIRE(!in_filled[a]);
    const auto& adj = sp.proximity_adjacency();
    std::vector<char> seen(sp.n_points(), 0);
    std::vector<int> stack{a};
    seen[a] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!seen[v] && !in_filled[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
    }
    CHECK(count == sp.n_points() - static_cast<int>(filled.size()));
  }
  CHECK(tried >= 30);
}

TEST_CASE("greedy nets: frozen trace on four collinear points") {
  // Points {0, 0.3, 0.5, 1.0} scaled by 1/2.1; greedy at level 1 with
  // alpha = 1/8 admits only points at distance >= 1/8 from the chosen set.
  std::vector<std::pair<double, double>> pts{{0, 0}, {0.3 / 2.1, 0}, {0.5 / 2.1, 0}, {1.0 / 2.1, 0}};
  auto sp = points_space(pts);
  auto nets = build_nets(sp, 0.125, 1);
  CHECK(nets.levels[0] == std::vector<int>{0});
  // brute-force greedy trace: 0 enters; 0.143 and 0.238 are within 1/8 of a
  // chosen point? 0.143 >= 0.125 so index 1 enters; 0.238 - 0.143 = 0.095 < 1/8
  // blocks index 2; 0.476 - 0.143 = 0.333 admits index 3.
  CHECK(nets.levels[1] == std::vector<int>{0, 1, 3});
  check_nets(sp, nets);
}

TEST_CASE("nets: n_max 0 and duplicate points") {
  auto sp = segment_space(5);
  auto nets = build_nets(sp.normalized(0.9), 0.125, 0);
  CHECK(nets.levels.size() == 1);
  CHECK(nets.levels[0] == std::vector<int>{0});

  std::vector<double> d{0, 0, 0, 0};
  auto dup = FiniteMetricSpace::build(std::move(d), 2);
  auto nets2 = build_nets(dup, 0.125, 3);
  for (const auto& lvl : nets2.levels) CHECK(lvl.size() == 1);
  check_nets(dup, nets2);
}

TEST_CASE("nets require normalized diameter and alpha in range") {
  auto sp = path_space(4);  // diameter 3
  CHECK_THROWS_AS(build_nets(sp, 0.125, 2), DiamNotNormalized);
  CHECK_THROWS_AS(build_nets(sp.normalized(0.9), 0.5, 2), BadConfig);
}

TEST_CASE("net invariants hold on random instances, both orderings") {
  for (unsigned seed : {1u, 2u, 3u}) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 60; ++i) pts.emplace_back(unif(rng), unif(rng));
    auto sp = points_space(pts).normalized(0.9);
    auto nets = build_nets(sp, 0.125, 3);
    check_nets(sp, nets);

    std::vector<double> mass(sp.n_points());
    for (auto& m : mass) m = 0.5 + unif(rng);
    auto spm = FiniteMetricSpace::build(std::vector<double>(sp.raw()), sp.n_points(), 0,
                                        std::nullopt, mass);
    auto nets2 = build_nets(spm, 0.125, 3, NetOrdering::MassWeighted, seed);
    check_nets(spm, nets2);
  }
}

TEST_CASE("covering numbers") {
  auto one = FiniteMetricSpace::build({0.0}, 1);
  CHECK(one.covering_number(0.5) == 1);

  auto p3 = path_space(3);
  CHECK(p3.covering_number(0.5) == 3);
  CHECK(p3.covering_number(10.0) == 1);  // r beyond diameter

  // nonincreasing in r on a fixed instance
  auto sp = grid_space(8);
  std::size_t prev = sp.n_points() + 1;
  for (double r = 0.05; r < 1.5; r *= 1.3) {
    std::size_t c = sp.covering_number(r);
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("unit graph covering matches the dense computation") {
  UnitGraph g(9);
  for (int i = 0; i + 1 < 9; ++i) g.add_edge(i, i + 1);
  auto sp = g.to_metric_space();
  for (double r : {1.0, 1.5, 2.0, 3.0, 7.0})
    CHECK(g.covering_number(r) == sp.covering_number(r));
}

TEST_CASE("hull boundary area basics") {
  auto c12 = cycle_space(12, 0, 6);
  std::vector<double> mass(12, 1.0 / 12);
  auto sp = FiniteMetricSpace::build(std::vector<double>(c12.raw()), 12, 0, 6, mass);
  CHECK_THROWS_AS(sp.hull_boundary_area(0, 6, 5.8, 0.5), AnchorInsideBall);
  double v = sp.hull_boundary_area(0, 6, 2.0, 1.5);
  // ball(0, 3.5) = {0, +-1, +-2, +-3}, filled ball(0, 2) = {0, +-1};
  // the annulus holds 4 points of mass 1/12, divided by eps^2
  CHECK(v == doctest::Approx((4.0 / 12) / (1.5 * 1.5)));
}

TEST_CASE("hull boundary area of an empty annulus is zero") {
  auto c12 = cycle_space(12, 0, 6);
  std::vector<double> mass(12, 1.0 / 12);
  auto sp = FiniteMetricSpace::build(std::vector<double>(c12.raw()), 12, 0, 6, mass);
  // between t = 1.2 and t + eps = 1.8 no new points appear on the cycle
  CHECK(sp.hull_boundary_area(0, 6, 1.2, 0.6) == 0.0);
}
