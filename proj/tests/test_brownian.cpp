#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "confdim/errors.hpp"
#include "confdim/excursion.hpp"
#include "confdim/quadmap.hpp"
#include "confdim/rng.hpp"

using namespace confdim;

TEST_CASE("excursion endpoints, positivity, determinism") {
  for (unsigned seed : {1u, 7u, 1234u}) {
    auto x = sample_excursion(512, seed);
    CHECK(x.values.front() == 0.0);
    CHECK(x.values.back() == 0.0);
    CHECK(*std::min_element(x.values.begin(), x.values.end()) >= 0.0);
    auto y = sample_excursion(512, seed);
    CHECK(x.values == y.values);
  }
  CHECK_THROWS_AS(sample_excursion(1, 3), BadConfig);
}

TEST_CASE("snake on the zero excursion is zero") {
  ExcursionPath flat;
  flat.n_steps = 2;
  flat.values = {0.0, 0.0, 0.0};
  auto z = sample_snake(flat, 5, SnakeBackend::Tree);
  CHECK(z.values == std::vector<double>{0.0, 0.0, 0.0});
  auto zd = sample_snake(flat, 5, SnakeBackend::Dense);
  CHECK(zd.values == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("snake variance and covariance match the excursion minima (both backends)") {
  const int n = 48;
  auto x = sample_excursion(n, 2024);
  const int N = 12000;
  for (auto backend : {SnakeBackend::Tree, SnakeBackend::Dense}) {
    const std::pair<int, int> probes[] = {{12, 12}, {30, 30}, {12, 30}, {5, 40}};
    double sums[4] = {0, 0, 0, 0}, sums2[4] = {0, 0, 0, 0};
    for (int k = 0; k < N; ++k) {
      auto z = sample_snake(x, derive_seed(55, k), backend);
      for (int p = 0; p < 4; ++p) {
        double v = z.values[probes[p].first] * z.values[probes[p].second];
        sums[p] += v;
        sums2[p] += v * v;
      }
    }
    for (int p = 0; p < 4; ++p) {
      auto [i, j] = probes[p];
      double target = *std::min_element(x.values.begin() + std::min(i, j),
                                        x.values.begin() + std::max(i, j) + 1);
      double mean = sums[p] / N;
      double se = std::sqrt(std::max(sums2[p] / N - mean * mean, 0.0) / N);
      CHECK(std::abs(mean - target) <= 5.0 * se);
    }
  }
}

TEST_CASE("dense backend refuses oversized inputs") {
  ExcursionPath x;
  x.n_steps = 4001;
  x.values.assign(4002, 0.1);
  x.values.front() = x.values.back() = 0.0;
  CHECK_THROWS_AS(sample_snake(x, 1, SnakeBackend::Dense), BackendTooLarge);
}

TEST_CASE("dzero identities") {
  auto x = sample_excursion(200, 31);
  auto z = sample_snake(x, 32, SnakeBackend::Tree);
  DzeroTable t(x, z);
  CHECK(t(17, 17) == 0.0);
  CHECK(t(60, 17) == t(17, 60));

  int star = z.argmin();
  double zmin = z.min();
  for (int i = 0; i < 200; i += 13) {
    CHECK(t(i, star) == doctest::Approx(z.values[i] - zmin).epsilon(1e-12));
    for (int j = i; j < 200; j += 17)
      CHECK(t(i, j) >= std::abs(z.values[i] - z.values[j]) - 1e-12);
  }
  auto brute = [&](int i, int j) {
    if (i > j) std::swap(i, j);
    double inner = 1e300, outer = 1e300;
    for (int k = i; k <= j; ++k) inner = std::min(inner, z.values[k]);
    for (int k = 0; k <= i; ++k) outer = std::min(outer, z.values[k]);
    for (int k = j; k <= 200; ++k) outer = std::min(outer, z.values[k]);
    return z.values[i] + z.values[j] - 2.0 * std::max(inner, outer);
  };
  for (int i = 0; i < 200; i += 23)
    for (int j = 0; j < 200; j += 29) CHECK(t(i, j) == doctest::Approx(brute(i, j)).epsilon(1e-12));
}

TEST_CASE("quotient metric: trivial excursion collapses to a point") {
  ExcursionPath flat;
  flat.n_steps = 2;
  flat.values = {0.0, 0.0, 0.0};
  SnakeLabels z;
  z.values = {0.0, 0.0, 0.0};
  auto q = quotient_metric(flat, z);
  CHECK(q.space.n_points() == 1);
}

TEST_CASE("quotient metric invariants and the cactus identity") {
  const int n = 220;
  auto x = sample_excursion(n, 77);
  auto z = sample_snake(x, 78, SnakeBackend::Tree);
  auto q = quotient_metric(x, z);
  const auto& sp = q.space;

  DzeroTable t(x, z);
  for (int i = 0; i <= n; i += 7)
    for (int j = 0; j <= n; j += 11) {
      double d = sp.dist(q.class_of[i], q.class_of[j]);
      CHECK(d <= t(i, j) + 1e-12);
    }
  for (int i = 0; i < sp.n_points(); i += 3)
    for (int j = 0; j < sp.n_points(); j += 5)
      for (int k = 0; k < sp.n_points(); k += 7)
        CHECK(sp.dist(i, j) <= sp.dist(i, k) + sp.dist(k, j) + 1e-9);

  // D(class(argmin Z), class(t)) = Z_t - min Z, checked against the
  // independent relaxation oracle and the Dijkstra route
  int star = z.argmin();
  auto oracle = quotient_from_source_oracle(t, star);
  auto fast = quotient_from_source(t, star);
  double zmin = z.min();
  for (int i = 0; i <= n; ++i) {
    CHECK(std::abs(oracle[i] - (z.values[i] - zmin)) <= 1e-9);
    CHECK(std::abs(fast[i] - oracle[i]) <= 1e-9);
    CHECK(std::abs(sp.dist(q.class_of[star], q.class_of[i]) - (z.values[i] - zmin)) <= 1e-9);
  }

  CHECK(q.class_of[0] == q.class_of[n]);  // endpoints glue
  CHECK(sp.root() == q.class_of[0]);
  CHECK(sp.anchor() == q.class_of[star]);
  CHECK(sp.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("quadrangulation: structural invariants on every sample") {
  for (int F : {1, 2, 3, 8, 50, 400}) {
    for (unsigned s = 0; s < 6; ++s) {
      QuadMap q = sample_quadrangulation(F, derive_seed(900 + F, s));
      CHECK(q.n_faces() == F);  // assemble() validated all face degrees = 4
      CHECK(q.n_vertices() == F + 2);
      CHECK(q.n_edges() == 2 * F);
      auto g = q.skeleton();
      CHECK(g.is_connected());
      CHECK(g.is_bipartite());
      // distance-to-star oracle: d(v, v*) = label(v) - min label + 1
      auto d = g.bfs(q.star_vertex());
      int minl = q.labels()[q.star_vertex()];
      for (int v = 0; v < q.n_vertices(); ++v)
        if (v != q.star_vertex()) CHECK(d[v] == q.labels()[v] - minl);
      auto dr = g.bfs(q.root_vertex());
      for (int v = 0; v < q.n_vertices(); ++v) CHECK(dr[v] == q.dist_from_root()[v]);
    }
  }
}

TEST_CASE("quadrangulation determinism") {
  QuadMap a = sample_quadrangulation(64, 5);
  QuadMap b = sample_quadrangulation(64, 5);
  CHECK(a.to_json() == b.to_json());
  QuadMap c = sample_quadrangulation(64, 6);
  CHECK(a.to_json() != c.to_json());
}

TEST_CASE("quadmap JSON round trip preserves the structure") {
  QuadMap q = sample_quadrangulation(30, 17);
  QuadMap r = QuadMap::from_json(q.to_json());
  CHECK(r.n_faces() == q.n_faces());
  CHECK(r.n_vertices() == q.n_vertices());
  CHECK(r.to_json() == q.to_json());
}

TEST_CASE("hull boundary area on rescaled quadrangulations tracks t^2") {
  // Distances rescaled by (9/(8F))^{1/4} and vertex mass 1/V make the sample
  // comparable to the unit-area continuum limit; the boundary-length proxy
  // at radius t then has mean near t^2 (hull process marginals).
  const int F = 3000;
  const double lambda = std::pow(9.0 / (8.0 * F), 0.25);
  const double t = 0.5, eps = 0.25;
  double acc = 0.0;
  int used = 0;
  for (unsigned s = 0; s < 14; ++s) {
    QuadMap q = sample_quadrangulation(F, derive_seed(6000, s));
    UnitGraph g = q.skeleton();
    auto sp0 = g.to_metric_space(q.root_vertex(), q.star_vertex());
    std::vector<double> mass(sp0.n_points(), 1.0 / sp0.n_points());
    auto sp = FiniteMetricSpace::from_trusted(std::vector<double>(sp0.raw()), sp0.n_points(),
                                              sp0.root(), sp0.anchor(), std::move(mass))
                  .scaled(lambda);
    if (sp.dist(sp.root(), sp.anchor()) < t + eps) continue;  // marked points too close
    acc += sp.hull_boundary_area(sp.root(), sp.anchor(), t, eps);
    ++used;
  }
  REQUIRE(used >= 8);
  double mean = acc / used;
  CHECK(mean >= t * t / 3.0);
  CHECK(mean <= 3.0 * t * t);
}
