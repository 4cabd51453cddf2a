#include "confdim/nets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "confdim/errors.hpp"
#include "confdim/rng.hpp"

namespace confdim {

namespace {

std::vector<int> scan_order(const FiniteMetricSpace& space, NetOrdering ordering,
                            std::uint64_t seed) {
  const int n = space.n_points();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (ordering == NetOrdering::MassWeighted) {
    if (!space.has_mass()) throw MissingMass("mass-weighted ordering needs masses");
    // Efraimidis-Spirakis keys: sorting by Exp(1)/mass gives the order in
    // which i.i.d. mass-distributed samples first appear.
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> key(n);
    for (int i = 0; i < n; ++i) {
      double u = unif(rng);
      key[i] = -std::log1p(-u) / space.mass(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return key[a] < key[b]; });
  }
  return order;
}

}  // namespace

NetHierarchy build_nets(const FiniteMetricSpace& space, double alpha, int n_max,
                        NetOrdering ordering, std::uint64_t seed) {
  if (!(alpha > 0.0) || alpha > 0.125 + 1e-15)
    throw BadConfig("alpha must lie in (0, 1/8]");
  if (n_max < 0) throw BadConfig("n_max must be >= 0");
  if (space.diameter() >= 1.0)
    throw DiamNotNormalized("diameter must be < 1 (rescale first)");

  const std::vector<int> order = scan_order(space, ordering, seed);

  NetHierarchy nets;
  nets.alpha = alpha;
  nets.ordering_id = ordering == NetOrdering::Identity
                         ? "identity"
                         : "mass-weighted:" + std::to_string(seed);
  nets.levels.resize(n_max + 1);

  std::vector<int> prev;
  double r = 1.0;
  for (int lvl = 0; lvl <= n_max; ++lvl) {
    std::vector<int>& cur = nets.levels[lvl];
    cur = prev;  // seed with the previous level: nesting by construction
    auto admissible = [&](int p) {
      for (int q : cur)
        if (space.dist(p, q) < r) return false;
      return true;
    };
    for (int p : order)
      if (admissible(p)) cur.push_back(p);
    prev = cur;
    r *= alpha;
  }
  return nets;
}

void check_nets(const FiniteMetricSpace& space, const NetHierarchy& nets) {
  if (nets.levels.empty() || nets.levels[0].size() != 1)
    throw AxiomViolation("#A_0 != 1");
  double r = 1.0;
  for (int lvl = 0; lvl <= nets.n_max(); ++lvl) {
    const auto& a = nets.levels[lvl];
    if (lvl > 0) {
      std::vector<char> present(space.n_points(), 0);
      for (int p : a) present[p] = 1;
      for (int p : nets.levels[lvl - 1])
        if (!present[p])
          throw AxiomViolation("nesting fails at level " + std::to_string(lvl));
    }
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j)
        if (space.dist(a[i], a[j]) < r)
          throw AxiomViolation("separation fails at level " + std::to_string(lvl) + ": points " +
                               std::to_string(a[i]) + "," + std::to_string(a[j]));
    for (int p = 0; p < space.n_points(); ++p) {
      bool covered = false;
      for (int q : a)
        if (space.dist(p, q) < r) {
          covered = true;
          break;
        }
      if (!covered)
        throw AxiomViolation("covering fails at level " + std::to_string(lvl) + ": point " +
                             std::to_string(p));
    }
    r *= nets.alpha;
  }
}

}  // namespace confdim
