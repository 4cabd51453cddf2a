#include "confdim/filling.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "confdim/errors.hpp"
#include "confdim/rng.hpp"

namespace confdim {

std::pair<int, int> FillingGraph::level_id(int flat) const {
  int level = 0;
  while (offset_[level + 1] <= flat) ++level;
  return {level, flat - offset_[level]};
}

int FillingGraph::n_edges() const {
  int eh = 0, ev = 0;
  for (const auto& h : horiz_) eh += static_cast<int>(h.size());
  for (const auto& u : up_) ev += static_cast<int>(u.size());
  return eh / 2 + ev;  // horizontal lists hold both directions
}

std::vector<int> FillingGraph::distances_from(int u_flat) const {
  std::vector<int> d(n_vertices(), -1);
  std::deque<int> queue{u_flat};
  d[u_flat] = 0;
  while (!queue.empty()) {
    int f = queue.front();
    queue.pop_front();
    auto [lvl, id] = level_id(f);
    auto relax = [&](int g) {
      if (d[g] < 0) {
        d[g] = d[f] + 1;
        queue.push_back(g);
      }
    };
    for (int j : horiz_[f]) relax(flat(lvl, j));
    for (int j : up_[f]) relax(flat(lvl + 1, j));
    for (int j : down_[f]) relax(flat(lvl - 1, j));
  }
  return d;
}

int FillingGraph::graph_distance(int u_flat, int v_flat) const {
  if (u_flat == v_flat) return 0;
  auto d = distances_from(u_flat);
  return d[v_flat];
}

double FillingGraph::gromov_product(int u_flat, int v_flat) const {
  if (root_dist_.empty()) root_dist_ = distances_from(flat(0, 0));
  return 0.5 * (root_dist_[u_flat] + root_dist_[v_flat] - graph_distance(u_flat, v_flat));
}

FillingGraph build_filling(const FiniteMetricSpace& space, const NetHierarchy& nets) {
  if (space.diameter() >= 1.0) throw DiamNotNormalized("diameter must be < 1");
  FillingGraph g;
  g.space_ = &space;
  g.nets_ = nets;
  const int L = static_cast<int>(nets.levels.size());
  g.offset_.assign(L + 1, 0);
  for (int n = 0; n < L; ++n) {
    if (nets.levels[n].empty()) throw EmptyLevel("net level " + std::to_string(n) + " is empty");
    g.offset_[n + 1] = g.offset_[n] + static_cast<int>(nets.levels[n].size());
  }
  g.horiz_.assign(g.offset_[L], {});
  g.up_.assign(g.offset_[L], {});
  g.down_.assign(g.offset_[L], {});

  double rn = 1.0;  // alpha^n
  for (int n = 0; n < L; ++n) {
    const auto& an = nets.levels[n];
    const int sz = static_cast<int>(an.size());
    const double horiz_thresh = 8.0 * rn;
    for (int i = 0; i < sz; ++i)
      for (int j = i + 1; j < sz; ++j)
        if (space.dist(an[i], an[j]) < horiz_thresh) {
          g.horiz_[g.flat(n, i)].push_back(j);
          g.horiz_[g.flat(n, j)].push_back(i);
        }
    if (n + 1 < L) {
      const auto& bn = nets.levels[n + 1];
      const double vert_thresh = rn + rn * nets.alpha;
      for (int i = 0; i < sz; ++i)
        for (int j = 0; j < static_cast<int>(bn.size()); ++j)
          if (space.dist(an[i], bn[j]) < vert_thresh) {
            g.up_[g.flat(n, i)].push_back(j);
            g.down_[g.flat(n + 1, j)].push_back(i);
          }
    }
    rn *= nets.alpha;
  }

  // Covering forces a vertical neighbor for every non-root vertex; the graph
  // is then connected through the root.
  for (int n = 1; n < L; ++n)
    for (int i = 0; i < g.level_size(n); ++i)
      if (g.down_[g.flat(n, i)].empty())
        throw AxiomViolation("vertex (" + std::to_string(n) + "," + std::to_string(i) +
                             ") has no vertical parent edge");
  return g;
}

void FillingGraph::check_edge_rules() const {
  double rn = 1.0;
  for (int n = 0; n < n_levels(); ++n) {
    const auto& an = nets_.levels[n];
    for (int i = 0; i < static_cast<int>(an.size()); ++i) {
      std::vector<char> adj(an.size(), 0);
      for (int j : horiz_[flat(n, i)]) adj[j] = 1;
      for (int j = 0; j < static_cast<int>(an.size()); ++j) {
        bool want = j != i && space_->dist(an[i], an[j]) < 8.0 * rn;
        if (want != static_cast<bool>(adj[j]))
          throw AxiomViolation("horizontal edge rule violated at level " + std::to_string(n));
      }
      if (n + 1 < n_levels()) {
        const auto& bn = nets_.levels[n + 1];
        std::vector<char> vadj(bn.size(), 0);
        for (int j : up_[flat(n, i)]) vadj[j] = 1;
        for (int j = 0; j < static_cast<int>(bn.size()); ++j) {
          bool want = space_->dist(an[i], bn[j]) < rn + rn * nets_.alpha;
          if (want != static_cast<bool>(vadj[j]))
            throw AxiomViolation("vertical edge rule violated at level " + std::to_string(n));
        }
      }
    }
    rn *= nets_.alpha;
  }
}

GromovReport estimate_delta(const FillingGraph& g, int n_quadruples, std::uint64_t seed,
                            int exhaustive_cap) {
  if (n_quadruples < 1) throw BadConfig("need at least one sample");
  GromovReport rep;
  const int V = g.n_vertices();
  // Cache distance rows lazily.
  std::vector<std::vector<int>> rows(V);
  auto dist = [&](int a, int b) {
    if (rows[a].empty()) rows[a] = g.distances_from(a);
    return rows[a][b];
  };
  auto product = [&](int a, int b) {
    return 0.5 * (dist(g.flat(0, 0), a) + dist(g.flat(0, 0), b) - dist(a, b));
  };
  double delta = 0.0;
  if (V <= exhaustive_cap) {
    for (int x = 0; x < V; ++x)
      for (int y = x; y < V; ++y)
        for (int z = 0; z < V; ++z)
          delta = std::max(delta, std::min(product(x, z), product(y, z)) - product(x, y));
    rep.n_samples = V * V * V;
    rep.note = "exhaustive";
  } else {
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<int> pick(0, V - 1);
    for (int k = 0; k < n_quadruples; ++k) {
      int x = pick(rng), y = pick(rng), z = pick(rng);
      delta = std::max(delta, std::min(product(x, z), product(y, z)) - product(x, y));
    }
    rep.n_samples = n_quadruples;
    rep.note = "sampled";
  }
  rep.delta = std::max(delta, 0.0);
  return rep;
}

GromovReport sandwich_constants(const FillingGraph& g, int n_pairs, std::uint64_t seed) {
  GromovReport rep;
  const int V = g.n_vertices();
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> pick(0, V - 1);
  auto root_d = g.distances_from(g.flat(0, 0));
  double c = 1.0;
  for (int k = 0; k < n_pairs; ++k) {
    int u = pick(rng), v = pick(rng);
    auto [m, i] = g.level_id(u);
    auto [n, j] = g.level_id(v);
    double d = g.space().dist(g.point_of(m, i), g.point_of(n, j));
    double lhs = d + std::pow(g.alpha(), m) + std::pow(g.alpha(), n);
    double du = root_d[u], dv = root_d[v];
    double product = 0.5 * (du + dv - g.graph_distance(u, v));
    double rhs = std::pow(g.alpha(), product);
    double ratio = lhs / rhs;
    c = std::max({c, ratio, 1.0 / ratio});
  }
  rep.sandwich_c = c;
  rep.n_samples = n_pairs;
  return rep;
}

PathConditionReport check_path_condition(const FillingGraph& g, int L) {
  if (L < 2) throw BadConfig("L must be >= 2");
  PathConditionReport rep;
  for (int n = 1; n < g.n_levels(); ++n) {
    const int sz = g.level_size(n);
    for (int i = 0; i < sz; ++i) {
      // horizontal BFS to depth L from (n, i)
      std::vector<int> hd(sz, -1);
      std::deque<int> queue{i};
      hd[i] = 0;
      while (!queue.empty()) {
        int a = queue.front();
        queue.pop_front();
        if (hd[a] >= L) continue;
        for (int b : g.horizontal(n, a))
          if (hd[b] < 0) {
            hd[b] = hd[a] + 1;
            queue.push_back(b);
          }
      }
      const auto& pi = g.vertical_down(n, i);
      for (int j = 0; j < sz; ++j) {
        if (hd[j] < 0) continue;
        ++rep.checked_pairs;
        // every parent of i must be equal or adjacent to every parent of j
        for (int a : pi)
          for (int b : g.vertical_down(n, j)) {
            if (a == b) continue;
            const auto& ha = g.horizontal(n - 1, a);
            if (std::find(ha.begin(), ha.end(), b) == ha.end()) {
              int viol = std::max(hd[j], 2);
              if (!rep.pass) {
                rep.min_violating_length = std::min(rep.min_violating_length, viol);
              } else {
                rep.pass = false;
                rep.min_violating_length = viol;
                rep.witness = "level " + std::to_string(n) + ": (" + std::to_string(i) + "," +
                              std::to_string(j) + ") parents (" + std::to_string(a) + "," +
                              std::to_string(b) + ")";
              }
            }
          }
      }
    }
  }
  return rep;
}

}  // namespace confdim
