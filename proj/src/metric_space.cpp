#include "confdim/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>

#include "confdim/errors.hpp"

namespace confdim {

namespace {
constexpr double kTriangleTol = 1e-9;

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};
}  // namespace

void FiniteMetricSpace::finalize(std::optional<double> h) {
  diam_ = 0.0;
  for (double d : dist_) diam_ = std::max(diam_, d);
  h_ = h ? *h : connectivity_scale(dist_, n_);
  prox_adj_.clear();
}

FiniteMetricSpace FiniteMetricSpace::build(std::vector<double> dist, int n, int root,
                                           std::optional<int> anchor,
                                           std::optional<std::vector<double>> mass,
                                           std::optional<double> h, bool check_triangle) {
  if (n <= 0 || dist.size() != static_cast<std::size_t>(n) * n)
    throw BadConfig("distance matrix size does not match n");
  if (root < 0 || root >= n) throw BadConfig("root index out of range");
  if (anchor && (*anchor < 0 || *anchor >= n)) throw BadConfig("anchor index out of range");

  for (int i = 0; i < n; ++i) {
    if (dist[static_cast<std::size_t>(i) * n + i] != 0.0)
      throw AsymmetricMatrix("nonzero diagonal at " + std::to_string(i));
    for (int j = i + 1; j < n; ++j) {
      double dij = dist[static_cast<std::size_t>(i) * n + j];
      double dji = dist[static_cast<std::size_t>(j) * n + i];
      if (dij < 0.0 || dji < 0.0)
        throw NegativeDistance("negative distance at (" + std::to_string(i) + "," +
                               std::to_string(j) + ")");
      if (dij != dji)
        throw AsymmetricMatrix("dist(" + std::to_string(i) + "," + std::to_string(j) +
                               ") != dist(" + std::to_string(j) + "," + std::to_string(i) + ")");
    }
  }
  if (check_triangle) {
    double worst = 0.0;
    int wi = -1, wj = -1, wk = -1;
    for (int i = 0; i < n; ++i) {
      const double* di = dist.data() + static_cast<std::size_t>(i) * n;
      for (int k = 0; k < n; ++k) {
        const double* dk = dist.data() + static_cast<std::size_t>(k) * n;
        double dik = di[k];
        for (int j = 0; j < n; ++j) {
          double gap = di[j] - (dik + dk[j]);
          if (gap > worst) {
            worst = gap;
            wi = i;
            wj = j;
            wk = k;
          }
        }
      }
    }
    if (worst > kTriangleTol)
      throw TriangleViolation("worst triple (" + std::to_string(wi) + "," + std::to_string(wj) +
                              " via " + std::to_string(wk) + ") violates by " +
                              std::to_string(worst));
  }
  if (mass) {
    if (mass->size() != static_cast<std::size_t>(n)) throw BadConfig("mass size mismatch");
    for (double m : *mass)
      if (!(m > 0.0) || !std::isfinite(m)) throw BadConfig("masses must be positive and finite");
  }

  FiniteMetricSpace s;
  s.n_ = n;
  s.dist_ = std::move(dist);
  s.root_ = root;
  s.anchor_ = anchor ? *anchor : -1;
  if (mass) s.mass_ = std::move(*mass);
  s.finalize(h);
  return s;
}

FiniteMetricSpace FiniteMetricSpace::from_trusted(std::vector<double> dist, int n, int root,
                                                  std::optional<int> anchor,
                                                  std::optional<std::vector<double>> mass,
                                                  std::optional<double> h) {
  return build(std::move(dist), n, root, anchor, std::move(mass), h, /*check_triangle=*/false);
}

double FiniteMetricSpace::total_mass() const {
  return std::accumulate(mass_.begin(), mass_.end(), 0.0);
}

PointSet FiniteMetricSpace::ball(int c, double r) const {
  if (c < 0 || c >= n_) throw BadConfig("ball center out of range");
  if (!(r > 0.0)) throw BadConfig("ball radius must be positive");
  PointSet out;
  const double* dc = dist_.data() + static_cast<std::size_t>(c) * n_;
  for (int i = 0; i < n_; ++i)
    if (dc[i] < r) out.push_back(i);
  return out;
}

const std::vector<std::vector<int>>& FiniteMetricSpace::proximity_adjacency() const {
  if (prox_adj_.empty() && n_ > 0) {
    prox_adj_.assign(n_, {});
    for (int i = 0; i < n_; ++i) {
      const double* di = dist_.data() + static_cast<std::size_t>(i) * n_;
      for (int j = 0; j < n_; ++j)
        if (j != i && di[j] <= h_) prox_adj_[i].push_back(j);
    }
  }
  return prox_adj_;
}

PointSet FiniteMetricSpace::filled_ball(int c, double r, int anchor) const {
  if (anchor < 0 || anchor >= n_) throw BadConfig("anchor out of range");
  PointSet b = ball(c, r);
  std::vector<char> in_ball(n_, 0);
  for (int i : b) in_ball[i] = 1;
  if (in_ball[anchor]) throw AnchorInsideBall("anchor lies inside the ball");

  // Flood the complement component containing the anchor; everything else
  // (ball plus the holes) is the filled ball.
  const auto& adj = proximity_adjacency();
  std::vector<char> reached(n_, 0);
  std::deque<int> queue{anchor};
  reached[anchor] = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[u])
      if (!reached[v] && !in_ball[v]) {
        reached[v] = 1;
        queue.push_back(v);
      }
  }
  PointSet out;
  for (int i = 0; i < n_; ++i)
    if (in_ball[i] || !reached[i]) out.push_back(i);
  return out;
}

double FiniteMetricSpace::hull_boundary_area(int c, int anchor, double t, double eps) const {
  if (!(t > 0.0) || !(eps > 0.0)) throw BadConfig("t and eps must be positive");
  if (!has_mass()) throw MissingMass("hull_boundary_area needs a mass vector");
  if (dist(c, anchor) < t + eps) throw AnchorInsideBall("anchor inside the t+eps ball");
  PointSet outer = ball(c, t + eps);
  PointSet filled = filled_ball(c, t, anchor);
  std::vector<char> in_filled(n_, 0);
  for (int i : filled) in_filled[i] = 1;
  double m = 0.0;
  for (int i : outer)
    if (!in_filled[i]) m += mass_[i];
  return m / (eps * eps);
}

std::size_t FiniteMetricSpace::covering_number(double r) const {
  if (!(r > 0.0)) throw BadConfig("radius must be positive");
  std::vector<int> chosen;
  for (int i = 0; i < n_; ++i) {
    const double* di = dist_.data() + static_cast<std::size_t>(i) * n_;
    bool ok = true;
    for (int c : chosen)
      if (di[c] < r) {
        ok = false;
        break;
      }
    if (ok) chosen.push_back(i);
  }
  return chosen.size();
}

FiniteMetricSpace FiniteMetricSpace::scaled(double s) const {
  FiniteMetricSpace out = *this;
  for (double& d : out.dist_) d *= s;
  out.h_ *= s;
  out.diam_ *= s;
  out.prox_adj_.clear();
  return out;
}

FiniteMetricSpace FiniteMetricSpace::normalized(double target) const {
  if (diam_ <= 0.0) return *this;
  return scaled(target / diam_);
}

double FiniteMetricSpace::connectivity_scale(const std::vector<double>& dist, int n) {
  if (n <= 1) return 0.0;
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) vals.push_back(dist[static_cast<std::size_t>(i) * n + j]);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());

  auto connected_at = [&](double h) {
    UnionFind uf(n);
    int comps = n;
    for (int i = 0; i < n && comps > 1; ++i)
      for (int j = i + 1; j < n; ++j)
        if (dist[static_cast<std::size_t>(i) * n + j] <= h && uf.unite(i, j)) --comps;
    return comps == 1;
  };

  std::size_t lo = 0, hi = vals.size() - 1;
  if (!connected_at(vals[hi])) return vals[hi];  // degenerate: infinite distances absent anyway
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (connected_at(vals[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return vals[lo];
}

void UnitGraph::add_edge(int u, int v) {
  adj_[u].push_back(v);
  adj_[v].push_back(u);
}

std::vector<int> UnitGraph::bfs(int src, int cap) const {
  std::vector<int> d(adj_.size(), -1);
  std::deque<int> queue{src};
  d[src] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (cap >= 0 && d[u] >= cap) continue;
    for (int v : adj_[u])
      if (d[v] < 0) {
        d[v] = d[u] + 1;
        queue.push_back(v);
      }
  }
  return d;
}

int UnitGraph::eccentricity(int src) const {
  auto d = bfs(src);
  int e = 0;
  for (int x : d) e = std::max(e, x);
  return e;
}

std::size_t UnitGraph::ball_size(int src, double r) const {
  // dist < r with integer distances: depths 0 .. ceil(r)-1
  int cap = static_cast<int>(std::ceil(r)) - 1;
  auto d = bfs(src, std::max(cap, 0));
  std::size_t c = 0;
  for (int x : d)
    if (x >= 0 && x < r) ++c;
  return c;
}

std::size_t UnitGraph::covering_number(double r) const {
  const int n = static_cast<int>(adj_.size());
  std::vector<char> blocked(n, 0);  // within distance < r of a chosen vertex
  std::size_t count = 0;
  int cap = std::max(static_cast<int>(std::ceil(r)) - 1, 0);
  std::deque<int> queue;
  std::vector<int> depth(n, -1);
  for (int v = 0; v < n; ++v) {
    if (blocked[v]) continue;
    ++count;
    // mark everything with dist < r as blocked
    queue.clear();
    queue.push_back(v);
    depth[v] = 0;
    std::vector<int> touched{v};
    blocked[v] = 1;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (depth[u] >= cap) continue;
      for (int w : adj_[u])
        if (depth[w] < 0) {
          depth[w] = depth[u] + 1;
          blocked[w] = 1;
          touched.push_back(w);
          queue.push_back(w);
        }
    }
    for (int u : touched) depth[u] = -1;
  }
  return count;
}

bool UnitGraph::is_bipartite() const {
  const int n = static_cast<int>(adj_.size());
  std::vector<int> color(n, -1);
  std::deque<int> queue;
  for (int s = 0; s < n; ++s) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    queue.push_back(s);
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj_[u]) {
        if (color[v] < 0) {
          color[v] = color[u] ^ 1;
          queue.push_back(v);
        } else if (color[v] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

bool UnitGraph::is_connected() const {
  if (adj_.empty()) return true;
  auto d = bfs(0);
  for (int x : d)
    if (x < 0) return false;
  return true;
}

FiniteMetricSpace UnitGraph::to_metric_space(int root, int anchor) const {
  const int n = static_cast<int>(adj_.size());
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (int s = 0; s < n; ++s) {
    auto d = bfs(s);
    for (int t = 0; t < n; ++t) {
      if (d[t] < 0) throw BadConfig("graph is not connected");
      m[static_cast<std::size_t>(s) * n + t] = d[t];
    }
  }
  return FiniteMetricSpace::from_trusted(
      std::move(m), n, root, anchor >= 0 ? std::optional<int>(anchor) : std::nullopt);
}

}  // namespace confdim
