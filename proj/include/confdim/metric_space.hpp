#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace confdim {

// Sorted list of point indices into a FiniteMetricSpace.
using PointSet = std::vector<int>;

// Finite metric space with a dense symmetric distance matrix, optional
// per-point mass, a root, an optional anchor (the marked point playing the
// role of y / infinity), and a proximity scale h that defines connectivity
// on the sample: points at distance <= h are linked.
class FiniteMetricSpace {
public:
  FiniteMetricSpace() = default;

  // Validating constructor; throws on any invariant violation.
  // If `check_triangle` the full O(n^3) triangle scan runs (tolerance 1e-9).
  static FiniteMetricSpace build(std::vector<double> dist, int n,
                                 int root = 0,
                                 std::optional<int> anchor = std::nullopt,
                                 std::optional<std::vector<double>> mass = std::nullopt,
                                 std::optional<double> h = std::nullopt,
                                 bool check_triangle = true);

  // Constructor for metrics that are exact by construction (shortest-path
  // quotients, graph metrics): only the cheap O(n^2) checks run.
  static FiniteMetricSpace from_trusted(std::vector<double> dist, int n,
                                        int root = 0,
                                        std::optional<int> anchor = std::nullopt,
                                        std::optional<std::vector<double>> mass = std::nullopt,
                                        std::optional<double> h = std::nullopt);

  int n_points() const { return n_; }
  double dist(int i, int j) const { return dist_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<double>& raw() const { return dist_; }

  bool has_mass() const { return !mass_.empty(); }
  double mass(int i) const { return mass_[i]; }
  const std::vector<double>& masses() const { return mass_; }
  double total_mass() const;

  int root() const { return root_; }
  bool has_anchor() const { return anchor_ >= 0; }
  int anchor() const { return anchor_; }

  double proximity_scale() const { return h_; }
  double diameter() const { return diam_; }

  // Open metric ball {i : dist(c,i) < r}.
  PointSet ball(int c, double r) const;

  // Filled ball: complement of the proximity-graph component (in the
  // complement of the open ball) that contains the anchor.
  PointSet filled_ball(int c, double r, int anchor) const;

  // mass(ball(c, t+eps) \ filled_ball(c, t, anchor)) / eps^2, the discrete
  // proxy for the boundary length of the filled ball at radius t.
  double hull_boundary_area(int c, int anchor, double t, double eps) const;

  // Greedy maximal r-separated set size, scanning points in index order.
  std::size_t covering_number(double r) const;

  // Copy with all distances multiplied by s (masses untouched).
  FiniteMetricSpace scaled(double s) const;
  // Rescaled so that the diameter becomes `target` (default 0.9 < 1).
  FiniteMetricSpace normalized(double target = 0.9) const;

  // Smallest pairwise distance that keeps the proximity graph connected.
  static double connectivity_scale(const std::vector<double>& dist, int n);

  // Adjacency lists of the proximity graph at scale h (i != j, dist <= h).
  const std::vector<std::vector<int>>& proximity_adjacency() const;

private:
  int n_ = 0;
  std::vector<double> dist_;
  std::vector<double> mass_;
  int root_ = 0;
  int anchor_ = -1;
  double h_ = 0.0;
  double diam_ = 0.0;
  mutable std::vector<std::vector<int>> prox_adj_;  // built lazily

  void finalize(std::optional<double> h);
};

// Undirected graph with unit edge lengths; the BFS metric for large samples
// where a dense matrix would not fit.
class UnitGraph {
public:
  explicit UnitGraph(int n) : adj_(n) {}

  void add_edge(int u, int v);
  int n() const { return static_cast<int>(adj_.size()); }
  const std::vector<std::vector<int>>& adjacency() const { return adj_; }

  // BFS distances from src; -1 for unreachable. `cap` >= 0 stops the search
  // beyond that depth (entries further away stay -1).
  std::vector<int> bfs(int src, int cap = -1) const;

  int eccentricity(int src) const;

  // Number of vertices within graph distance < r of src (open ball).
  std::size_t ball_size(int src, double r) const;

  // Greedy maximal r-separated vertex set size, index order.
  std::size_t covering_number(double r) const;

  bool is_bipartite() const;
  bool is_connected() const;

  // Dense metric space from all-pairs BFS (small graphs only).
  FiniteMetricSpace to_metric_space(int root = 0, int anchor = -1) const;

private:
  std::vector<std::vector<int>> adj_;
};

}  // namespace confdim
