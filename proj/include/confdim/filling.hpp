#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "confdim/metric_space.hpp"
#include "confdim/nets.hpp"

namespace confdim {

// Leveled graph over a net hierarchy. Vertices are (level, id) with id an
// index into nets.levels[level]; the root o is the single level-0 vertex.
// Horizontal edge at level n: the 4*alpha^n balls intersect (dist < 8 alpha^n).
// Vertical edge n <-> n+1: the alpha^n and alpha^{n+1} balls intersect.
class FillingGraph {
public:
  const FiniteMetricSpace& space() const { return *space_; }
  const NetHierarchy& nets() const { return nets_; }
  double alpha() const { return nets_.alpha; }
  int n_levels() const { return static_cast<int>(nets_.levels.size()); }
  int level_size(int n) const { return static_cast<int>(nets_.levels[n].size()); }
  int point_of(int level, int id) const { return nets_.levels[level][id]; }

  // Flat vertex indexing (level-major).
  int flat(int level, int id) const { return offset_[level] + id; }
  int n_vertices() const { return offset_.back(); }
  std::pair<int, int> level_id(int flat) const;

  const std::vector<int>& horizontal(int level, int id) const { return horiz_[flat(level, id)]; }
  const std::vector<int>& vertical_up(int level, int id) const { return up_[flat(level, id)]; }
  const std::vector<int>& vertical_down(int level, int id) const { return down_[flat(level, id)]; }

  int n_edges() const;

  // Unweighted hop distance between flat vertices.
  int graph_distance(int u_flat, int v_flat) const;
  std::vector<int> distances_from(int u_flat) const;

  double gromov_product(int u_flat, int v_flat) const;

  friend FillingGraph build_filling(const FiniteMetricSpace& space, const NetHierarchy& nets);

  // Re-verifies the edge rules by brute force; throws AxiomViolation.
  void check_edge_rules() const;

private:
  const FiniteMetricSpace* space_ = nullptr;
  NetHierarchy nets_;
  std::vector<int> offset_;
  std::vector<std::vector<int>> horiz_;  // flat -> ids at same level
  std::vector<std::vector<int>> up_;     // flat -> ids at level+1
  std::vector<std::vector<int>> down_;   // flat -> ids at level-1
  mutable std::vector<int> root_dist_;   // cached BFS from the root
};

FillingGraph build_filling(const FiniteMetricSpace& space, const NetHierarchy& nets);

struct GromovReport {
  double delta = 0.0;
  double sandwich_c = 1.0;
  int n_samples = 0;
  std::string note;
};

// Max over sampled triples (base = root) of (x,z) ^ (y,z) - (x,y), floored
// at zero. Exhaustive when the graph has at most `exhaustive_cap` vertices.
GromovReport estimate_delta(const FillingGraph& g, int n_quadruples, std::uint64_t seed,
                            int exhaustive_cap = 200);

// Smallest C with C^{-1} a^{(u,v)} <= D(x,y) + a^m + a^n <= C a^{(u,v)} over
// sampled vertex pairs.
GromovReport sandwich_constants(const FillingGraph& g, int n_pairs, std::uint64_t seed);

struct PathConditionReport {
  bool pass = true;
  int min_violating_length = -1;  // smallest L with a violation, -1 if none
  int checked_pairs = 0;
  std::string witness;
};

// Endpoint-parent adjacency along horizontal paths of length <= L: for every
// pair at horizontal distance <= L, all their vertical parents one level down
// must be equal or adjacent.
PathConditionReport check_path_condition(const FillingGraph& g, int L);

}  // namespace confdim
