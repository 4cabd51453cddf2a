#pragma once

#include <utility>
#include <vector>

#include "confdim/metric_space.hpp"
#include "confdim/quadmap.hpp"

namespace confdim {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

// Straight-line drawing of a QuadMap: positions per vertex, outer face fixed
// on a convex polygon, interior vertices harmonic (mean of neighbors).
struct PlanarEmbedding {
  const QuadMap* map = nullptr;
  std::vector<Vec2> pos;
  int outer_face = -1;
  std::vector<int> boundary;                // outer face vertices, convex position
  std::vector<std::vector<int>> solve_nbr;  // adjacency of the solved system

  double harmonic_residual() const;  // max deviation from neighbor mean
};

// Harmonic embedding. The faces are triangulated (one non-degenerate diagonal
// per quad) to stiffen the solve; the boundary is the outer face walk placed
// on a square. Throws DegenerateFace if no usable outer face exists and
// SolverDiverged if the sparse solve fails.
PlanarEmbedding tutte_embed(const QuadMap& map, int outer_face = -1);

// (euclid_diam, inradius, outradius) of a point set around a center vertex.
// The inradius is measured against the union of faces incident to the set:
// the largest disk around the center that stays inside that union.
struct ShapeStats {
  double euclid_diam = 0.0;
  double inradius = 0.0;
  double outradius = 0.0;
};
ShapeStats shape_stats(const PlanarEmbedding& emb, const PointSet& points, int center);

// Brute-force proper-crossing count over the drawn edges (test oracle size).
int count_edge_crossings(const PlanarEmbedding& emb);

}  // namespace confdim
