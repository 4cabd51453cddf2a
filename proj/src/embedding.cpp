#include "confdim/embedding.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "confdim/errors.hpp"

namespace confdim {

namespace {

std::vector<int> face_walk(const QuadMap& q, int f) {
  std::vector<int> verts;
  int h0 = q.face_halfedge(f);
  int h = h0;
  do {
    verts.push_back(q.tail(h));
    h = q.next_in_face(h);
  } while (h != h0);
  return verts;
}

double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  double vx = b.x - a.x, vy = b.y - a.y;
  double wx = p.x - a.x, wy = p.y - a.y;
  double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
  double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
  return std::hypot(dx, dy);
}

}  // namespace

double PlanarEmbedding::harmonic_residual() const {
  std::vector<char> fixed(pos.size(), 0);
  for (int v : boundary) fixed[v] = 1;
  double worst = 0.0;
  for (int v = 0; v < static_cast<int>(pos.size()); ++v) {
    if (fixed[v] || solve_nbr[v].empty()) continue;
    double sx = 0.0, sy = 0.0;
    for (int u : solve_nbr[v]) {
      sx += pos[u].x;
      sy += pos[u].y;
    }
    double deg = static_cast<double>(solve_nbr[v].size());
    worst = std::max(worst, std::hypot(pos[v].x - sx / deg, pos[v].y - sy / deg));
  }
  return worst;
}

PlanarEmbedding tutte_embed(const QuadMap& map, int outer_face) {
  const int n = map.n_vertices();

  // Pick an outer face whose walk visits four distinct vertices.
  auto usable = [&](int f) {
    auto w = face_walk(map, f);
    std::set<int> s(w.begin(), w.end());
    return s.size() == w.size();
  };
  if (outer_face < 0) {
    outer_face = map.face_of(map.root_halfedge());
    if (!usable(outer_face)) {
      outer_face = -1;
      for (int f = 0; f < map.n_faces(); ++f)
        if (usable(f)) {
          outer_face = f;
          break;
        }
      if (outer_face < 0) throw DegenerateFace("no face with four distinct vertices");
    }
  } else if (!usable(outer_face)) {
    throw DegenerateFace("requested outer face repeats a vertex");
  }

  std::vector<int> bnd = face_walk(map, outer_face);

  // Adjacency with set semantics, stiffened by one diagonal per quad face
  // (skipping diagonals that would be loops).
  std::vector<std::set<int>> nbr(n);
  for (int e = 0; e < map.n_edges(); ++e) {
    int u = map.tail(2 * e), v = map.tail(2 * e + 1);
    if (u != v) {
      nbr[u].insert(v);
      nbr[v].insert(u);
    }
  }
  for (int f = 0; f < map.n_faces(); ++f) {
    if (f == outer_face) continue;
    auto w = face_walk(map, f);
    if (w[0] != w[2])
      nbr[w[0]].insert(w[2]), nbr[w[2]].insert(w[0]);
    else if (w[1] != w[3])
      nbr[w[1]].insert(w[3]), nbr[w[3]].insert(w[1]);
  }

  std::vector<char> fixed(n, 0);
  PlanarEmbedding emb;
  emb.map = &map;
  emb.pos.assign(n, {});
  emb.outer_face = outer_face;
  emb.boundary = bnd;
  emb.solve_nbr.assign(n, {});
  for (int v = 0; v < n; ++v) emb.solve_nbr[v].assign(nbr[v].begin(), nbr[v].end());
  const Vec2 square[4] = {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    fixed[bnd[k]] = 1;
    emb.pos[bnd[k]] = square[k % 4];
  }

  std::vector<int> free_id(n, -1);
  int m = 0;
  for (int v = 0; v < n; ++v)
    if (!fixed[v]) free_id[v] = m++;
  if (m == 0) return emb;

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd bx = Eigen::VectorXd::Zero(m), by = Eigen::VectorXd::Zero(m);
  for (int v = 0; v < n; ++v) {
    if (fixed[v]) continue;
    int i = free_id[v];
    trips.emplace_back(i, i, static_cast<double>(nbr[v].size()));
    for (int u : nbr[v]) {
      if (fixed[u]) {
        bx(i) += emb.pos[u].x;
        by(i) += emb.pos[u].y;
      } else {
        trips.emplace_back(i, free_id[u], -1.0);
      }
    }
  }
  Eigen::SparseMatrix<double> L(m, m);
  L.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
  if (solver.info() != Eigen::Success) throw SolverDiverged("Tutte factorization failed");
  Eigen::VectorXd xs = solver.solve(bx), ys = solver.solve(by);
  if (solver.info() != Eigen::Success) throw SolverDiverged("Tutte solve failed");
  for (int v = 0; v < n; ++v)
    if (!fixed[v]) emb.pos[v] = {xs(free_id[v]), ys(free_id[v])};

  if (emb.harmonic_residual() > 1e-8) throw SolverDiverged("harmonic residual above 1e-8");
  return emb;
}

ShapeStats shape_stats(const PlanarEmbedding& emb, const PointSet& points, int center) {
  if (points.empty()) throw EmptySet("shape_stats needs a nonempty point set");
  const QuadMap& q = *emb.map;
  ShapeStats st;
  Vec2 c = emb.pos[center];
  for (std::size_t a = 0; a < points.size(); ++a) {
    Vec2 pa = emb.pos[points[a]];
    st.outradius = std::max(st.outradius, std::hypot(pa.x - c.x, pa.y - c.y));
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      Vec2 pb = emb.pos[points[b]];
      st.euclid_diam = std::max(st.euclid_diam, std::hypot(pa.x - pb.x, pa.y - pb.y));
    }
  }

  // Faces incident to the set; the inradius is the distance from the center
  // to the boundary of their union (edges with exactly one incident face in
  // the union, or on the outer face).
  std::vector<char> in_set(q.n_vertices(), 0);
  for (int p : points) in_set[p] = 1;
  std::vector<char> face_in(q.n_faces(), 0);
  for (int p : points)
    for (int h : q.halfedges_out(p)) face_in[q.face_of(h)] = 1;
  if (emb.outer_face >= 0) face_in[emb.outer_face] = 0;

  bool center_covered = false;
  for (int h : q.halfedges_out(center))
    if (face_in[q.face_of(h)]) center_covered = true;
  if (!center_covered) return st;  // center outside the union: inradius 0

  double inr = std::numeric_limits<double>::infinity();
  for (int p : points)
    for (int h0 : q.halfedges_out(p)) {
      int f = q.face_of(h0);
      if (!face_in[f]) continue;
      int h = h0;
      do {
        int g = QuadMap::twin(h);
        if (!face_in[q.face_of(g)])
          inr = std::min(inr, dist_point_segment(c, emb.pos[q.tail(h)], emb.pos[q.head(h)]));
        h = q.next_in_face(h);
      } while (h != h0);
    }
  if (std::isfinite(inr)) st.inradius = inr;
  return st;
}

int count_edge_crossings(const PlanarEmbedding& emb) {
  const QuadMap& q = *emb.map;
  // Proper transversal crossings only. Blocks hanging at separation pairs
  // collapse onto segments in the harmonic drawing; their overlaps are
  // collinear up to solver roundoff, so the orientation predicate carries a
  // relative tolerance.
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
    double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    double scale = std::hypot(b.x - a.x, b.y - a.y) * std::hypot(c.x - a.x, c.y - a.y);
    if (std::abs(v) <= 1e-9 * scale) return 0;
    return v > 0 ? 1 : -1;
  };
  int crossings = 0;
  const int E = q.n_edges();
  for (int e = 0; e < E; ++e) {
    int a1 = q.tail(2 * e), a2 = q.tail(2 * e + 1);
    for (int f = e + 1; f < E; ++f) {
      int b1 = q.tail(2 * f), b2 = q.tail(2 * f + 1);
      if (a1 == b1 || a1 == b2 || a2 == b1 || a2 == b2) continue;  // shared endpoint
      Vec2 p1 = emb.pos[a1], p2 = emb.pos[a2], p3 = emb.pos[b1], p4 = emb.pos[b2];
      if (orient(p1, p2, p3) * orient(p1, p2, p4) < 0 &&
          orient(p3, p4, p1) * orient(p3, p4, p2) < 0)
        ++crossings;
    }
  }
  return crossings;
}

}  // namespace confdim
