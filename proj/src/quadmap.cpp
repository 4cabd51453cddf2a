#include "confdim/quadmap.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "json.hpp"

#include "confdim/errors.hpp"
#include "confdim/rng.hpp"

namespace confdim {

std::vector<int> QuadMap::halfedges_out(int v) const {
  std::vector<int> out;
  int h0 = first_out_[v];
  if (h0 < 0) return out;
  int h = h0;
  do {
    out.push_back(h);
    h = rot_next_[h];
  } while (h != h0);
  return out;
}

UnitGraph QuadMap::skeleton() const {
  UnitGraph g(n_vertices_);
  for (int e = 0; e < n_edges(); ++e) g.add_edge(tail_[2 * e], tail_[2 * e + 1]);
  return g;
}

void QuadMap::trace_faces() {
  const int nh = static_cast<int>(tail_.size());
  face_of_.assign(nh, -1);
  face_degree_.clear();
  face_halfedge_.clear();
  for (int h0 = 0; h0 < nh; ++h0) {
    if (face_of_[h0] >= 0) continue;
    int f = static_cast<int>(face_degree_.size());
    int deg = 0;
    int h = h0;
    do {
      if (face_of_[h] >= 0) throw AxiomViolation("face trace collided; rotation is inconsistent");
      face_of_[h] = f;
      h = next_in_face(h);
      ++deg;
      if (deg > nh) throw AxiomViolation("face trace does not close");
    } while (h != h0);
    face_degree_.push_back(deg);
    face_halfedge_.push_back(h0);
  }
  n_faces_ = static_cast<int>(face_degree_.size());
}

void QuadMap::compute_dist() {
  dist_root_.assign(n_vertices_, -1);
  std::deque<int> queue{root_vertex()};
  dist_root_[root_vertex()] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int h : halfedges_out(u)) {
      int v = head(h);
      if (dist_root_[v] < 0) {
        dist_root_[v] = dist_root_[u] + 1;
        queue.push_back(v);
      }
    }
  }
}

QuadMap QuadMap::assemble(int n_vertices, std::vector<int> tail, std::vector<int> rot_next,
                          int root_halfedge, int star_vertex, std::vector<int> labels,
                          bool require_quad) {
  QuadMap q;
  q.n_vertices_ = n_vertices;
  q.tail_ = std::move(tail);
  q.rot_next_ = std::move(rot_next);
  q.root_halfedge_ = root_halfedge;
  q.star_vertex_ = star_vertex;
  q.labels_ = std::move(labels);

  const int nh = static_cast<int>(q.tail_.size());
  q.first_out_.assign(n_vertices, -1);
  for (int h = 0; h < nh; ++h)
    if (q.first_out_[q.tail_[h]] < 0) q.first_out_[q.tail_[h]] = h;

  q.trace_faces();
  if (require_quad) {
    // Structural checks: E = 2F, V = F + 2, all faces degree 4.
    const int E = nh / 2;
    if (E != 2 * q.n_faces_ || n_vertices != q.n_faces_ + 2)
      throw AxiomViolation("Euler relation violated: V=" + std::to_string(n_vertices) +
                           " E=" + std::to_string(E) + " F=" + std::to_string(q.n_faces_));
    for (int f = 0; f < q.n_faces_; ++f)
      if (q.face_degree_[f] != 4)
        throw AxiomViolation("face " + std::to_string(f) + " has degree " +
                             std::to_string(q.face_degree_[f]));
  }
  q.compute_dist();
  return q;
}

namespace {

// Uniform Dyck path of length 2F by the cycle lemma: shuffle F up-steps and
// F+1 down-steps, rotate to start right after the first position attaining
// the minimal prefix sum, drop the final down-step.
std::vector<int> uniform_dyck(int F, Rng& rng) {
  std::vector<int> steps(2 * F + 1, -1);
  for (int i = 0; i < F; ++i) steps[i] = 1;
  for (int i = 2 * F; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(steps[i], steps[pick(rng)]);
  }
  int sum = 0, best = 0, best_pos = -1;
  for (int i = 0; i < 2 * F + 1; ++i) {
    sum += steps[i];
    if (sum < best) {
      best = sum;
      best_pos = i;
    }
  }
  std::vector<int> dyck(2 * F);
  for (int i = 0; i < 2 * F; ++i) dyck[i] = steps[(best_pos + 1 + i) % (2 * F + 1)];
  return dyck;
}

}  // namespace

QuadMap sample_quadrangulation(int n_faces, std::uint64_t seed) {
  if (n_faces < 1) throw BadConfig("need at least one face");
  const int F = n_faces;
  Rng rng = make_rng(seed);

  std::vector<int> dyck = uniform_dyck(F, rng);

  // Contour walk of the plane tree: corner i sits at vertex cv[i].
  const int nc = 2 * F;  // number of corners
  std::vector<int> cv(nc);
  std::vector<int> parent{-1};
  std::vector<int> vlab{0};
  std::uniform_int_distribution<int> lab_step(-1, 1);
  {
    std::vector<int> stack{0};
    int n_vert = 1;
    for (int i = 0; i < nc; ++i) {
      cv[i] = stack.back();
      if (dyck[i] > 0) {
        parent.push_back(stack.back());
        vlab.push_back(vlab[stack.back()] + lab_step(rng));
        stack.push_back(n_vert++);
      } else {
        stack.pop_back();
      }
    }
  }
  const int n_tree = F + 1;
  const int star = n_tree;  // v_*
  int min_lab = *std::min_element(vlab.begin(), vlab.end());

  // Successor of corner i: first corner after i (cyclically) with label
  // lab(i) - 1; corners at the minimal label point to v_*.
  std::vector<int> clab(nc);
  for (int i = 0; i < nc; ++i) clab[i] = vlab[cv[i]];
  std::vector<std::vector<int>> by_label;
  {
    int max_lab = *std::max_element(clab.begin(), clab.end());
    by_label.assign(max_lab - min_lab + 1, {});
    for (int i = 0; i < nc; ++i) by_label[clab[i] - min_lab].push_back(i);
  }
  std::vector<int> succ(nc, -1);  // successor corner, or -1 for v_*
  for (int i = 0; i < nc; ++i) {
    int want = clab[i] - 1 - min_lab;
    if (want < 0) continue;
    const auto& pos = by_label[want];
    auto it = std::upper_bound(pos.begin(), pos.end(), i);
    succ[i] = it != pos.end() ? *it : pos.front();
  }

  // Arc e goes from corner e to corner succ[e] (or to v_*). Build the ccw
  // rotation: around an ordinary vertex, bundles follow the contour order of
  // its corners; inside the bundle of corner c the incoming arc ends come
  // first, sources sorted nearest-behind first, then the outgoing arc end.
  // Around v_* the arc ends appear in reverse contour order of their sources.
  std::vector<int> tail(2 * nc);
  for (int e = 0; e < nc; ++e) {
    tail[2 * e] = cv[e];
    tail[2 * e + 1] = succ[e] >= 0 ? cv[succ[e]] : star;
  }

  std::vector<std::vector<int>> incoming(nc);  // corner -> sources, filled in scan order
  for (int j = 0; j < nc; ++j)
    if (succ[j] >= 0) incoming[succ[j]].push_back(j);

  std::vector<std::vector<int>> corners_of(n_tree);
  for (int i = 0; i < nc; ++i) corners_of[cv[i]].push_back(i);

  std::vector<int> rot_next(2 * nc, -1);
  auto link_cycle = [&](const std::vector<int>& cycle) {
    for (std::size_t k = 0; k < cycle.size(); ++k)
      rot_next[cycle[k]] = cycle[(k + 1) % cycle.size()];
  };
  for (int v = 0; v < n_tree; ++v) {
    std::vector<int> cycle;
    for (int c : corners_of[v]) {
      std::vector<int> srcs = incoming[c];
      std::sort(srcs.begin(), srcs.end(), [&](int a, int b) {
        int da = (c - a + nc) % nc, db = (c - b + nc) % nc;
        return da < db;  // nearest behind first
      });
      for (int j : srcs) cycle.push_back(2 * j + 1);
      cycle.push_back(2 * c);
    }
    link_cycle(cycle);
  }
  {
    std::vector<int> cycle;
    for (int i = nc - 1; i >= 0; --i)
      if (succ[i] < 0) cycle.push_back(2 * i + 1);
    link_cycle(cycle);
  }

  std::vector<int> labels(vlab);
  labels.push_back(min_lab - 1);
  return QuadMap::assemble(n_tree + 1, std::move(tail), std::move(rot_next),
                           /*root_halfedge=*/0, star, std::move(labels));
}

std::string QuadMap::to_json() const {
  nlohmann::json j;
  j["F"] = n_faces_;
  j["root_edge"] = root_halfedge_;
  j["star_vertex"] = star_vertex_;
  j["labels"] = labels_;
  nlohmann::json edges = nlohmann::json::array();
  // One record per half-edge: [tail, head, next_cw]; next_cw is the inverse
  // of the ccw rotation.
  std::vector<int> next_cw(tail_.size());
  for (std::size_t h = 0; h < tail_.size(); ++h) next_cw[rot_next_[h]] = static_cast<int>(h);
  for (std::size_t h = 0; h < tail_.size(); ++h)
    edges.push_back({tail_[h], head(static_cast<int>(h)), next_cw[h]});
  j["edges"] = edges;
  return j.dump();
}

QuadMap QuadMap::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  auto edges = j.at("edges");
  const int nh = static_cast<int>(edges.size());
  std::vector<int> tail(nh), next_cw(nh), rot_next(nh);
  int n_vertices = 0;
  for (int h = 0; h < nh; ++h) {
    tail[h] = edges[h][0].get<int>();
    next_cw[h] = edges[h][2].get<int>();
    n_vertices = std::max(n_vertices, tail[h] + 1);
  }
  for (int h = 0; h < nh; ++h) rot_next[next_cw[h]] = h;
  std::vector<int> labels = j.value("labels", std::vector<int>{});
  return assemble(n_vertices, std::move(tail), std::move(rot_next), j.at("root_edge").get<int>(),
                  j.value("star_vertex", -1), std::move(labels));
}

}  // namespace confdim
