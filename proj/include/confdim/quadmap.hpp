#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "confdim/metric_space.hpp"

namespace confdim {

// Rooted quadrangulation as a half-edge structure. Half-edges 2e and 2e+1 are
// the two orientations of edge e; rot_next is the counterclockwise-next
// half-edge with the same tail vertex.
class QuadMap {
public:
  int n_vertices() const { return n_vertices_; }
  int n_edges() const { return static_cast<int>(tail_.size()) / 2; }
  int n_faces() const { return n_faces_; }

  int tail(int h) const { return tail_[h]; }
  int head(int h) const { return tail_[h ^ 1]; }
  static int twin(int h) { return h ^ 1; }
  int rot_next(int h) const { return rot_next_[h]; }
  int face_of(int h) const { return face_of_[h]; }
  int face_degree(int f) const { return face_degree_[f]; }
  // One half-edge on each face; walking next_in_face yields the face cycle.
  int face_halfedge(int f) const { return face_halfedge_[f]; }
  int next_in_face(int h) const { return rot_next_[h ^ 1]; }

  int root_halfedge() const { return root_halfedge_; }
  int root_vertex() const { return tail_[root_halfedge_]; }
  int star_vertex() const { return star_vertex_; }

  const std::vector<int>& dist_from_root() const { return dist_root_; }
  const std::vector<int>& labels() const { return labels_; }

  // Half-edges out of v in ccw order starting from an arbitrary one.
  std::vector<int> halfedges_out(int v) const;
  const std::vector<int>& first_out() const { return first_out_; }

  UnitGraph skeleton() const;  // unit-length graph on the vertices

  // Assembles the structure from raw arrays and validates faces (each face
  // closes with degree 4, and Euler's relation holds). Throws on violation.
  // require_quad = false skips the degree/Euler checks (mixed-degree test
  // fixtures; the face trace must still close).
  static QuadMap assemble(int n_vertices, std::vector<int> tail, std::vector<int> rot_next,
                          int root_halfedge, int star_vertex, std::vector<int> labels,
                          bool require_quad = true);

  std::string to_json() const;
  static QuadMap from_json(const std::string& text);

private:
  int n_vertices_ = 0;
  int n_faces_ = 0;
  std::vector<int> tail_;
  std::vector<int> rot_next_;
  std::vector<int> face_of_;
  std::vector<int> face_degree_;
  std::vector<int> face_halfedge_;
  std::vector<int> first_out_;
  int root_halfedge_ = 0;
  int star_vertex_ = -1;
  std::vector<int> dist_root_;
  std::vector<int> labels_;

  void trace_faces();
  void compute_dist();
};

// Uniform rooted quadrangulation with F faces via a uniform labeled plane
// tree and the corner-successor construction. Deterministic given the seed.
QuadMap sample_quadrangulation(int n_faces, std::uint64_t seed);

}  // namespace confdim
