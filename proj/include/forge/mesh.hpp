#pragma once

#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "forge/surface.hpp"

namespace forge {

// Two triangles hinged on an edge, laid out in the plane: tail i at the origin,
// tip j on the positive x axis, k above (first face) and l below (second face).
// The two faces may be the same combinatorial face.
struct QuadDevelopment {
  Eigen::Vector2d i, j, k, l;
  int face_k = -1, face_l = -1;
  double angle_i = 0, angle_j = 0;  // quad angles at the hinge endpoints

  bool same_face() const { return face_k == face_l; }
  bool strictly_convex(double tol) const { return angle_i < M_PI - tol && angle_j < M_PI - tol; }
};

// Corner table for a triangulated sphere that may contain loops and multi-edges.
//
// Corner c = 3f + k lives in face f. The side of c is the face side opposite c;
// read as a halfedge it runs from vertex(next(c)) to vertex(prev(c)). opposite(c)
// is the corner whose side is glued to the side of c, so the two halfedges of an
// edge are c and opposite(c).
class CornerMesh {
 public:
  CornerMesh() = default;
  static CornerMesh from_metric(const PolyhedralMetric& m);

  int num_faces() const { return static_cast<int>(vertex_.size()) / 3; }
  int num_corners() const { return static_cast<int>(vertex_.size()); }
  int num_vertices() const { return nv_; }
  int num_edges() const { return num_corners() / 2; }

  static int face(int c) { return c / 3; }
  static int next(int c) { return 3 * (c / 3) + (c % 3 + 1) % 3; }
  static int prev(int c) { return 3 * (c / 3) + (c % 3 + 2) % 3; }

  int vertex(int c) const { return vertex_[c]; }
  double length(int c) const { return length_[c]; }
  int opposite(int c) const { return opp_[c]; }
  int tail(int c) const { return vertex_[next(c)]; }
  int tip(int c) const { return vertex_[prev(c)]; }

  // One corner per edge (the smaller of the pair).
  bool is_edge_rep(int c) const { return c < opp_[c]; }
  std::vector<int> edges() const;

  // Planar angle of the face at corner c.
  double corner_angle(int c) const;
  double circumradius(int f) const;

  QuadDevelopment develop_quad(int c) const;
  bool can_flip(int c, double tol = 1e-10) const;
  // Replaces the edge of c by the other diagonal; throws FlipError when the
  // hinge is not a strictly convex quad of two distinct faces. Afterwards the
  // new edge is at next(c) / next(opposite(c)).
  double flip(int c, double tol = 1e-10);

  // Corners around vertex v in counter-clockwise order.
  std::vector<int> corners_around(int v) const;
  std::vector<std::vector<int>> corners_by_vertex() const;

  // Throws Error when the table is inconsistent.
  void check_invariants() const;
  nlohmann::json to_json() const;

  // Face-wise description independent of corner numbering, for comparisons.
  std::vector<std::array<long long, 6>> signature(double quantum = 1e-9) const;

 private:
  int nv_ = 0;
  std::vector<int> vertex_;
  std::vector<double> length_;
  std::vector<int> opp_;
};

}  // namespace forge
