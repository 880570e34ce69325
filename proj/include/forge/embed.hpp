#pragma once

#include <array>
#include <ostream>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "forge/polytope.hpp"

namespace forge {

struct EmbeddedPolytope {
  std::vector<Eigen::Vector3d> vertices;          // indexed like the metric vertices
  std::vector<std::array<int, 3>> triangles;      // counter-clockwise seen from outside
  std::vector<std::vector<int>> faces;            // triangles merged across flat edges
  Eigen::Vector3d apex = Eigen::Vector3d::Zero();
  double closure_residual = 0;   // spread of a vertex over its face placements, before polishing
  double max_edge_error = 0;     // after polishing
  double volume = 0;
  double diameter = 0;
  double convexity_violation = 0;  // largest distance of a vertex outside a face plane
  bool degenerate = false;
  bool flat_layout = false;  // faces unfolded into one plane, see PlaceOptions::flat_tol
};

struct PlaceOptions {
  int seed_face = 0;
  double merge_tol = 1e-6;          // |pi - theta| below this merges two faces
  double closure_tol = 1e-6;        // times the diameter; larger closure residual throws
  double degenerate_volume = 1e-8;  // times diameter^3
  bool polish = true;               // one Gauss-Newton pass on the edge lengths
  // when every pyramid altitude is below this multiple of the longest edge the faces are
  // laid out in the plane, folding over edges with theta < pi/2 and unfolding the rest
  double flat_tol = 1e-4;
  Exec exec = Exec::Parallel;
};

// Lays the pyramids out face by face around a common apex. Throws EmbedError when
// the layout does not close up.
// A nearly flat polytope is laid out as a doubly covered polygon instead; its
// apex is the seed apex dropped onto that plane.
EmbeddedPolytope place_faces(const GeneralizedPolytope& P, const PlaceOptions& opt = {});

struct ApexSolution {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  double residual = 0;  // |sum w_i (p_i - a)/|p_i - a||
  int iterations = 0;
  bool converged = false;
};

// Weighted geometric median (Weiszfeld iteration with a Newton finish).
ApexSolution solve_apex(const std::vector<Eigen::Vector3d>& points, const Eigen::VectorXd& weights);

struct Congruence {
  double rms = 0;
  bool reflected = false;
};

// Best rigid motion, optionally with a reflection, taking a onto b (same vertex order).
Congruence congruence_check(const std::vector<Eigen::Vector3d>& a, const std::vector<Eigen::Vector3d>& b);

double diameter(const std::vector<Eigen::Vector3d>& pts);

void write_obj(std::ostream& os, const EmbeddedPolytope& E, bool merged);
nlohmann::json to_json(const EmbeddedPolytope& E);

}  // namespace forge
