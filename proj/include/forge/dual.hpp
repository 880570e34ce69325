#pragma once

#include <vector>

#include <Eigen/Core>

#include "forge/polytope.hpp"

namespace forge {

// Spherical triangulation of directions seen from the apex: the combinatorics of the
// polytope plus, per edge, the angle phi between the directions to its endpoints.
struct Fan {
  CornerMesh mesh;
  std::vector<double> phi;    // per corner (side)
  std::vector<double> omega;  // per corner, angle of the spherical triangle there
};

// Computes omega from phi; throws DegenerateError for non-existent spherical triangles.
Fan make_fan(CornerMesh mesh, std::vector<double> phi, Exec exec = Exec::Parallel);
Fan fan_of(const GeneralizedPolytope& P, const PolytopeGeometry& g, Exec exec = Exec::Parallel);

// Support numbers of the dual and everything derived from them.
// Per halfedge c from i to j: h_tail[c] is h_ij, h_tip[c] is h_ji.
// Per side c in its face ijk: ortho_tail[c] = h_ijk, ortho_tip[c] = h_jik.
struct DualDecomposition {
  Eigen::VectorXd h;
  std::vector<double> h_tail, h_tip;
  std::vector<double> ortho_tail, ortho_tip;
  std::vector<double> ell_star;  // per corner; both halfedges of an edge agree
  Eigen::VectorXd area;          // F_i
  double volume = 0;
};

DualDecomposition decompose(const Fan& fan, const Eigen::VectorXd& h, Exec exec = Exec::Parallel);

struct DualPolyhedron {
  Fan fan;
  DualDecomposition data;
};

// Support numbers 1/r_i over the fan of P.
DualPolyhedron dualize(const GeneralizedPolytope& P, Exec exec = Exec::Parallel);

// F_i(x, y) and vol(x, y, z); symmetric in their arguments.
double mixed_area(const Fan& fan, int i, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double mixed_volume(const Fan& fan, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z);

// d F_i / d h_j, same halfedge accumulation as the curvature Jacobian.
Eigen::MatrixXd volume_hessian(const Fan& fan, const DualDecomposition& d);

// The area of face i as a quadratic form in the distances to the sides of its
// link polygon, F_i = x^T B x. Corner angles go in cyclic order; coordinate a
// sits between corners a-1 and a.
Eigen::MatrixXd link_form(const std::vector<double>& corner_angles);
Eigen::MatrixXd link_form(const Fan& fan, int vertex);

struct FacePositivity {
  Eigen::VectorXd area;              // F_i
  std::vector<char> positive;
  Eigen::VectorXd spherical_area;    // sum over corners of (omega - gamma)
  Eigen::VectorXd area_residual;     // spherical_area - (delta - kappa)
};

FacePositivity face_positivity_check(const GeneralizedPolytope& P, Exec exec = Exec::Parallel);

}  // namespace forge
