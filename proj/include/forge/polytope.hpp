#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "forge/mesh.hpp"
#include "forge/parallel.hpp"

namespace forge {

// Determinant of the bordered distance matrix of the apex and the three base
// vertices; positive exactly when the pyramid exists.
double cayley_menger(double lij, double ljk, double lki, double qi, double qj, double qk);
double cayley_menger(const CornerMesh& mesh, int face, const Eigen::VectorXd& q);

// Pyramid over one face, laid out with corner 0 at the origin, corner 1 on the
// positive x axis, corner 2 above, and the apex below the base plane (the base is
// counter-clockwise seen from outside). Per-side arrays are indexed by the corner
// facing the side; a side runs from corner k+1 (tail) to corner k+2 (tip).
struct Pyramid {
  std::array<Eigen::Vector3d, 3> base;
  Eigen::Vector3d apex = Eigen::Vector3d::Zero();
  double altitude = 0;
  std::array<double, 3> rho_tail{};   // angle at the tail in triangle apex-tail-tip
  std::array<double, 3> rho_tip{};    // angle at the tip
  std::array<double, 3> phi{};        // angle at the apex
  std::array<double, 3> alpha{};      // dihedral between base and side face along the side
  std::array<double, 3> omega{};      // dihedral at the radial edge through corner k
  std::array<double, 3> base_angle{};
};

// lengths[k] is the side facing corner k, radii[k] the distance from the apex to corner k.
Pyramid solve_pyramid(const std::array<double, 3>& lengths, const std::array<double, 3>& radii);
Pyramid solve_pyramid(const CornerMesh& mesh, int face, const Eigen::VectorXd& r);

struct GeneralizedPolytope {
  CornerMesh mesh;
  Eigen::VectorXd r;
};

struct PolytopeGeometry {
  std::vector<Pyramid> pyramids;
  Eigen::VectorXd kappa;
  std::vector<double> theta;  // per corner, the dihedral of its edge (same on both halfedges)
  double H = 0;

  const Pyramid& pyramid_of(int c) const { return pyramids[c / 3]; }
  double alpha(int c) const { return pyramids[c / 3].alpha[c % 3]; }
  double phi(int c) const { return pyramids[c / 3].phi[c % 3]; }
  double rho_tail(int c) const { return pyramids[c / 3].rho_tail[c % 3]; }
  double rho_tip(int c) const { return pyramids[c / 3].rho_tip[c % 3]; }
  double omega(int c) const { return pyramids[c / 3].omega[c % 3]; }
  double max_theta() const;
};

// Pyramids, curvatures, dihedrals and H for the given triangulation. Throws
// DegenerateError when a pyramid does not exist. Does not check the triangulation.
PolytopeGeometry evaluate(const CornerMesh& mesh, const Eigen::VectorXd& r, Exec exec = Exec::Parallel);

inline constexpr double kThetaSlack = 1e-9;

// As evaluate, but requires a valid polytope (throws Error otherwise).
PolytopeGeometry curvatures(const GeneralizedPolytope& P, Exec exec = Exec::Parallel);

struct Validity {
  bool valid = true;
  std::string reason;
  double min_cayley_menger = 0;
  double min_altitude = 0;
  int bad_edges = 0;
};

Validity check_validity(const GeneralizedPolytope& P);

// Retriangulates for q = r^2 and checks validity; throws Error if the radii do not
// define a generalized convex polytope.
GeneralizedPolytope make_polytope(CornerMesh mesh, Eigen::VectorXd r);

}  // namespace forge
