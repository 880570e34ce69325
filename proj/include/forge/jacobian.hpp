#pragma once

#include <ostream>

#include <Eigen/Core>

#include "forge/polytope.hpp"

namespace forge {

// d kappa / d r, accumulated over halfedges (directed edges). Each halfedge e from
// i to j contributes w_e = (cot alpha_e + cot alpha_-e) / sin rho_e times the
// derivative of rho_e, which feeds column j through 1/(l sin rho_-e) and column i
// through -cos phi_e/(l sin rho_-e). Loops hit the diagonal through both terms.
Eigen::MatrixXd assemble_jacobian(const CornerMesh& mesh, const PolytopeGeometry& g, Exec exec = Exec::Parallel);
Eigen::MatrixXd assemble_jacobian(const GeneralizedPolytope& P, Exec exec = Exec::Parallel);

struct RankProfile {
  int rank = 0;
  int corank = 0;
  Eigen::VectorXd singular_values;  // descending
  Eigen::MatrixXd kernel;           // right singular vectors below the threshold
  double condition = 0;             // sigma_max / sigma_min
};

// Singular values below tol * sigma_max count as zero.
RankProfile rank_profile(const Eigen::MatrixXd& J, double tol);

// Whitespace separated rows, full precision.
void write_matrix(std::ostream& os, const Eigen::MatrixXd& M);

}  // namespace forge
