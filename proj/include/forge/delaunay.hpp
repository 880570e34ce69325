#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "forge/mesh.hpp"

namespace forge {

// Quadratic x -> |x - center|^2 + offset through three weighted planar points.
struct QFunction {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double offset = 0;

  double operator()(const Eigen::Vector2d& x) const { return (x - center).squaredNorm() + offset; }
};

// Throws DegenerateError for collinear points.
QFunction interpolate_q(const Eigen::Vector2d& pi, const Eigen::Vector2d& pj, const Eigen::Vector2d& pk, double qi,
                        double qj, double qk);

double ext_value(const Eigen::Vector2d& pi, const Eigen::Vector2d& pj, const Eigen::Vector2d& pk, double qi,
                 double qj, double qk, const Eigen::Vector2d& target);

// Signed excess q_l - ext_ijk(l) for the hinge of corner c, and the scale used for
// the tolerance. Weights are shifted by q_i first so the test does not care about
// a common additive constant.
struct HingeTest {
  double excess = 0;
  double scale = 1;
};
HingeTest hinge_test(const CornerMesh& mesh, int c, const Eigen::VectorXd& q);

inline constexpr double kBadEdgeTol = 1e-10;
inline constexpr double kFlatEdgeTol = 1e-9;

bool edge_is_bad(const CornerMesh& mesh, int c, const Eigen::VectorXd& q, double tol = kBadEdgeTol);

struct DelaunayStats {
  long flips = 0;
  // flips where the interpolant at the old edge midpoint went down, which would be a bug
  long monotonicity_violations = 0;
};

// Called just before each flip with the corner of the edge about to go.
using FlipHook = std::function<void(const CornerMesh&, int corner)>;

// Flips bad edges until none remain. Throws FlipError when a bad edge cannot be
// flipped (weights outside the admissible set) or after max_flips flips; the
// default cap is 100 E^2.
DelaunayStats weighted_delaunay(CornerMesh& mesh, const Eigen::VectorXd& q, long max_flips = -1,
                                const FlipHook& hook = {});

// Region boundary walk. merged[c] marks edges to delete; each returned cycle lists
// the halfedges (corners) bounding one region, in order.
std::vector<std::vector<int>> region_boundaries(const CornerMesh& mesh, const std::vector<char>& merged);
std::vector<int> region_of_faces(const CornerMesh& mesh, const std::vector<char>& merged, int* count = nullptr);

struct Tesselation {
  std::vector<char> inessential;  // per corner
  int num_regions = 0;
  std::string canonical;  // region count and boundary vertex cycles, exact
  std::vector<std::vector<double>> boundary_lengths;  // per cycle, in the order of canonical
};

Tesselation canonical_tesselation(const CornerMesh& mesh, const Eigen::VectorXd& q, double tol = kFlatEdgeTol);

// same regions, with boundary lengths equal to a relative tolerance
bool same_tesselation(const Tesselation& a, const Tesselation& b, double rel_tol = 1e-9);

}  // namespace forge
