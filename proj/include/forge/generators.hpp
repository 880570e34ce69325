#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "forge/surface.hpp"

namespace forge {

// Boundary of the convex hull of a point set as a development. Faces with more
// than three vertices are fanned from their lowest-index vertex. corner_point maps
// corner 3t+k to its input point.
struct HullDevelopment {
  Development development;
  std::vector<Eigen::Vector3d> points;
  std::vector<int> corner_point;
};

// Throws Error when the points span less than three dimensions or some point is
// not a hull vertex.
HullDevelopment hull_development(const std::vector<Eigen::Vector3d>& points, double rel_tol = 1e-9);

// Input points reordered to match the metric vertex numbering.
std::vector<Eigen::Vector3d> metric_vertex_points(const HullDevelopment& h, const PolyhedralMetric& m);

std::vector<Eigen::Vector3d> random_sphere_points(std::mt19937_64& rng, int n);

// Uniform points on the unit sphere, redrawn until the hull is well shaped (all
// points extreme, face angles and dihedrals away from degenerate).
HullDevelopment random_hull(std::uint64_t seed, int n);

HullDevelopment regular_tetrahedron(double edge = 1.0);
HullDevelopment cube(double edge = 1.0);
HullDevelopment icosphere(int subdivisions);

// Two copies of a regular n-gon glued along their boundaries.
Development doubly_covered_polygon(int n, double side = 1.0);

// Two regular n-gons of the same side glued boundary to boundary with the vertices
// of one meeting the side midpoints of the other.
Development offset_polygon_pair(int n, double side = 1.0);

}  // namespace forge
