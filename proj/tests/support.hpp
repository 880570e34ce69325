#pragma once

// Helpers shared by the unit tests and the acceptance driver.

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "forge/delaunay.hpp"
#include "forge/error.hpp"
#include "forge/generators.hpp"
#include "forge/mesh.hpp"
#include "forge/polytope.hpp"
#include "forge/surface.hpp"

namespace forge::testing {

// Both sides of a planar triangulated polygon glued along the boundary. tris are
// counter-clockwise index triples into pts; the second copy comes reversed.
inline Development doubly_covered(const std::vector<Eigen::Vector2d>& pts,
                                  const std::vector<std::array<int, 3>>& tris) {
  Development d;
  const int nt = static_cast<int>(tris.size());
  std::map<std::pair<int, int>, SideRef> top, bottom;
  for (int layer = 0; layer < 2; ++layer)
    for (int t = 0; t < nt; ++t) {
      std::array<int, 3> v = tris[t];
      if (layer == 1) std::swap(v[1], v[2]);
      std::array<double, 3> sides{};
      for (int k = 0; k < 3; ++k) {
        const int a = v[(k + 1) % 3], b = v[(k + 2) % 3];
        sides[k] = (pts[a] - pts[b]).norm();
        (layer == 0 ? top : bottom)[{a, b}] = {layer * nt + t, k};
      }
      d.sides.push_back(sides);
    }
  for (const auto& [e, s] : top) {
    const auto twin = top.find({e.second, e.first});
    if (twin == top.end()) d.gluings.push_back({s, bottom.at({e.second, e.first})});
    else if (e.first < e.second) d.gluings.push_back({s, twin->second});
  }
  for (const auto& [e, s] : bottom) {
    const auto twin = bottom.find({e.second, e.first});
    if (twin != bottom.end() && e.first < e.second) d.gluings.push_back({s, twin->second});
  }
  return d;
}

inline PolyhedralMetric metric_of(const HullDevelopment& h) { return build_metric(h.development); }

inline CornerMesh mesh_of(const Development& d) { return CornerMesh::from_metric(build_metric(d)); }

// Random hull with the apex at a random interior point and radii pushed outwards by
// random amounts (curvatures may have either sign). Retries with a smaller spread
// until make_polytope accepts.
struct RandomPolytope {
  HullDevelopment hull;
  GeneralizedPolytope P;
  Eigen::Vector3d apex;
};

inline RandomPolytope random_polytope(std::uint64_t seed, int points, double spread = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  for (int attempt = 0;; ++attempt) {
    RandomPolytope out;
    out.hull = random_hull(seed * 1000 + attempt, points);
    const PolyhedralMetric m = build_metric(out.hull.development);
    const std::vector<Eigen::Vector3d> pts = metric_vertex_points(out.hull, m);
    // convex combination with weights bounded away from zero keeps the apex inside
    Eigen::VectorXd w(pts.size());
    for (int i = 0; i < w.size(); ++i) w[i] = 0.2 + u(rng);
    w /= w.sum();
    out.apex.setZero();
    for (int i = 0; i < w.size(); ++i) out.apex += w[i] * pts[i];
    Eigen::VectorXd r(pts.size());
    const double s = spread * std::pow(0.7, attempt);
    for (int i = 0; i < r.size(); ++i) r[i] = (pts[i] - out.apex).norm() * (1 + s * u(rng));
    try {
      out.P = make_polytope(CornerMesh::from_metric(m), r);
      return out;
    } catch (const Error&) {
      if (attempt > 50) throw;
    }
  }
}

// Central differences of curvatures in r_j, retriangulating for each sample.
inline Eigen::MatrixXd fd_jacobian(const GeneralizedPolytope& P, double rel_step = 1e-6) {
  const int n = static_cast<int>(P.r.size());
  Eigen::MatrixXd J(n, n);
  for (int j = 0; j < n; ++j) {
    const double h = rel_step * P.r[j];
    Eigen::VectorXd rp = P.r, rm = P.r;
    rp[j] += h;
    rm[j] -= h;
    CornerMesh mp = P.mesh, mm = P.mesh;
    weighted_delaunay(mp, rp.array().square());
    weighted_delaunay(mm, rm.array().square());
    J.col(j) = (evaluate(mp, rp).kappa - evaluate(mm, rm).kappa) / (2 * h);
  }
  return J;
}

// A constant added to every squared radius keeps the triangulation; raise it until
// every curvature is positive.
inline GeneralizedPolytope positively_curved(const GeneralizedPolytope& P) {
  const double qmax = P.r.array().square().maxCoeff();
  for (double f = 0.25;; f *= 2) {
    const Eigen::VectorXd r = (P.r.array().square() + f * qmax).sqrt();
    GeneralizedPolytope Q = make_polytope(P.mesh, r);
    if (evaluate(Q.mesh, Q.r).kappa.minCoeff() > 0) return Q;
  }
}

inline double max_abs(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace forge::testing
