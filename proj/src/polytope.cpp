#include "forge/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "forge/delaunay.hpp"
#include "forge/error.hpp"
#include "forge/trig.hpp"

namespace forge {

double cayley_menger(double lij, double ljk, double lki, double qi, double qj, double qk) {
  using M5 = Eigen::Matrix<long double, 5, 5>;
  const long double a = static_cast<long double>(lij) * lij;
  const long double b = static_cast<long double>(lki) * lki;
  const long double c = static_cast<long double>(ljk) * ljk;
  M5 m;
  m << 0, 1, 1, 1, 1,
       1, 0, qi, qj, qk,
       1, qi, 0, a, b,
       1, qj, a, 0, c,
       1, qk, b, c, 0;
  return static_cast<double>(m.determinant());
}

double cayley_menger(const CornerMesh& mesh, int face, const Eigen::VectorXd& q) {
  const int c0 = 3 * face, c1 = c0 + 1, c2 = c0 + 2;
  return cayley_menger(mesh.length(c2), mesh.length(c0), mesh.length(c1), q[mesh.vertex(c0)], q[mesh.vertex(c1)],
                       q[mesh.vertex(c2)]);
}

namespace {

double angle_between(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

// Angle between u and v seen along the axis e (unit).
double dihedral(const Eigen::Vector3d& e, const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  return angle_between(u - u.dot(e) * e, v - v.dot(e) * e);
}

}  // namespace

Pyramid solve_pyramid(const std::array<double, 3>& lengths, const std::array<double, 3>& radii) {
  Pyramid p;
  const TriangleAngles ang = euclidean_angles(lengths[0], lengths[1], lengths[2]);
  for (int k = 0; k < 3; ++k) p.base_angle[k] = ang[k];
  p.base[0] = Eigen::Vector3d::Zero();
  p.base[1] = {lengths[2], 0, 0};
  p.base[2] = {lengths[1] * std::cos(ang.alpha), lengths[1] * std::sin(ang.alpha), 0};

  const Eigen::Vector2d b0 = p.base[0].head<2>(), b1 = p.base[1].head<2>(), b2 = p.base[2].head<2>();
  // trilateration: the apex projects to the centre of the Q-function through r^2, and
  // its offset is the squared altitude
  const QFunction f = interpolate_q(b0, b1, b2, radii[0] * radii[0], radii[1] * radii[1], radii[2] * radii[2]);
  const double rmax = std::max({radii[0], radii[1], radii[2]});
  if (!(f.offset > 1e-28 * rmax * rmax))
    throw DegenerateError(fmt::format("pyramid does not exist (squared altitude {})", f.offset));
  p.altitude = std::sqrt(f.offset);
  p.apex = {f.center.x(), f.center.y(), -p.altitude};

  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d& P = p.base[k];
    const Eigen::Vector3d& T = p.base[(k + 1) % 3];
    const Eigen::Vector3d& U = p.base[(k + 2) % 3];
    const Eigen::Vector3d& A = p.apex;
    p.rho_tail[k] = angle_between(A - T, U - T);
    p.rho_tip[k] = angle_between(A - U, T - U);
    p.phi[k] = angle_between(T - A, U - A);
    p.alpha[k] = dihedral((U - T).normalized(), P - T, A - T);
    p.omega[k] = dihedral((A - P).normalized(), T - P, U - P);
  }
  return p;
}

Pyramid solve_pyramid(const CornerMesh& mesh, int face, const Eigen::VectorXd& r) {
  const int c = 3 * face;
  return solve_pyramid({mesh.length(c), mesh.length(c + 1), mesh.length(c + 2)},
                       {r[mesh.vertex(c)], r[mesh.vertex(c + 1)], r[mesh.vertex(c + 2)]});
}

double PolytopeGeometry::max_theta() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : theta) m = std::max(m, t);
  return m;
}

PolytopeGeometry evaluate(const CornerMesh& mesh, const Eigen::VectorXd& r, Exec exec) {
  PolytopeGeometry g;
  const int nf = mesh.num_faces();
  g.pyramids.resize(nf);
  parallel_for(nf, exec, [&](std::ptrdiff_t f) { g.pyramids[f] = solve_pyramid(mesh, static_cast<int>(f), r); });

  g.kappa = Eigen::VectorXd::Constant(mesh.num_vertices(), 2 * M_PI);
  for (int c = 0; c < mesh.num_corners(); ++c) g.kappa[mesh.vertex(c)] -= g.omega(c);
  g.theta.resize(mesh.num_corners());
  double edge_term = 0;
  for (int c = 0; c < mesh.num_corners(); ++c) {
    g.theta[c] = g.alpha(c) + g.alpha(mesh.opposite(c));
    if (mesh.is_edge_rep(c)) edge_term += mesh.length(c) * (M_PI - g.theta[c]);
  }
  g.H = r.dot(g.kappa) + edge_term;
  return g;
}

PolytopeGeometry curvatures(const GeneralizedPolytope& P, Exec exec) {
  const Validity v = check_validity(P);
  if (!v.valid) throw Error("not a generalized convex polytope: " + v.reason);
  PolytopeGeometry g = evaluate(P.mesh, P.r, exec);
  if (g.max_theta() > M_PI + kThetaSlack)
    throw Error(fmt::format("edge dihedral {} exceeds pi", g.max_theta()));
  return g;
}

Validity check_validity(const GeneralizedPolytope& P) {
  Validity v;
  const CornerMesh& m = P.mesh;
  if (P.r.size() != m.num_vertices()) {
    v.valid = false;
    v.reason = "radius vector has wrong size";
    return v;
  }
  for (int i = 0; i < P.r.size(); ++i)
    if (!(P.r[i] > 0)) {
      v.valid = false;
      v.reason = fmt::format("radius {} is not positive", i);
      return v;
    }
  const Eigen::VectorXd q = P.r.array().square();
  v.min_cayley_menger = std::numeric_limits<double>::infinity();
  for (int f = 0; f < m.num_faces(); ++f) {
    const double cm = cayley_menger(m, f, q);
    v.min_cayley_menger = std::min(v.min_cayley_menger, cm);
    if (!(cm > 0) && v.valid) {
      v.valid = false;
      v.reason = fmt::format("pyramid over face {} does not exist", f);
    }
  }
  if (!v.valid) return v;
  for (int c : m.edges())
    if (edge_is_bad(m, c, q)) ++v.bad_edges;
  if (v.bad_edges > 0) {
    v.valid = false;
    v.reason = fmt::format("{} edges violate the weighted Delaunay condition", v.bad_edges);
    return v;
  }
  v.min_altitude = std::numeric_limits<double>::infinity();
  for (int f = 0; f < m.num_faces(); ++f) {
    try {
      v.min_altitude = std::min(v.min_altitude, solve_pyramid(m, f, P.r).altitude);
    } catch (const DegenerateError& e) {
      v.valid = false;
      v.reason = fmt::format("face {}: {}", f, e.what());
      return v;
    }
  }
  return v;
}

GeneralizedPolytope make_polytope(CornerMesh mesh, Eigen::VectorXd r) {
  const Eigen::VectorXd q = r.array().square();
  weighted_delaunay(mesh, q);
  GeneralizedPolytope P{std::move(mesh), std::move(r)};
  const Validity v = check_validity(P);
  if (!v.valid) throw Error("radii do not define a generalized convex polytope: " + v.reason);
  return P;
}

}  // namespace forge
