#include "forge/dual.hpp"

#include <cmath>

#include "forge/error.hpp"
#include "forge/trig.hpp"

namespace forge {

Fan make_fan(CornerMesh mesh, std::vector<double> phi, Exec exec) {
  Fan fan{std::move(mesh), std::move(phi), {}};
  fan.omega.resize(fan.mesh.num_corners());
  parallel_for(fan.mesh.num_faces(), exec, [&](std::ptrdiff_t f) {
    const int c = 3 * static_cast<int>(f);
    const TriangleAngles a = spherical_angles(fan.phi[c], fan.phi[c + 1], fan.phi[c + 2]);
    for (int k = 0; k < 3; ++k) fan.omega[c + k] = a[k];
  });
  return fan;
}

Fan fan_of(const GeneralizedPolytope& P, const PolytopeGeometry& g, Exec exec) {
  std::vector<double> phi(P.mesh.num_corners());
  for (int c = 0; c < P.mesh.num_corners(); ++c) phi[c] = g.phi(c);
  return make_fan(P.mesh, std::move(phi), exec);
}

namespace {

struct EdgeTrig {
  double sin_phi, cos_phi;
};

EdgeTrig edge_trig(const Fan& fan, int c) {
  const double s = std::sin(fan.phi[c]);
  if (!(s >= kMinSine)) throw DegenerateError("fan edge of zero length");
  return {s, std::cos(fan.phi[c])};
}

// h_tail / h_tip for every halfedge from support numbers x.
void edge_heights(const Fan& fan, const Eigen::VectorXd& x, std::vector<double>& tail, std::vector<double>& tip) {
  const CornerMesh& m = fan.mesh;
  tail.resize(m.num_corners());
  tip.resize(m.num_corners());
  for (int c = 0; c < m.num_corners(); ++c) {
    const auto [s, co] = edge_trig(fan, c);
    const double xi = x[m.tail(c)], xj = x[m.tip(c)];
    tail[c] = (xj - xi * co) / s;
    tip[c] = (xi - xj * co) / s;
  }
}

}  // namespace

DualDecomposition decompose(const Fan& fan, const Eigen::VectorXd& h, Exec exec) {
  const CornerMesh& m = fan.mesh;
  DualDecomposition d;
  d.h = h;
  edge_heights(fan, h, d.h_tail, d.h_tip);
  d.ortho_tail.assign(m.num_corners(), 0.0);
  d.ortho_tip.assign(m.num_corners(), 0.0);
  // corner x at vertex i sees the halfedge prev(x) leaving towards j and the side next(x) arriving from k
  parallel_for(m.num_corners(), exec, [&](std::ptrdiff_t idx) {
    const int x = static_cast<int>(idx);
    const double s = std::sin(fan.omega[x]), co = std::cos(fan.omega[x]);
    if (!(s >= kMinSine)) throw DegenerateError("fan corner angle vanishes");
    const int out = CornerMesh::prev(x), in = CornerMesh::next(x);
    const double u = d.h_tail[out], w = d.h_tip[in];
    d.ortho_tail[out] = (w - u * co) / s;
    d.ortho_tip[in] = (u - w * co) / s;
  });
  d.ell_star.resize(m.num_corners());
  for (int c = 0; c < m.num_corners(); ++c) d.ell_star[c] = d.ortho_tail[c] + d.ortho_tip[m.opposite(c)];
  d.area = Eigen::VectorXd::Zero(m.num_vertices());
  for (int c = 0; c < m.num_corners(); ++c) d.area[m.tail(c)] += 0.5 * d.h_tail[c] * d.ell_star[c];
  d.volume = h.dot(d.area) / 3.0;
  return d;
}

DualPolyhedron dualize(const GeneralizedPolytope& P, Exec exec) {
  const PolytopeGeometry g = evaluate(P.mesh, P.r, exec);
  DualPolyhedron D{fan_of(P, g, exec), {}};
  D.data = decompose(D.fan, P.r.cwiseInverse(), exec);
  return D;
}

double mixed_area(const Fan& fan, int i, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const DualDecomposition dy = decompose(fan, y, Exec::Serial);
  std::vector<double> xt, xp;
  edge_heights(fan, x, xt, xp);
  double F = 0;
  for (int c = 0; c < fan.mesh.num_corners(); ++c)
    if (fan.mesh.tail(c) == i) F += 0.5 * xt[c] * dy.ell_star[c];
  return F;
}

double mixed_volume(const Fan& fan, const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& z) {
  double v = 0;
  for (int i = 0; i < fan.mesh.num_vertices(); ++i) v += x[i] * mixed_area(fan, i, y, z);
  return v / 3.0;
}

Eigen::MatrixXd volume_hessian(const Fan& fan, const DualDecomposition& d) {
  const CornerMesh& m = fan.mesh;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m.num_vertices(), m.num_vertices());
  for (int c = 0; c < m.num_corners(); ++c) {
    const auto [s, co] = edge_trig(fan, c);
    const int i = m.tail(c), j = m.tip(c);
    H(i, j) += d.ell_star[c] / s;
    H(i, i) -= d.ell_star[c] * co / s;
  }
  return H;
}

Eigen::MatrixXd link_form(const std::vector<double>& w) {
  const int n = static_cast<int>(w.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  // corner a joins coordinate a to coordinate a+1
  for (int a = 0; a < n; ++a) {
    const int b = (a + 1) % n;
    const double s = std::sin(w[a]), co = std::cos(w[a]);
    B(a, a) -= co / s;
    B(b, b) -= co / s;
    B(a, b) += 1.0 / s;
    B(b, a) += 1.0 / s;
  }
  return 0.5 * B;
}

Eigen::MatrixXd link_form(const Fan& fan, int vertex) {
  std::vector<double> w;
  for (int x : fan.mesh.corners_around(vertex)) w.push_back(fan.omega[x]);
  return link_form(w);
}

FacePositivity face_positivity_check(const GeneralizedPolytope& P, Exec exec) {
  const PolytopeGeometry g = evaluate(P.mesh, P.r, exec);
  const Fan fan = fan_of(P, g, exec);
  const DualDecomposition d = decompose(fan, P.r.cwiseInverse(), exec);
  const CornerMesh& m = P.mesh;
  FacePositivity out;
  out.area = d.area;
  out.positive.resize(m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) out.positive[i] = d.area[i] > 0;
  out.spherical_area = Eigen::VectorXd::Zero(m.num_vertices());
  Eigen::VectorXd deficit = Eigen::VectorXd::Constant(m.num_vertices(), 2 * M_PI);
  for (int x = 0; x < m.num_corners(); ++x) {
    const int i = m.vertex(x);
    const double rho_j = g.rho_tail(CornerMesh::prev(x)), rho_k = g.rho_tip(CornerMesh::next(x));
    const double gamma = spherical_third_side(rho_j, rho_k, g.omega(x));
    out.spherical_area[i] += g.omega(x) - gamma;
    deficit[i] -= m.corner_angle(x);
  }
  out.area_residual = out.spherical_area - (deficit - g.kappa);
  return out;
}

}  // namespace forge
