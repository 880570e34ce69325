#include "forge/embed.hpp"

#include <cmath>
#include <deque>
#include <iomanip>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "forge/delaunay.hpp"
#include "forge/error.hpp"

namespace forge {

namespace {

// Orthonormal frame with origin o, first axis towards a, second in the plane of o, a, b.
struct Frame {
  Eigen::Vector3d origin;
  Eigen::Matrix3d axes;  // columns
};

Frame frame_of(const Eigen::Vector3d& o, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  Frame f;
  f.origin = o;
  const Eigen::Vector3d e1 = (a - o).normalized();
  const Eigen::Vector3d e2 = ((b - o) - (b - o).dot(e1) * e1).normalized();
  f.axes.col(0) = e1;
  f.axes.col(1) = e2;
  f.axes.col(2) = e1.cross(e2);
  return f;
}

void polish_lengths(const CornerMesh& mesh, std::vector<Eigen::Vector3d>& p) {
  const std::vector<int> edges = mesh.edges();
  const int n = static_cast<int>(p.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<int>(edges.size()), 3 * n);
  Eigen::VectorXd res = Eigen::VectorXd::Zero(static_cast<int>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int c = edges[e], a = mesh.tail(c), b = mesh.tip(c);
    if (a == b) continue;
    const Eigen::Vector3d d = p[a] - p[b];
    const double len = d.norm();
    const Eigen::Vector3d u = d / len;
    res[e] = len - mesh.length(c);
    A.block<1, 3>(e, 3 * a) = u.transpose();
    A.block<1, 3>(e, 3 * b) = -u.transpose();
  }
  const Eigen::VectorXd step = A.completeOrthogonalDecomposition().solve(res);
  for (int i = 0; i < n; ++i) p[i] -= step.segment<3>(3 * i);
}

}  // namespace

double diameter(const std::vector<Eigen::Vector3d>& pts) {
  double d = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

EmbeddedPolytope place_faces(const GeneralizedPolytope& P, const PlaceOptions& opt) {
  const CornerMesh& m = P.mesh;
  const PolytopeGeometry g = evaluate(m, P.r, opt.exec);
  const int nf = m.num_faces();

  // global position of each corner, from the placement of its own face
  std::vector<Eigen::Vector3d> corner_pos(m.num_corners());
  std::vector<char> placed(nf, 0);
  std::deque<int> queue;
  const int seed = opt.seed_face;
  for (int k = 0; k < 3; ++k) corner_pos[3 * seed + k] = g.pyramids[seed].base[k];
  double max_length = 0, max_altitude = 0;
  for (int c : m.edges()) max_length = std::max(max_length, m.length(c));
  for (const Pyramid& p : g.pyramids) max_altitude = std::max(max_altitude, p.altitude);
  const bool flat = max_altitude <= opt.flat_tol * max_length;
  Eigen::Vector3d apex = g.pyramids[seed].apex;
  if (flat) apex.z() = 0;
  placed[seed] = 1;
  queue.push_back(seed);
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    for (int k = 0; k < 3; ++k) {
      const int c = 3 * f + k, d = m.opposite(c), h = CornerMesh::face(d);
      if (placed[h]) continue;
      // the side of c runs tail -> tip; in face h the same side runs back
      const Eigen::Vector3d& T = corner_pos[CornerMesh::next(c)];
      const Eigen::Vector3d& U = corner_pos[CornerMesh::prev(c)];
      const Pyramid& py = g.pyramids[h];
      const int kd = d % 3;
      const Eigen::Vector3d& Tl = py.base[(kd + 2) % 3];  // tip of d is the tail of c
      const Eigen::Vector3d& Ul = py.base[(kd + 1) % 3];
      Frame F, L;
      if (flat) {
        F = frame_of(T, U, corner_pos[c]);
        L = frame_of(Tl, Ul, py.base[kd]);
        if (g.theta[c] >= M_PI / 2) F.axes.rightCols<2>() *= -1;  // unfold rather than fold over
      } else {
        F = frame_of(T, U, apex);
        L = frame_of(Tl, Ul, py.apex);
      }
      const Eigen::Matrix3d R = F.axes * L.axes.transpose();
      for (int j = 0; j < 3; ++j) corner_pos[3 * h + j] = F.origin + R * (py.base[j] - L.origin);
      placed[h] = 1;
      queue.push_back(h);
    }
  }

  EmbeddedPolytope E;
  const int nv = m.num_vertices();
  E.vertices.assign(nv, Eigen::Vector3d::Zero());
  std::vector<int> count(nv, 0);
  for (int c = 0; c < m.num_corners(); ++c) {
    E.vertices[m.vertex(c)] += corner_pos[c];
    ++count[m.vertex(c)];
  }
  for (int v = 0; v < nv; ++v) E.vertices[v] /= count[v];
  for (int c = 0; c < m.num_corners(); ++c)
    E.closure_residual = std::max(E.closure_residual, (corner_pos[c] - E.vertices[m.vertex(c)]).norm());
  E.apex = apex;
  E.flat_layout = flat;
  E.diameter = diameter(E.vertices);
  if (E.closure_residual > opt.closure_tol * E.diameter)
    throw EmbedError(fmt::format("faces do not close up: residual {} for diameter {}", E.closure_residual, E.diameter));

  if (opt.polish) polish_lengths(m, E.vertices);
  for (int c : m.edges())
    E.max_edge_error =
        std::max(E.max_edge_error, std::abs((E.vertices[m.tail(c)] - E.vertices[m.tip(c)]).norm() - m.length(c)));

  for (int f = 0; f < nf; ++f) E.triangles.push_back({m.vertex(3 * f), m.vertex(3 * f + 1), m.vertex(3 * f + 2)});
  std::vector<char> merged(m.num_corners(), 0);
  for (int c = 0; c < m.num_corners(); ++c) merged[c] = std::abs(M_PI - g.theta[c]) <= opt.merge_tol;
  for (const auto& cycle : region_boundaries(m, merged)) {
    std::vector<int> poly;
    for (int c : cycle) poly.push_back(m.tail(c));
    E.faces.push_back(std::move(poly));
  }

  for (const auto& t : E.triangles)
    E.volume += E.vertices[t[0]].dot(E.vertices[t[1]].cross(E.vertices[t[2]])) / 6.0;
  E.degenerate = E.volume <= opt.degenerate_volume * std::pow(E.diameter, 3);
  if (!E.degenerate) {
    for (const auto& t : E.triangles) {
      const Eigen::Vector3d n = (E.vertices[t[1]] - E.vertices[t[0]]).cross(E.vertices[t[2]] - E.vertices[t[0]]);
      if (n.norm() <= 1e-12 * E.diameter * E.diameter) continue;
      const Eigen::Vector3d u = n.normalized();
      for (const auto& p : E.vertices)
        E.convexity_violation = std::max(E.convexity_violation, u.dot(p - E.vertices[t[0]]));
    }
  }
  return E;
}

ApexSolution solve_apex(const std::vector<Eigen::Vector3d>& pts, const Eigen::VectorXd& w) {
  ApexSolution s;
  const double wsum = w.sum();
  const double target = 1e-9 * wsum;
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < pts.size(); ++i) a += w[i] * pts[i];
  a /= wsum;
  double scale = 0;
  for (const auto& p : pts) scale = std::max(scale, (p - a).norm());

  auto gradient = [&](const Eigen::Vector3d& x, Eigen::Matrix3d* H) {
    Eigen::Vector3d gsum = Eigen::Vector3d::Zero();
    if (H) H->setZero();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Eigen::Vector3d d = pts[i] - x;
      const double len = std::max(d.norm(), 1e-300);
      const Eigen::Vector3d u = d / len;
      gsum += w[i] * u;
      if (H) *H += w[i] / len * (Eigen::Matrix3d::Identity() - u * u.transpose());
    }
    return gsum;
  };

  constexpr int kMaxIter = 10000;
  for (; s.iterations < kMaxIter; ++s.iterations) {
    s.residual = gradient(a, nullptr).norm();
    if (s.residual <= target) break;
    // hand over to Newton once the iterate is close
    if (s.residual <= 1e-4 * wsum) {
      Eigen::Matrix3d H;
      const Eigen::Vector3d gr = gradient(a, &H);
      const Eigen::Vector3d next = a + H.ldlt().solve(gr);
      if (gradient(next, nullptr).norm() < s.residual) {
        a = next;
        continue;
      }
    }
    Eigen::Vector3d num = Eigen::Vector3d::Zero();
    double den = 0;
    bool at_point = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double len = (pts[i] - a).norm();
      if (len <= 1e-15 * scale) {
        at_point = true;
        break;
      }
      num += w[i] * pts[i] / len;
      den += w[i] / len;
    }
    if (at_point) break;
    a = num / den;
  }
  s.a = a;
  s.residual = gradient(a, nullptr).norm();
  s.converged = s.residual <= target;
  return s;
}

Congruence congruence_check(const std::vector<Eigen::Vector3d>& a, const std::vector<Eigen::Vector3d>& b) {
  const int n = static_cast<int>(a.size());
  if (n == 0 || b.size() != a.size()) throw Error("congruence check needs two point lists of equal size");
  Eigen::Vector3d ca = Eigen::Vector3d::Zero(), cb = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) ca += a[i], cb += b[i];
  ca /= n;
  cb /= n;
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i) C += (a[i] - ca) * (b[i] - cb).transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  auto rms_for = [&](double sign) {
    Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
    D(2, 2) = sign;
    const Eigen::Matrix3d R = svd.matrixV() * D * svd.matrixU().transpose();
    double s = 0;
    for (int i = 0; i < n; ++i) s += (R * (a[i] - ca) - (b[i] - cb)).squaredNorm();
    return std::pair{std::sqrt(s / n), R.determinant() < 0};
  };
  const auto [r1, refl1] = rms_for(1.0);
  const auto [r2, refl2] = rms_for(-1.0);
  return r1 <= r2 ? Congruence{r1, refl1} : Congruence{r2, refl2};
}

void write_obj(std::ostream& os, const EmbeddedPolytope& E, bool merged) {
  os << std::setprecision(17);
  for (const auto& v : E.vertices) os << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  if (merged) {
    for (const auto& f : E.faces) {
      os << 'f';
      for (int v : f) os << ' ' << v + 1;
      os << '\n';
    }
  } else {
    for (const auto& t : E.triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

nlohmann::json to_json(const EmbeddedPolytope& E) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : E.vertices) j["vertices"].push_back({v.x(), v.y(), v.z()});
  j["triangles"] = E.triangles;
  j["faces"] = E.faces;
  j["apex"] = {E.apex.x(), E.apex.y(), E.apex.z()};
  j["closure_residual"] = E.closure_residual;
  j["max_edge_error"] = E.max_edge_error;
  j["volume"] = E.volume;
  j["diameter"] = E.diameter;
  j["degenerate"] = E.degenerate;
  return j;
}

}  // namespace forge
