#include "forge/mesh.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "forge/error.hpp"
#include "forge/trig.hpp"

namespace forge {

CornerMesh CornerMesh::from_metric(const PolyhedralMetric& m) {
  const Development& d = m.development;
  CornerMesh mesh;
  mesh.nv_ = m.num_vertices;
  const int nc = 3 * d.num_triangles();
  mesh.vertex_ = m.corner_vertex;
  mesh.length_.resize(nc);
  mesh.opp_.assign(nc, -1);
  for (int c = 0; c < nc; ++c) mesh.length_[c] = d.sides[c / 3][c % 3];
  for (const auto& g : d.gluings) {
    const int a = 3 * g.first.triangle + g.first.side, b = 3 * g.second.triangle + g.second.side;
    mesh.opp_[a] = b;
    mesh.opp_[b] = a;
  }
  mesh.check_invariants();
  return mesh;
}

std::vector<int> CornerMesh::edges() const {
  std::vector<int> out;
  out.reserve(num_edges());
  for (int c = 0; c < num_corners(); ++c)
    if (is_edge_rep(c)) out.push_back(c);
  return out;
}

double CornerMesh::corner_angle(int c) const {
  return euclidean_corner_angle(length_[c], length_[next(c)], length_[prev(c)]);
}

double CornerMesh::circumradius(int f) const {
  const int c = 3 * f;
  return length_[c] / (2.0 * std::sin(corner_angle(c)));
}

namespace {

// Third vertex above the segment (0,0)-(base,0) at distances da from the origin and db from the other end.
Eigen::Vector2d apex_above(double base, double da, double db) {
  const double ang = euclidean_corner_angle(db, da, base);
  return {da * std::cos(ang), da * std::sin(ang)};
}

}  // namespace

QuadDevelopment CornerMesh::develop_quad(int c) const {
  const int d = opp_[c];
  QuadDevelopment q;
  const double l = length_[c];
  q.i = {0, 0};
  q.j = {l, 0};
  q.k = apex_above(l, length_[prev(c)], length_[next(c)]);
  Eigen::Vector2d lp = apex_above(l, length_[next(d)], length_[prev(d)]);
  q.l = {lp.x(), -lp.y()};
  q.face_k = face(c);
  q.face_l = face(d);
  q.angle_i = corner_angle(next(c)) + corner_angle(prev(d));
  q.angle_j = corner_angle(prev(c)) + corner_angle(next(d));
  return q;
}

bool CornerMesh::can_flip(int c, double tol) const {
  const int d = opp_[c];
  if (face(c) == face(d)) return false;
  return develop_quad(c).strictly_convex(tol);
}

double CornerMesh::flip(int c, double tol) {
  const int d = opp_[c];
  if (face(c) == face(d)) throw FlipError(fmt::format("edge at corner {} bounds one face on both sides", c));
  const QuadDevelopment q = develop_quad(c);
  if (!q.strictly_convex(tol))
    throw FlipError(fmt::format("edge at corner {} has a non-convex hinge (angles {}, {})", c, q.angle_i, q.angle_j));
  const double new_len = (q.k - q.l).norm();

  const int nc = next(c), pc = prev(c), nd = next(d), pd = prev(d);
  const int k = vertex_[c], i = vertex_[nc], j = vertex_[pc], l = vertex_[d];
  // outer sides, named by the old corner facing them: nc~jk, pc~ki, nd~il, pd~lj
  const double len_jk = length_[nc], len_ki = length_[pc], len_il = length_[nd], len_lj = length_[pd];
  const int oA = opp_[nc], oB = opp_[pc], oC = opp_[nd], oD = opp_[pd];
  // an outer side may be glued to another outer side of the same hinge
  auto moved = [&](int x) {
    if (x == nc) return d;
    if (x == nd) return c;
    return x;  // pc and pd keep their slots
  };

  vertex_[c] = k, vertex_[nc] = i, vertex_[pc] = l;
  vertex_[d] = l, vertex_[nd] = j, vertex_[pd] = k;
  length_[c] = len_il, length_[nc] = new_len, length_[pc] = len_ki;
  length_[d] = len_jk, length_[nd] = new_len, length_[pd] = len_lj;

  const int tA = moved(oA), tB = moved(oB), tC = moved(oC), tD = moved(oD);
  opp_[c] = tC, opp_[tC] = c;
  opp_[pc] = tB, opp_[tB] = pc;
  opp_[d] = tA, opp_[tA] = d;
  opp_[pd] = tD, opp_[tD] = pd;
  opp_[nc] = nd, opp_[nd] = nc;
  return new_len;
}

std::vector<int> CornerMesh::corners_around(int v) const {
  int start = -1;
  for (int c = 0; c < num_corners() && start < 0; ++c)
    if (vertex_[c] == v) start = c;
  std::vector<int> out;
  if (start < 0) return out;
  int x = start;
  do {
    out.push_back(x);
    x = next(opp_[next(x)]);
  } while (x != start && static_cast<int>(out.size()) <= num_corners());
  return out;
}

std::vector<std::vector<int>> CornerMesh::corners_by_vertex() const {
  std::vector<int> first(nv_, -1);
  for (int c = num_corners() - 1; c >= 0; --c) first[vertex_[c]] = c;
  std::vector<std::vector<int>> out(nv_);
  for (int v = 0; v < nv_; ++v) {
    int x = first[v];
    if (x < 0) continue;
    do {
      out[v].push_back(x);
      x = next(opp_[next(x)]);
    } while (x != first[v] && static_cast<int>(out[v].size()) <= num_corners());
  }
  return out;
}

void CornerMesh::check_invariants() const {
  const int n = num_corners();
  if (n % 3 != 0 || static_cast<int>(length_.size()) != n || static_cast<int>(opp_.size()) != n)
    throw Error("corner arrays have inconsistent sizes");
  for (int c = 0; c < n; ++c) {
    const int d = opp_[c];
    if (d < 0 || d >= n || d == c || opp_[d] != c) throw Error(fmt::format("corner {}: opposite is not an involution", c));
    if (tail(c) != tip(d) || tip(c) != tail(d))
      throw Error(fmt::format("corner {}: glued sides disagree on their endpoints", c));
    if (std::abs(length_[c] - length_[d]) > 1e-12 * length_[c])
      throw Error(fmt::format("corner {}: glued sides have different lengths", c));
    if (vertex_[c] < 0 || vertex_[c] >= nv_) throw Error(fmt::format("corner {}: vertex out of range", c));
  }
  // every corner of a vertex must be reached by walking around it
  const auto rings = corners_by_vertex();
  int total = 0;
  for (const auto& r : rings) total += static_cast<int>(r.size());
  if (total != n) throw Error("vertex links are not single cycles");
}

nlohmann::json CornerMesh::to_json() const {
  nlohmann::json j;
  j["num_vertices"] = nv_;
  j["faces"] = nlohmann::json::array();
  for (int f = 0; f < num_faces(); ++f) {
    nlohmann::json face;
    face["vertices"] = {vertex_[3 * f], vertex_[3 * f + 1], vertex_[3 * f + 2]};
    face["lengths"] = {length_[3 * f], length_[3 * f + 1], length_[3 * f + 2]};
    face["opposite"] = {opp_[3 * f], opp_[3 * f + 1], opp_[3 * f + 2]};
    j["faces"].push_back(face);
  }
  return j;
}

std::vector<std::array<long long, 6>> CornerMesh::signature(double quantum) const {
  std::vector<std::array<long long, 6>> out;
  for (int f = 0; f < num_faces(); ++f) {
    std::array<long long, 6> best{};
    for (int r = 0; r < 3; ++r) {
      std::array<long long, 6> s{};
      for (int k = 0; k < 3; ++k) {
        const int c = 3 * f + (r + k) % 3;
        s[2 * k] = vertex_[c];
        s[2 * k + 1] = std::llround(length_[c] / quantum);
      }
      if (r == 0 || s < best) best = s;
    }
    out.push_back(best);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace forge
