#include "forge/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "forge/error.hpp"

namespace forge {

QFunction interpolate_q(const Eigen::Vector2d& pi, const Eigen::Vector2d& pj, const Eigen::Vector2d& pk, double qi,
                        double qj, double qk) {
  // |p - a|^2 + b = q at three points; differences give a 2x2 system for a
  Eigen::Matrix2d A;
  A.row(0) = 2.0 * (pj - pi).transpose();
  A.row(1) = 2.0 * (pk - pi).transpose();
  const Eigen::Vector2d rhs(pj.squaredNorm() - pi.squaredNorm() - (qj - qi),
                            pk.squaredNorm() - pi.squaredNorm() - (qk - qi));
  const double det = A.determinant();
  const double scale = 4.0 * (pj - pi).norm() * (pk - pi).norm();
  if (!(std::abs(det) > 1e-14 * scale)) throw DegenerateError("interpolating Q-function through collinear points");
  QFunction f;
  f.center = A.inverse() * rhs;
  f.offset = qi - (pi - f.center).squaredNorm();
  return f;
}

double ext_value(const Eigen::Vector2d& pi, const Eigen::Vector2d& pj, const Eigen::Vector2d& pk, double qi,
                 double qj, double qk, const Eigen::Vector2d& target) {
  return interpolate_q(pi, pj, pk, qi, qj, qk)(target);
}

HingeTest hinge_test(const CornerMesh& mesh, int c, const Eigen::VectorXd& q) {
  const QuadDevelopment quad = mesh.develop_quad(c);
  const int d = mesh.opposite(c);
  const double qi = q[mesh.tail(c)];
  const double qj = q[mesh.tip(c)] - qi, qk = q[mesh.vertex(c)] - qi, ql = q[mesh.vertex(d)] - qi;
  HingeTest h;
  h.excess = ql - ext_value(quad.i, quad.j, quad.k, 0.0, qj, qk, quad.l);
  double s = std::max({std::abs(qj), std::abs(qk), std::abs(ql)});
  for (int x : {c, CornerMesh::next(c), CornerMesh::prev(c), CornerMesh::next(d), CornerMesh::prev(d)})
    s = std::max(s, mesh.length(x) * mesh.length(x));
  h.scale = s;
  return h;
}

bool edge_is_bad(const CornerMesh& mesh, int c, const Eigen::VectorXd& q, double tol) {
  const HingeTest h = hinge_test(mesh, c, q);
  return h.excess > tol * h.scale;
}

namespace {

// Interpolant value at the midpoint of the hinge edge before and after flipping.
double midpoint_gain(const CornerMesh& mesh, int c, const Eigen::VectorXd& q) {
  const QuadDevelopment quad = mesh.develop_quad(c);
  const int d = mesh.opposite(c);
  const double qi = q[mesh.tail(c)], qj = q[mesh.tip(c)], qk = q[mesh.vertex(c)], ql = q[mesh.vertex(d)];
  const Eigen::Vector2d mid = 0.5 * (quad.i + quad.j);
  const double before = 0.5 * (qi + qj) - 0.25 * quad.j.squaredNorm();
  // the midpoint lies in kil or in ljk, whichever side of kl holds it
  const double after_a = ext_value(quad.k, quad.i, quad.l, qk, qi, ql, mid);
  const double after_b = ext_value(quad.l, quad.j, quad.k, ql, qj, qk, mid);
  const Eigen::Vector2d kl = quad.l - quad.k;
  auto cross = [&](const Eigen::Vector2d& p) { return kl.x() * (p.y() - quad.k.y()) - kl.y() * (p.x() - quad.k.x()); };
  return (cross(mid) * cross(quad.i) >= 0 ? after_a : after_b) - before;
}

}  // namespace

DelaunayStats weighted_delaunay(CornerMesh& mesh, const Eigen::VectorXd& q, long max_flips, const FlipHook& hook) {
  const long E = mesh.num_edges();
  if (max_flips < 0) max_flips = 100 * E * E;
  DelaunayStats stats;
  std::deque<int> queue;
  auto enqueue_all = [&] {
    for (int c : mesh.edges()) queue.push_back(c);
  };
  enqueue_all();
  while (true) {
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop_front();
      if (!edge_is_bad(mesh, c, q)) continue;
      if (!mesh.can_flip(c))
        throw FlipError(fmt::format("bad edge {}-{} cannot be flipped; weights are not admissible", mesh.tail(c),
                                    mesh.tip(c)));
      if (stats.flips >= max_flips) throw FlipError(fmt::format("exceeded {} flips", max_flips));
      if (midpoint_gain(mesh, c, q) < -1e-9 * hinge_test(mesh, c, q).scale) ++stats.monotonicity_violations;
      if (hook) hook(mesh, c);
      const int d = mesh.opposite(c);
      mesh.flip(c);
      ++stats.flips;
      for (int x : {c, CornerMesh::prev(c), d, CornerMesh::prev(d)}) queue.push_back(x);
    }
    // a final sweep guards against stale queue entries
    bool clean = true;
    for (int c : mesh.edges())
      if (edge_is_bad(mesh, c, q)) {
        clean = false;
        break;
      }
    if (clean) break;
    enqueue_all();
  }
  return stats;
}

std::vector<int> region_of_faces(const CornerMesh& mesh, const std::vector<char>& merged, int* count) {
  const int nf = mesh.num_faces();
  std::vector<int> parent(nf);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int c = 0; c < mesh.num_corners(); ++c)
    if (merged[c]) {
      const int a = find(CornerMesh::face(c)), b = find(CornerMesh::face(mesh.opposite(c)));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<int> id(nf, -1), region(nf);
  int n = 0;
  for (int f = 0; f < nf; ++f) {
    const int r = find(f);
    if (id[r] < 0) id[r] = n++;
    region[f] = id[r];
  }
  if (count) *count = n;
  return region;
}

std::vector<std::vector<int>> region_boundaries(const CornerMesh& mesh, const std::vector<char>& merged) {
  std::vector<char> used(mesh.num_corners(), 0);
  std::vector<std::vector<int>> cycles;
  for (int s = 0; s < mesh.num_corners(); ++s) {
    if (merged[s] || used[s]) continue;
    std::vector<int> cycle;
    int x = s;
    do {
      used[x] = 1;
      cycle.push_back(x);
      // next boundary side starts where x ends: rotate around that vertex across merged edges
      int cand = CornerMesh::next(x);
      int guard = 0;
      while (merged[cand] && guard++ <= mesh.num_corners()) cand = CornerMesh::next(mesh.opposite(cand));
      x = cand;
    } while (x != s && static_cast<int>(cycle.size()) <= mesh.num_corners());
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

Tesselation canonical_tesselation(const CornerMesh& mesh, const Eigen::VectorXd& q, double tol) {
  Tesselation t;
  t.inessential.assign(mesh.num_corners(), 0);
  for (int c : mesh.edges()) {
    const HingeTest h = hinge_test(mesh, c, q);
    if (std::abs(h.excess) <= tol * h.scale) t.inessential[c] = t.inessential[mesh.opposite(c)] = 1;
  }
  region_of_faces(mesh, t.inessential, &t.num_regions);

  // lengths recomputed through different flips differ in the last bits, so they only break
  // ties between equal vertex sequences and are compared with a tolerance
  struct Cycle {
    std::vector<int> v;
    std::vector<double> len;
  };
  auto less = [](const Cycle& a, const Cycle& b) {
    if (a.v != b.v) return a.v < b.v;
    for (std::size_t i = 0; i < a.len.size() && i < b.len.size(); ++i)
      if (std::abs(a.len[i] - b.len[i]) > 1e-9 * std::max(a.len[i], b.len[i])) return a.len[i] < b.len[i];
    return a.len.size() < b.len.size();
  };
  std::vector<Cycle> cycles;
  for (const auto& walk : region_boundaries(mesh, t.inessential)) {
    Cycle seq;
    for (int c : walk) {
      seq.v.push_back(mesh.tail(c));
      seq.len.push_back(mesh.length(c));
    }
    // least rotation makes the cycle independent of where the walk started
    Cycle best = seq;
    for (std::size_t r = 1; r < seq.v.size(); ++r) {
      Cycle rot = seq;
      std::rotate(rot.v.begin(), rot.v.begin() + r, rot.v.end());
      std::rotate(rot.len.begin(), rot.len.begin() + r, rot.len.end());
      if (less(rot, best)) best = std::move(rot);
    }
    cycles.push_back(std::move(best));
  }
  std::sort(cycles.begin(), cycles.end(), less);
  t.canonical = fmt::format("regions={};", t.num_regions);
  for (const Cycle& c : cycles) {
    t.canonical += "(";
    for (int v : c.v) t.canonical += fmt::format("{} ", v);
    t.canonical += ")";
    t.boundary_lengths.push_back(c.len);
  }
  return t;
}

bool same_tesselation(const Tesselation& a, const Tesselation& b, double rel_tol) {
  if (a.canonical != b.canonical || a.boundary_lengths.size() != b.boundary_lengths.size()) return false;
  for (std::size_t k = 0; k < a.boundary_lengths.size(); ++k) {
    const auto& x = a.boundary_lengths[k];
    const auto& y = b.boundary_lengths[k];
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::abs(x[i] - y[i]) > rel_tol * std::max(x[i], y[i])) return false;
  }
  return true;
}

}  // namespace forge
