#include "forge/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/Dense>

#include "forge/error.hpp"

namespace forge {

namespace {

// Builds a development from oriented triangles over indexed points.
HullDevelopment from_triangles(const std::vector<Eigen::Vector3d>& pts, const std::vector<std::array<int, 3>>& tris) {
  HullDevelopment h;
  h.points = pts;
  std::map<std::pair<int, int>, SideRef> open;
  for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
    std::array<double, 3> s{};
    for (int k = 0; k < 3; ++k) {
      const int a = tris[t][(k + 1) % 3], b = tris[t][(k + 2) % 3];
      s[k] = (pts[a] - pts[b]).norm();
      h.corner_point.push_back(tris[t][k]);
      const auto it = open.find({b, a});
      if (it != open.end()) {
        h.development.gluings.push_back({it->second, {t, k}});
        open.erase(it);
      } else {
        open[{a, b}] = {t, k};
      }
    }
    h.development.sides.push_back(s);
  }
  if (!open.empty()) throw Error("triangle soup is not a closed oriented surface");
  validate_development(h.development);
  return h;
}

}  // namespace

HullDevelopment hull_development(const std::vector<Eigen::Vector3d>& pts, double rel_tol) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw Error("a hull needs at least four points");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= n;
  double scale = 0;
  for (const auto& p : pts) scale = std::max(scale, (p - centroid).norm());
  const double tol = rel_tol * scale;

  // every supporting plane through three points; brute force is fine at these sizes
  std::set<std::vector<int>> seen;
  std::vector<std::array<int, 3>> tris;
  std::vector<char> on_hull(n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        Eigen::Vector3d nrm = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
        if (nrm.norm() <= tol * scale) continue;
        nrm.normalize();
        int above = 0, below = 0;
        std::vector<int> on;
        for (int i = 0; i < n; ++i) {
          const double s = nrm.dot(pts[i] - pts[a]);
          if (s > tol) ++above;
          else if (s < -tol) ++below;
          else on.push_back(i);
        }
        if (above && below) continue;
        if (above) nrm = -nrm;  // outward
        if (!seen.insert(on).second) continue;
        // order the face polygon counter-clockwise around the outward normal
        Eigen::Vector3d fc = Eigen::Vector3d::Zero();
        for (int i : on) fc += pts[i];
        fc /= static_cast<double>(on.size());
        const Eigen::Vector3d e1 = (pts[on[0]] - fc).normalized(), e2 = nrm.cross(e1);
        std::sort(on.begin(), on.end(), [&](int x, int y) {
          return std::atan2((pts[x] - fc).dot(e2), (pts[x] - fc).dot(e1)) <
                 std::atan2((pts[y] - fc).dot(e2), (pts[y] - fc).dot(e1));
        });
        const auto low = std::min_element(on.begin(), on.end());
        std::rotate(on.begin(), low, on.end());
        for (std::size_t k = 1; k + 1 < on.size(); ++k) tris.push_back({on[0], on[k], on[k + 1]});
        for (int i : on) on_hull[i] = 1;
      }
  if (tris.empty()) throw Error("points are coplanar");
  for (int i = 0; i < n; ++i)
    if (!on_hull[i]) throw Error("point " + std::to_string(i) + " is not a hull vertex");
  // a point in the middle of a face polygon would also be rejected by the metric later
  return from_triangles(pts, tris);
}

std::vector<Eigen::Vector3d> metric_vertex_points(const HullDevelopment& h, const PolyhedralMetric& m) {
  std::vector<Eigen::Vector3d> out(m.num_vertices);
  for (int c = 0; c < static_cast<int>(h.corner_point.size()); ++c) out[m.corner_vertex[c]] = h.points[h.corner_point[c]];
  return out;
}

std::vector<Eigen::Vector3d> random_sphere_points(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss;
  std::vector<Eigen::Vector3d> pts;
  while (static_cast<int>(pts.size()) < n) {
    Eigen::Vector3d p(gauss(rng), gauss(rng), gauss(rng));
    if (p.norm() < 1e-6) continue;
    pts.push_back(p.normalized());
  }
  return pts;
}

namespace {

bool well_shaped(const HullDevelopment& h) {
  const auto& pts = h.points;
  const auto& d = h.development;
  for (int t = 0; t < d.num_triangles(); ++t) {
    const Eigen::Vector3d& a = pts[h.corner_point[3 * t]];
    const Eigen::Vector3d& b = pts[h.corner_point[3 * t + 1]];
    const Eigen::Vector3d& c = pts[h.corner_point[3 * t + 2]];
    for (const auto& [p, q, r] : {std::tuple{a, b, c}, std::tuple{b, c, a}, std::tuple{c, a, b}}) {
      const double ang = std::acos(std::clamp((q - p).normalized().dot((r - p).normalized()), -1.0, 1.0));
      if (ang < 2.0 * M_PI / 180) return false;
    }
  }
  // dihedrals well away from flat, so the target has no ambiguous edges
  for (const auto& g : d.gluings) {
    const int t1 = g.first.triangle, t2 = g.second.triangle;
    auto normal = [&](int t) {
      const Eigen::Vector3d& a = pts[h.corner_point[3 * t]];
      return (pts[h.corner_point[3 * t + 1]] - a).cross(pts[h.corner_point[3 * t + 2]] - a).normalized();
    };
    if (normal(t1).dot(normal(t2)) > std::cos(1e-3)) return false;
  }
  return true;
}

}  // namespace

HullDevelopment random_hull(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    try {
      HullDevelopment h = hull_development(random_sphere_points(rng, n));
      if (well_shaped(h)) return h;
    } catch (const Error&) {
    }
  }
  throw Error("could not draw a well-shaped random hull");
}

HullDevelopment regular_tetrahedron(double edge) {
  const double s = edge / std::sqrt(8.0);
  return hull_development({{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}});
}

HullDevelopment cube(double edge) {
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 8; ++i)
    pts.emplace_back(edge * (i & 1), edge * ((i >> 1) & 1), edge * ((i >> 2) & 1));
  return hull_development(pts);
}

HullDevelopment icosphere(int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> pts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : pts) p.normalize();
  std::vector<std::array<int, 3>> tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                          {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                          {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                          {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      pts.push_back((pts[a] + pts[b]).normalized());
      return mid[key] = static_cast<int>(pts.size()) - 1;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& f : tris) {
      const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    tris = std::move(next);
  }
  return from_triangles(pts, tris);
}

Development doubly_covered_polygon(int n, double side) {
  if (n < 3) throw Error("polygon needs at least three sides");
  const double R = side / (2 * std::sin(M_PI / n));
  std::vector<Eigen::Vector3d> pts;
  for (int k = 0; k < n; ++k) pts.emplace_back(R * std::cos(2 * M_PI * k / n), R * std::sin(2 * M_PI * k / n), 0);
  // fan on the top copy, the mirrored fan underneath
  std::vector<std::array<int, 3>> tris;
  for (int k = 1; k + 1 < n; ++k) tris.push_back({0, k, k + 1});
  for (int k = 1; k + 1 < n; ++k) tris.push_back({0, k + 1, k});
  return from_triangles(pts, tris).development;
}

Development offset_polygon_pair(int n, double side) {
  if (n < 3) throw Error("polygon needs at least three sides");
  // boundary of each polygon as 2n points: vertices interleaved with side midpoints
  const double R = side / (2 * std::sin(M_PI / n));
  auto boundary = [&](double phase) {
    std::vector<Eigen::Vector3d> b;
    for (int k = 0; k < n; ++k) {
      const double a0 = phase + 2 * M_PI * k / n, a1 = phase + 2 * M_PI * (k + 1) / n;
      const Eigen::Vector3d v0(R * std::cos(a0), R * std::sin(a0), 0), v1(R * std::cos(a1), R * std::sin(a1), 0);
      b.push_back(v0);
      b.push_back(0.5 * (v0 + v1));
    }
    return b;
  };
  const auto A = boundary(0.0), B = boundary(0.0);
  const int m = 2 * n;
  // polygon A: fan from boundary point 1 (a midpoint); polygon B is the mirror image
  // shifted by one slot, so its vertices sit on the midpoints of A
  Development d;
  std::vector<std::array<int, 3>> fa;
  for (int k = 2; k < m; ++k) fa.push_back({1, k, (k + 1) % m});
  auto add_fan = [&](const std::vector<Eigen::Vector3d>& pts, const std::vector<std::array<int, 3>>& fan,
                     bool mirror) {
    const int base = d.num_triangles();
    for (auto t : fan) {
      if (mirror) std::swap(t[1], t[2]);
      std::array<double, 3> s{};
      for (int k = 0; k < 3; ++k) s[k] = (pts[t[(k + 1) % 3]] - pts[t[(k + 2) % 3]]).norm();
      d.sides.push_back(s);
    }
    return base;
  };
  const int baseA = add_fan(A, fa, false);
  const int baseB = add_fan(B, fa, true);
  // glue interior diagonals of each fan and the boundary between the two polygons
  std::map<std::pair<int, int>, SideRef> openA, openB;
  std::map<int, SideRef> boundaryA, boundaryB;  // keyed by the boundary slot at the start of the side
  auto collect = [&](const std::vector<std::array<int, 3>>& fan, int base, bool mirror,
                     std::map<std::pair<int, int>, SideRef>& open, std::map<int, SideRef>& bnd) {
    for (int t = 0; t < static_cast<int>(fan.size()); ++t) {
      auto tri = fan[t];
      if (mirror) std::swap(tri[1], tri[2]);
      for (int k = 0; k < 3; ++k) {
        const int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
        const SideRef ref{base + t, k};
        const bool is_boundary = (b == (a + 1) % m) || (a == (b + 1) % m);
        if (is_boundary) {
          bnd[mirror ? b : a] = ref;
          continue;
        }
        const auto it = open.find({b, a});
        if (it != open.end()) {
          d.gluings.push_back({it->second, ref});
          open.erase(it);
        } else {
          open[{a, b}] = ref;
        }
      }
    }
  };
  collect(fa, baseA, false, openA, boundaryA);
  collect(fa, baseB, true, openB, boundaryB);
  if (!openA.empty() || !openB.empty()) throw Error("fan diagonals did not pair up");
  // side of A starting at slot s meets the side of B starting at slot s+1
  for (int s = 0; s < m; ++s) d.gluings.push_back({boundaryA.at(s), boundaryB.at((s + 1) % m)});
  validate_development(d);
  return d;
}

}  // namespace forge
