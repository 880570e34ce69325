#include "forge/surface.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "forge/error.hpp"
#include "forge/trig.hpp"

namespace forge {

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error([&] {
        std::string msg = "validation failed:";
        for (const auto& s : issues) msg += "\n  " + s;
        return msg;
      }()),
      issues_(std::move(issues)) {}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // keeps the smaller index as root so roots are the smallest corners
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
};

SideRef side_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ParseError("gluing endpoint must be [triangle, side]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

Development development_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("development must be a JSON object");
  if (!j.contains("triangles") || !j["triangles"].is_array()) throw ParseError("missing array 'triangles'");
  if (!j.contains("gluings") || !j["gluings"].is_array()) throw ParseError("missing array 'gluings'");
  Development d;
  for (const auto& t : j["triangles"]) {
    const nlohmann::json* s = &t;
    if (t.is_object()) {
      if (!t.contains("sides")) throw ParseError("triangle object needs 'sides'");
      s = &t["sides"];
    }
    if (!s->is_array() || s->size() != 3) throw ParseError("triangle needs exactly three sides");
    std::array<double, 3> sides{};
    for (int k = 0; k < 3; ++k) {
      if (!(*s)[k].is_number()) throw ParseError("side length must be a number");
      sides[k] = (*s)[k].get<double>();
    }
    d.sides.push_back(sides);
  }
  for (const auto& g : j["gluings"]) {
    if (!g.is_array() || g.size() != 2) throw ParseError("gluing must be a pair [[t,s],[t',s']]");
    d.gluings.push_back({side_from_json(g[0]), side_from_json(g[1])});
  }
  validate_development(d);
  return d;
}

Development parse_development(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return development_from_json(j);
}

nlohmann::json to_json(const Development& d) {
  nlohmann::json j;
  j["triangles"] = nlohmann::json::array();
  for (const auto& s : d.sides) j["triangles"].push_back({{"sides", {s[0], s[1], s[2]}}});
  j["gluings"] = nlohmann::json::array();
  for (const auto& g : d.gluings)
    j["gluings"].push_back({{g.first.triangle, g.first.side}, {g.second.triangle, g.second.side}});
  return j;
}

void validate_development(Development& d) {
  std::vector<std::string> issues;
  const int nt = d.num_triangles();
  if (nt == 0) issues.push_back("no triangles");
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k)
      if (!(d.sides[t][k] > 0) || !std::isfinite(d.sides[t][k]))
        issues.push_back(fmt::format("triangle {} side {}: length must be positive and finite", t, k));

  std::vector<int> seen(3 * nt, 0);
  auto in_range = [&](SideRef s) { return s.triangle >= 0 && s.triangle < nt && s.side >= 0 && s.side < 3; };
  for (std::size_t g = 0; g < d.gluings.size(); ++g) {
    const auto [a, b] = d.gluings[g];
    if (!in_range(a) || !in_range(b)) {
      issues.push_back(fmt::format("gluing {}: side reference out of range", g));
      continue;
    }
    if (a == b) {
      issues.push_back(fmt::format("gluing {}: side ({},{}) glued to itself", g, a.triangle, a.side));
      continue;
    }
    ++seen[3 * a.triangle + a.side];
    ++seen[3 * b.triangle + b.side];
    double& la = d.sides[a.triangle][a.side];
    double& lb = d.sides[b.triangle][b.side];
    if (std::abs(la - lb) > kGluedLengthTol * std::max(la, lb)) {
      issues.push_back(fmt::format("gluing {}: lengths {} and {} differ", g, la, lb));
    } else {
      const double m = 0.5 * (la + lb);
      la = lb = m;
    }
  }
  for (int c = 0; c < 3 * nt; ++c)
    if (seen[c] != 1)
      issues.push_back(fmt::format("side ({},{}) appears in {} gluings, expected 1", c / 3, c % 3, seen[c]));

  for (int t = 0; t < nt; ++t) {
    const auto& s = d.sides[t];
    if (!(s[0] > 0 && s[1] > 0 && s[2] > 0)) continue;
    try {
      euclidean_angles(s[0], s[1], s[2]);
    } catch (const DegenerateError&) {
      issues.push_back(fmt::format("triangle {}: sides ({}, {}, {}) violate the strict triangle inequality", t,
                                   s[0], s[1], s[2]));
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

double PolyhedralMetric::total_deficit() const { return std::accumulate(deficit.begin(), deficit.end(), 0.0); }

PolyhedralMetric build_metric(Development d) {
  validate_development(d);
  const int nt = d.num_triangles();
  UnionFind uf(3 * nt);
  for (const auto& g : d.gluings) {
    const int t = g.first.triangle, s = g.first.side, u = g.second.triangle, r = g.second.side;
    // reversed orientation: start of one side meets end of the other
    uf.unite(3 * t + (s + 1) % 3, 3 * u + (r + 2) % 3);
    uf.unite(3 * t + (s + 2) % 3, 3 * u + (r + 1) % 3);
  }

  PolyhedralMetric m;
  m.num_faces = nt;
  m.num_edges = static_cast<int>(d.gluings.size());
  m.corner_vertex.assign(3 * nt, -1);
  std::map<int, int> root_index;  // root corner is the smallest corner of its orbit
  for (int c = 0; c < 3 * nt; ++c) {
    const int root = uf.find(c);
    auto [it, inserted] = root_index.emplace(root, static_cast<int>(root_index.size()));
    if (inserted) m.vertex_label.push_back({root / 3, root % 3});
    m.corner_vertex[c] = it->second;
  }
  m.num_vertices = static_cast<int>(root_index.size());
  m.cone_angle.assign(m.num_vertices, 0.0);
  for (int t = 0; t < nt; ++t) {
    const auto& s = d.sides[t];
    const TriangleAngles a = euclidean_angles(s[0], s[1], s[2]);
    for (int k = 0; k < 3; ++k) m.cone_angle[m.corner_vertex[3 * t + k]] += a[k];
  }
  m.deficit.resize(m.num_vertices);
  for (int v = 0; v < m.num_vertices; ++v) m.deficit[v] = 2 * M_PI - m.cone_angle[v];

  std::vector<std::string> issues;
  if (m.euler_characteristic() != 2)
    issues.push_back(fmt::format("surface is not a sphere: V - E + F = {} - {} + {} = {}", m.num_vertices,
                                 m.num_edges, m.num_faces, m.euler_characteristic()));
  for (int v = 0; v < m.num_vertices; ++v) {
    const auto lab = m.vertex_label[v];
    if (!(m.deficit[v] > 0))
      issues.push_back(fmt::format("vertex {} (triangle {}, corner {}): cone angle {} >= 2pi, deficit {} not positive",
                                   v, lab.triangle, lab.side, m.cone_angle[v], m.deficit[v]));
    else if (!(m.deficit[v] < 2 * M_PI))
      issues.push_back(fmt::format("vertex {} (triangle {}, corner {}): deficit {} >= 2pi", v, lab.triangle,
                                   lab.side, m.deficit[v]));
  }
  if (issues.empty() && std::abs(m.total_deficit() - 4 * M_PI) > kGaussBonnetTol)
    issues.push_back(fmt::format("total deficit {} differs from 4pi", m.total_deficit()));
  if (!issues.empty()) throw ValidationError(std::move(issues));
  m.development = std::move(d);
  return m;
}

}  // namespace forge
