#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace forge {

// A side of a development triangle. Side k is opposite corner k and runs
// from corner k+1 to corner k+2 (mod 3).
struct SideRef {
  int triangle = 0;
  int side = 0;
  auto operator<=>(const SideRef&) const = default;
};

struct Gluing {
  SideRef first, second;
};

// Planar triangles and a pairing of their sides. Gluings reverse orientation.
struct Development {
  std::vector<std::array<double, 3>> sides;
  std::vector<Gluing> gluings;

  int num_triangles() const { return static_cast<int>(sides.size()); }
};

// Relative tolerance for matching lengths of glued sides.
inline constexpr double kGluedLengthTol = 1e-12;
inline constexpr double kGaussBonnetTol = 1e-9;

// Parsing raises ParseError for malformed JSON or wrong shape, ValidationError for
// contract violations. Glued side lengths are snapped to their mean.
Development parse_development(std::string_view json_text);
Development development_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Development& d);

// Checks the gluing structure, length matches and triangle inequalities; snaps lengths.
void validate_development(Development& d);

struct PolyhedralMetric {
  Development development;
  int num_vertices = 0;
  int num_edges = 0;
  int num_faces = 0;
  // vertex index of corner 3*t + k; vertices are ordered by their smallest corner
  std::vector<int> corner_vertex;
  std::vector<SideRef> vertex_label;  // smallest (triangle, corner) of each vertex
  std::vector<double> cone_angle;
  std::vector<double> deficit;

  int euler_characteristic() const { return num_vertices - num_edges + num_faces; }
  double total_deficit() const;
};

// Raises ValidationError naming every bad vertex when the metric is not a convex sphere.
PolyhedralMetric build_metric(Development d);

}  // namespace forge
