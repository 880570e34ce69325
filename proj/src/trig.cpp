#include "forge/trig.hpp"

#include <cmath>
#include <string>

#include "forge/error.hpp"

namespace forge {

namespace {

constexpr double kFlatRel = 1e-14;

std::string sides_str(double a, double b, double c) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) + ")";
}

double half_angle(double num, double den) { return 2.0 * std::atan2(std::sqrt(num), std::sqrt(den)); }

void require_sine(double s, const char* what) {
  if (!(std::abs(s) >= kMinSine)) throw DegenerateError(std::string("vanishing sine in ") + what);
}

}  // namespace

TriangleAngles euclidean_angles(double a, double b, double c) {
  if (!(a > 0 && b > 0 && c > 0)) throw DegenerateError("non-positive side " + sides_str(a, b, c));
  const double s = 0.5 * (a + b + c);
  // s - a etc. written as sums of the two other sides to avoid one subtraction
  const double sa = 0.5 * (b + c - a), sb = 0.5 * (a + c - b), sc = 0.5 * (a + b - c);
  if (sa <= kFlatRel * s || sb <= kFlatRel * s || sc <= kFlatRel * s)
    throw DegenerateError("triangle inequality fails for " + sides_str(a, b, c));
  TriangleAngles t;
  t.alpha = half_angle(sb * sc, s * sa);
  t.beta = half_angle(sa * sc, s * sb);
  t.gamma = half_angle(sa * sb, s * sc);
  return t;
}

TriangleAngles spherical_angles(double a, double b, double c) {
  if (!(a > 0 && b > 0 && c > 0 && a < M_PI && b < M_PI && c < M_PI))
    throw DegenerateError("spherical side out of (0, pi) " + sides_str(a, b, c));
  const double s = 0.5 * (a + b + c);
  const double sa = 0.5 * (b + c - a), sb = 0.5 * (a + c - b), sc = 0.5 * (a + b - c);
  if (sa <= kFlatRel * s || sb <= kFlatRel * s || sc <= kFlatRel * s || s >= M_PI * (1 - kFlatRel))
    throw DegenerateError("spherical triangle does not exist for " + sides_str(a, b, c));
  const double ss = std::sin(s), sA = std::sin(sa), sB = std::sin(sb), sC = std::sin(sc);
  TriangleAngles t;
  t.alpha = half_angle(sB * sC, ss * sA);
  t.beta = half_angle(sA * sC, ss * sB);
  t.gamma = half_angle(sA * sB, ss * sC);
  return t;
}

AngleJacobian euclidean_angle_derivatives(double a, double b, double c) {
  const TriangleAngles t = euclidean_angles(a, b, c);
  const double x[3] = {a, b, c};
  AngleJacobian d{};
  for (int p = 0; p < 3; ++p) {
    const int q = (p + 1) % 3, s = (p + 2) % 3;
    const double sinS = std::sin(t[s]), sinQ = std::sin(t[q]);
    require_sine(sinS, "euclidean angle derivative");
    require_sine(sinQ, "euclidean angle derivative");
    d[p][p] = 1.0 / (x[q] * sinS);
    d[p][q] = -std::cos(t[s]) / sinS / x[q];
    d[p][s] = -std::cos(t[q]) / sinQ / x[s];
  }
  return d;
}

AngleJacobian spherical_angle_derivatives(double a, double b, double c) {
  const TriangleAngles t = spherical_angles(a, b, c);
  const double x[3] = {a, b, c};
  AngleJacobian d{};
  for (int p = 0; p < 3; ++p) {
    const int q = (p + 1) % 3, s = (p + 2) % 3;
    const double sinS = std::sin(t[s]), sinQ = std::sin(t[q]);
    const double sinxq = std::sin(x[q]), sinxs = std::sin(x[s]);
    require_sine(sinS, "spherical angle derivative");
    require_sine(sinQ, "spherical angle derivative");
    require_sine(sinxq, "spherical angle derivative");
    require_sine(sinxs, "spherical angle derivative");
    d[p][p] = 1.0 / (sinxq * sinS);
    d[p][q] = -std::cos(t[s]) / sinS / sinxq;
    d[p][s] = -std::cos(t[q]) / sinQ / sinxs;
  }
  return d;
}

double euclidean_corner_angle(double opposite, double adj1, double adj2) {
  return euclidean_angles(opposite, adj1, adj2).alpha;
}

double spherical_third_side(double b, double c, double included) {
  const double cosa = std::cos(b) * std::cos(c) + std::sin(b) * std::sin(c) * std::cos(included);
  // haversine form keeps precision for small results
  const double hav = std::sin(0.5 * (b - c)) * std::sin(0.5 * (b - c)) +
                     std::sin(b) * std::sin(c) * std::sin(0.5 * included) * std::sin(0.5 * included);
  if (cosa > 0.5) return 2.0 * std::asin(std::sqrt(std::max(0.0, hav)));
  return std::acos(std::max(-1.0, std::min(1.0, cosa)));
}

}  // namespace forge
