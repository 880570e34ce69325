#pragma once

#include <array>

namespace forge {

// Angles of a triangle; angle k sits opposite side k.
struct TriangleAngles {
  double alpha = 0, beta = 0, gamma = 0;

  double operator[](int k) const { return k == 0 ? alpha : (k == 1 ? beta : gamma); }
  double sum() const { return alpha + beta + gamma; }
};

// d(angle p)/d(side q), indexed [p][q].
using AngleJacobian = std::array<std::array<double, 3>, 3>;

// Denominators below this raise DegenerateError.
inline constexpr double kMinSine = 1e-10;

// Half-angle (atan2) forms; both throw DegenerateError when the triangle does not exist
// or is flat to within rounding.
TriangleAngles euclidean_angles(double a, double b, double c);
TriangleAngles spherical_angles(double a, double b, double c);

AngleJacobian euclidean_angle_derivatives(double a, double b, double c);
AngleJacobian spherical_angle_derivatives(double a, double b, double c);

// Angle of a planar triangle between the sides adj1 and adj2.
double euclidean_corner_angle(double opposite, double adj1, double adj2);

// Third side of a spherical triangle from two sides and the included angle.
double spherical_third_side(double b, double c, double included);

}  // namespace forge
