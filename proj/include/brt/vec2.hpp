#pragma once

#include <cmath>
#include <numbers>

namespace brt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double c) { x *= c; y *= c; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double c, Vec2 a) { return a *= c; }
constexpr Vec2 operator*(Vec2 a, double c) { return a *= c; }
constexpr Vec2 operator/(Vec2 a, double c) { return {a.x / c, a.y / c}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(const Vec2& a) { return a / norm(a); }
/// Rotation by +90 degrees.
constexpr Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

/// Direction of a line with angle `alpha`.
inline Vec2 dir_v(double alpha) { return {std::cos(alpha), std::sin(alpha)}; }
/// Unit normal of a line with angle `alpha`; w = perp(v).
inline Vec2 dir_w(double alpha) { return {-std::sin(alpha), std::cos(alpha)}; }

/// Maps an angle into [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Signed angular difference a - b folded into (-pi, pi].
inline double angle_diff(double a, double b) { return std::remainder(a - b, kTwoPi); }

/// Row-major 2x2 matrix.
struct Mat2 {
  double a00 = 0.0, a01 = 0.0;
  double a10 = 0.0, a11 = 0.0;

  constexpr double det() const { return a00 * a11 - a01 * a10; }
  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

}  // namespace brt
