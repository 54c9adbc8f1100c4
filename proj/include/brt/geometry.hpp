#pragma once

// Reflecting boundaries and the specular reflection map on line coordinates.
//
// A directed line is stored as (s, alpha): the set {x : <x, w(alpha)> = s}
// traversed along v(alpha), with v = (cos a, sin a) and w = (-sin a, cos a).
// Closed boundaries are negatively oriented (clockwise) and parametrized by
// arc length, so the outward normal is n = perp(tangent) = (-y', x') and the
// signed curvature satisfies gamma'' = kappa * n (kappa < 0 on convex parts).

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "brt/vec2.hpp"

namespace brt {

/// Rays with |cos(beta)| below this are rejected as grazing.
inline constexpr double kGrazingCos = 0.05;

struct LineCoords {
  double s = 0.0;
  double alpha = 0.0;  ///< kept in [0, 2pi)

  LineCoords() = default;
  LineCoords(double s_, double alpha_) : s(s_), alpha(wrap_angle(alpha_)) {}

  Vec2 v() const { return dir_v(alpha); }
  Vec2 w() const { return dir_w(alpha); }
  /// Same set traversed in the opposite direction.
  LineCoords reversed() const { return {-s, alpha + kPi}; }
  /// Line through `p` with direction v(alpha).
  static LineCoords through(const Vec2& p, double alpha) { return {dot(p, dir_w(alpha)), alpha}; }
};

/// Point, unit tangent, unit outward normal and signed curvature at one parameter.
struct Frame {
  Vec2 point;
  Vec2 tangent;
  Vec2 normal;
  double curvature = 0.0;
};

struct Circle {
  double radius = 1.0;
};

struct Ellipse {
  double a = 1.0;  ///< semi-axis along x
  double b = 1.0;  ///< semi-axis along y
};

/// Downward-opening parabola -4 a y = x^2 truncated to |x| <= extent.
/// Traversed with x increasing, so the focus (0, -a) lies on the inner side.
struct Parabola {
  double focal = 1.0;
  double extent = 4.0;
};

class ArcLengthTable;

/// Closed curve through sampled vertices, interpolated by a periodic cubic spline.
struct SampledCurve {
  std::vector<Vec2> vertices;
};

/// A reflecting curve with arc-length parametrization.
///
/// Immutable after construction and safe to share between threads.
class Boundary {
 public:
  using Shape = std::variant<Circle, Ellipse, Parabola, SampledCurve>;

  static Boundary circle(double radius);
  static Boundary ellipse(double a, double b);
  static Boundary parabola(double focal, double extent);
  /// Vertices are closed implicitly; orientation is normalized to clockwise.
  static Boundary sampled(std::vector<Vec2> vertices);

  const Shape& shape() const { return shape_; }
  bool closed() const;
  /// Parameter interval [tau_min, tau_max]; closed curves use [0, length).
  double tau_min() const { return tau_min_; }
  double tau_max() const { return tau_max_; }
  double length() const { return tau_max_ - tau_min_; }

  /// Frame at arc length `tau`. Closed curves wrap periodically; open curves
  /// throw ParameterOutOfRange outside [tau_min, tau_max].
  Frame evaluate(double tau) const;

  /// True when `p` is strictly inside the reflecting domain.
  bool contains(const Vec2& p) const;
  /// Unsigned distance from `p` to the curve.
  double distance(const Vec2& p) const;
  /// Radius of a centered disk enclosing the curve.
  double bounding_radius() const { return bounding_radius_; }
  /// Dense polyline approximation (closed curves: first point not repeated).
  const std::vector<Vec2>& polyline() const { return polyline_; }

  /// Arc length of the curve point nearest to a point known to lie on it.
  double locate(const Vec2& on_curve) const;

 private:
  explicit Boundary(Shape shape);
  void finish();

  Shape shape_;
  std::shared_ptr<const ArcLengthTable> arc_;
  double tau_min_ = 0.0;
  double tau_max_ = 0.0;
  double bounding_radius_ = 0.0;
  std::vector<Vec2> polyline_;
  std::vector<double> polyline_tau_;
};

/// First transversal hit of a ray with the boundary.
struct RayHit {
  double tau = 0.0;
  double t = 0.0;  ///< distance along the ray from the start point
  Frame frame;
};

/// Where the ray from `from` (projected onto `line`) first leaves the domain,
/// i.e. the first hit ahead with <v, n> > 0. Throws NoIntersection or
/// GrazingIncidence (|cos beta| < kGrazingCos).
RayHit intersect_ray(const Boundary& boundary, const LineCoords& line, const Vec2& from);

/// Same contract as intersect_ray but always uses the bracketing scan
/// (256 arc-length samples, then bisection and Newton). Closed forms for
/// circle, ellipse and parabola are validated against this path.
RayHit intersect_ray_numeric(const Boundary& boundary, const LineCoords& line, const Vec2& from);

struct ReflectionEvent {
  double tau0 = 0.0;
  double beta = 0.0;  ///< incidence angle in (-pi/2, pi/2); sin(beta) = <v1, tangent>
  LineCoords line_in;
  LineCoords line_out;
  Vec2 hit_point;
  Frame frame;  ///< boundary frame at the hit
  /// d(s2, alpha2) / d(s1, alpha1), rows (s2, alpha2), columns (s1, alpha1).
  Mat2 jacobian;
};

/// Specular reflection: alpha2 = alpha1 + 2 beta + pi, s2 = <gamma(tau0), w(alpha2)>.
ReflectionEvent reflect(const Boundary& boundary, const LineCoords& line_in, const Vec2& from);

/// Reflection of the full line `line_in` at its exit point; the map chi.
ReflectionEvent reflect_line(const Boundary& boundary, const LineCoords& line_in);

/// Analytic Jacobian of chi at the event's hit. Throws GrazingIncidence when
/// <w(alpha1), tangent> is too small.
Mat2 reflection_jacobian(const ReflectionEvent& event);

}  // namespace brt
