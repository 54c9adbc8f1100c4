#pragma once

// Independent oracles shared by the unit tests and the acceptance binary.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "brt/conjugate.hpp"
#include "brt/errors.hpp"
#include "brt/geometry.hpp"

namespace brt::testing {

/// Smooth convex test curve r(theta) = 1 + 0.08 cos(3 theta), sampled.
inline Boundary generic_curve(int vertices = 256) {
  std::vector<Vec2> pts;
  for (int i = 0; i < vertices; ++i) {
    const double th = kTwoPi * i / vertices;
    const double r = 1.0 + 0.08 * std::cos(3.0 * th);
    pts.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return Boundary::sampled(std::move(pts));
}

inline std::vector<Boundary> all_boundaries() {
  return {Boundary::circle(1.0), Boundary::ellipse(2.0, 1.0), Boundary::parabola(1.0, 4.0), generic_curve()};
}

inline const char* boundary_name(const Boundary& b) {
  switch (b.shape().index()) {
    case 0: return "circle";
    case 1: return "ellipse";
    case 2: return "parabola";
    default: return "generic";
  }
}

/// A random point strictly inside the reflecting domain.
inline Vec2 random_inside(const Boundary& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double r = b.closed() ? b.bounding_radius() : 2.0;
  for (;;) {
    Vec2 p{r * u(rng), b.closed() ? r * u(rng) : -0.2 - 2.5 * (u(rng) + 1.0)};
    if (b.contains(p) && b.distance(p) > 0.05) return p;
  }
}

/// A random admissible reflection of a ray from an interior point.
inline std::pair<Vec2, ReflectionEvent> random_event(const Boundary& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (;;) {
    const Vec2 p = random_inside(b, rng);
    const double a = ang(rng);
    try {
      const auto ev = reflect(b, LineCoords::through(p, a), p);
      if (std::abs(std::cos(ev.beta)) < 0.1) continue;  // keep away from the grazing cutoff for differencing
      return {p, ev};
    } catch (const Error&) {
    }
  }
}

/// chi by differencing: reflect the perturbed line from the same source side.
inline std::optional<Mat2> finite_difference_jacobian(const Boundary& b, const ReflectionEvent& ev, const Vec2& from,
                                                      double h = 1e-5) {
  const auto chi = [&](double s, double a) -> std::optional<LineCoords> {
    const LineCoords line(s, a);
    // Project the source onto the perturbed line so the start point moves smoothly.
    const Vec2 start = from + (s - dot(from, line.w())) * line.w();
    try {
      return reflect(b, line, start).line_out;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  const double s = ev.line_in.s, a = ev.line_in.alpha;
  const auto sp = chi(s + h, a), sm = chi(s - h, a), ap = chi(s, a + h), am = chi(s, a - h);
  if (!sp || !sm || !ap || !am) return std::nullopt;
  Mat2 j;
  j.a00 = (sp->s - sm->s) / (2 * h);
  j.a10 = angle_diff(sp->alpha, sm->alpha) / (2 * h);
  j.a01 = (ap->s - am->s) / (2 * h);
  j.a11 = angle_diff(ap->alpha, am->alpha) / (2 * h);
  return j;
}

inline double matrix_relative_error(const Mat2& a, const Mat2& b) {
  const double d = std::hypot(std::hypot(a.a00 - b.a00, a.a01 - b.a01), std::hypot(a.a10 - b.a10, a.a11 - b.a11));
  const double n = std::hypot(std::hypot(b.a00, b.a01), std::hypot(b.a10, b.a11));
  return d / n;
}

/// Intersection of two lines given by point and direction; nullopt if parallel.
inline std::optional<Vec2> line_intersection(const Vec2& p1, const Vec2& d1, const Vec2& p2, const Vec2& d2) {
  const double den = cross(d1, d2);
  if (std::abs(den) < 1e-14) return std::nullopt;
  const double t = cross(p2 - p1, d2) / den;
  return p1 + t * d1;
}

/// Two-ray envelope: reflected rays of directions alpha and alpha + dalpha from p.
inline std::optional<Vec2> envelope_point(const Boundary& b, const Vec2& p, double alpha, double dalpha = 1e-4) {
  try {
    const auto e1 = reflect(b, LineCoords::through(p, alpha - 0.5 * dalpha), p);
    const auto e2 = reflect(b, LineCoords::through(p, alpha + 0.5 * dalpha), p);
    return line_intersection(e1.hit_point, e1.line_out.v(), e2.hit_point, e2.line_out.v());
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace brt::testing
