#include <cmath>

#include "brt/errors.hpp"
#include "brt/geometry.hpp"

namespace brt {

Mat2 reflection_jacobian(const ReflectionEvent& event) {
  const Vec2 v1 = event.line_in.v();
  const Vec2 w1 = event.line_in.w();
  const Vec2 v2 = event.line_out.v();
  const Vec2 w2 = event.line_out.w();
  const Vec2& gamma = event.frame.point;
  const Vec2& tangent = event.frame.tangent;
  const double kappa = event.frame.curvature;

  const double w1t = dot(w1, tangent);  // = -cos(beta) for an exiting hit
  if (std::abs(w1t) < kGrazingCos) throw GrazingIncidence("reflection Jacobian undefined at grazing incidence");

  // d(tau0)/d(s1) and d(tau0)/d(alpha1) from <w(alpha1), gamma(tau0)> = s1.
  const double k_s = 1.0 / w1t;
  const double k_alpha = dot(v1, gamma) / w1t;

  Mat2 j;
  j.a10 = 2.0 * kappa * k_s;
  j.a11 = 2.0 * kappa * k_alpha - 1.0;
  const double v2g = dot(v2, gamma);
  const double w2t = dot(w2, tangent);
  j.a00 = -v2g * j.a10 + k_s * w2t;
  j.a01 = -v2g * j.a11 + k_alpha * w2t;
  return j;
}

ReflectionEvent reflect(const Boundary& boundary, const LineCoords& line_in, const Vec2& from) {
  const RayHit hit = intersect_ray(boundary, line_in, from);
  const Vec2 v1 = line_in.v();
  ReflectionEvent ev;
  ev.tau0 = hit.tau;
  ev.frame = hit.frame;
  ev.hit_point = hit.frame.point;
  ev.line_in = line_in;
  ev.beta = std::atan2(dot(v1, hit.frame.tangent), dot(v1, hit.frame.normal));
  const double alpha2 = line_in.alpha + 2.0 * ev.beta + kPi;
  ev.line_out = LineCoords(dot(ev.hit_point, dir_w(alpha2)), alpha2);
  ev.jacobian = reflection_jacobian(ev);
  return ev;
}

ReflectionEvent reflect_line(const Boundary& boundary, const LineCoords& line_in) {
  const double back = 4.0 * boundary.bounding_radius() + std::abs(line_in.s) + 1.0;
  const Vec2 start = line_in.s * line_in.w() - back * line_in.v();
  return reflect(boundary, line_in, start);
}

}  // namespace brt
