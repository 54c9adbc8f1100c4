#include <cmath>

#include "brt/conjugate.hpp"
#include "brt/errors.hpp"

namespace brt {

namespace {

// Treat d(alpha2)/d(alpha1) as zero below this (relative to the other terms).
bool vanishes(double dalpha2, double scale) { return std::abs(dalpha2) <= 1e-10 * (1.0 + scale); }

}  // namespace

TransferData transfer_from(const ReflectionEvent& event) {
  TransferData d;
  d.line_in = event.line_in;
  d.line_out = event.line_out;
  d.jacobian = event.jacobian;
  d.q0 = event.hit_point;
  const double w1t = dot(event.line_in.w(), event.frame.tangent);
  d.dq0_ds = event.frame.tangent * (1.0 / w1t);
  d.dq0_dalpha = event.frame.tangent * (dot(event.line_in.v(), event.frame.point) / w1t);
  return d;
}

TransferData translation_transfer(const LineCoords& line_in, double offset) {
  TransferData d;
  d.line_in = line_in;
  d.line_out = LineCoords(line_in.s + offset, line_in.alpha);
  d.jacobian = Mat2::identity();
  return d;
}

SourceDerivatives source_derivatives(const Vec2& p, const TransferData& data) {
  const double ds1 = -dot(p, data.line_in.v());
  const Mat2& j = data.jacobian;
  SourceDerivatives out;
  out.dalpha2 = j.a11 + j.a10 * ds1;
  out.ds2 = j.a01 + j.a00 * ds1;
  if (data.q0) out.dq0_w2 = dot(data.dq0_dalpha + data.dq0_ds * ds1, data.line_out.w());
  return out;
}

std::optional<Vec2> conjugate_point(const Vec2& p, const TransferData& data, double q0_shift) {
  const SourceDerivatives d = source_derivatives(p, data);
  if (vanishes(d.dalpha2, std::abs(d.ds2))) {
    if (data.q0) return std::nullopt;
    throw DegenerateDirection("d(alpha2)/d(alpha1) = 0: conjugate point at infinity");
  }
  if (data.q0) {
    // Shifting q0 along v2 adds shift * dalpha2 * w2 to its alpha-derivative.
    const double side = d.dq0_w2 + q0_shift * d.dalpha2;
    if (!(d.dalpha2 * side < 0.0)) return std::nullopt;
  }
  const double along = -d.ds2 / d.dalpha2;
  return data.line_out.w() * data.line_out.s + data.line_out.v() * along;
}

std::optional<Vec2> conjugate_point(const Vec2& p, const ReflectionEvent& event) {
  return conjugate_point(p, transfer_from(event));
}

std::optional<Covector> conjugate_covector(const Covector& cv, const TransferData& data) {
  const Vec2 w1 = data.line_in.w();
  const double scale = norm(cv.xi);
  if (scale == 0.0) throw ValidationError("covector has zero frequency");
  if (std::abs(dot(cv.xi, data.line_in.v())) > 1e-8 * scale)
    throw ValidationError("covector is not conormal to the incoming line");
  if (std::abs(dot(cv.x, w1) - data.line_in.s) > 1e-8 * (1.0 + std::abs(data.line_in.s)))
    throw ValidationError("covector base point is not on the incoming line");

  const auto q = conjugate_point(cv.x, data);
  if (!q) return std::nullopt;
  const double lambda = dot(cv.xi, w1);
  const double dalpha2 = source_derivatives(cv.x, data).dalpha2;
  return Covector{*q, data.line_out.w() * (lambda / data.jacobian.det() * dalpha2)};
}

std::optional<Covector> conjugate_covector(const Covector& cv, const ReflectionEvent& event) {
  return conjugate_covector(cv, transfer_from(event));
}

}  // namespace brt
