#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "brt/errors.hpp"
#include "brt/geometry.hpp"

namespace brt {

namespace {

// 10-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kGLNodes = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                            0.8650633666889845, 0.9739065285171717};
constexpr std::array<double, 5> kGLWeights = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                              0.1494513491505806, 0.0666713443086881};

template <class F>
double gauss_legendre(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGLNodes.size(); ++i) {
    sum += kGLWeights[i] * (f(mid - half * kGLNodes[i]) + f(mid + half * kGLNodes[i]));
  }
  return sum * half;
}

}  // namespace

namespace detail {

/// Raw (not unit-speed) derivatives of a parametrized curve.
struct CurveJet {
  Vec2 c;
  Vec2 d1;
  Vec2 d2;
};

}  // namespace detail

namespace {

using detail::CurveJet;

Frame frame_from_jet(const CurveJet& j) {
  const double speed = norm(j.d1);
  Frame f;
  f.point = j.c;
  f.tangent = j.d1 / speed;
  f.normal = perp(f.tangent);
  f.curvature = cross(j.d1, j.d2) / (speed * speed * speed);
  return f;
}

/// Uniform-knot periodic cubic spline through closed vertex data.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(const std::vector<Vec2>& pts) : y_(pts), m_(pts.size()) {
    const std::size_t n = pts.size();
    // M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}); strictly diagonally dominant.
    std::vector<Vec2> rhs(n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = 6.0 * (y_[(i + 1) % n] - 2.0 * y_[i] + y_[(i + n - 1) % n]);
      scale = std::max(scale, norm(rhs[i]));
    }
    for (int it = 0; it < 400; ++it) {
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 next = (rhs[i] - m_[(i + n - 1) % n] - m_[(i + 1) % n]) / 4.0;
        change = std::max(change, norm(next - m_[i]));
        m_[i] = next;
      }
      if (change <= 1e-16 * (scale + 1.0)) break;
    }
  }

  double period() const { return static_cast<double>(y_.size()); }

  CurveJet jet(double u) const {
    const std::size_t n = y_.size();
    double k = std::floor(u);
    double t = u - k;
    const auto i = static_cast<std::size_t>(((static_cast<long long>(k) % static_cast<long long>(n)) + n) % n);
    const std::size_t i1 = (i + 1) % n;
    const double s = 1.0 - t;
    CurveJet j;
    j.c = s * y_[i] + t * y_[i1] + ((s * s * s - s) / 6.0) * m_[i] + ((t * t * t - t) / 6.0) * m_[i1];
    j.d1 = (y_[i1] - y_[i]) + ((1.0 - 3.0 * s * s) / 6.0) * m_[i] + ((3.0 * t * t - 1.0) / 6.0) * m_[i1];
    j.d2 = s * m_[i] + t * m_[i1];
    return j;
  }

 private:
  std::vector<Vec2> y_;
  std::vector<Vec2> m_;
};

}  // namespace

/// Cumulative arc length of a periodic parametrized curve on [0, period),
/// with inversion tau -> parameter by safeguarded Newton.
class ArcLengthTable {
 public:
  using CurveJet = detail::CurveJet;
  ArcLengthTable(std::function<CurveJet(double)> jet, double period, int panels)
      : jet_(std::move(jet)), period_(period), panels_(panels), cum_(panels + 1, 0.0) {
    const double h = period_ / panels_;
    for (int i = 0; i < panels_; ++i) {
      cum_[i + 1] = cum_[i] + integrate(i * h, (i + 1) * h);
    }
  }

  double length() const { return cum_.back(); }

  CurveJet jet(double u) const { return jet_(u); }

  /// Arc length from parameter 0 to u in [0, period].
  double arc(double u) const {
    const double h = period_ / panels_;
    int i = std::clamp(static_cast<int>(u / h), 0, panels_ - 1);
    return cum_[i] + integrate(i * h, u);
  }

  double param(double tau) const {
    const double len = length();
    tau = std::fmod(tau, len);
    if (tau < 0.0) tau += len;
    const double h = period_ / panels_;
    auto it = std::upper_bound(cum_.begin(), cum_.end(), tau);
    int i = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0, panels_ - 1);
    const double start = i * h;
    double lo = start;
    double hi = (i + 1) * h;
    double u = lo + h * (tau - cum_[i]) / (cum_[i + 1] - cum_[i]);
    for (int it2 = 0; it2 < 50; ++it2) {
      const double f = cum_[i] + integrate(start, u) - tau;
      if (f > 0.0) hi = u; else lo = u;
      const double step = f / norm(jet_(u).d1);
      double next = u - step;
      if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
      if (std::abs(next - u) < 1e-15 * period_) { u = next; break; }
      u = next;
    }
    return u;
  }

 private:
  double integrate(double a, double b) const {
    return gauss_legendre([this](double u) { return norm(jet_(u).d1); }, a, b);
  }

  std::function<CurveJet(double)> jet_;
  double period_;
  int panels_;
  std::vector<double> cum_;
};

namespace {

// Parabola arc length from the vertex, signed by x.
double parabola_arc(double focal, double x) {
  const double r = x / (2.0 * focal);
  return focal * (std::asinh(r) + r * std::sqrt(1.0 + r * r));
}

double parabola_x_of_tau(double focal, double tau) {
  double x = tau;  // arc length >= |x|; Newton from here converges monotonically
  for (int i = 0; i < 60; ++i) {
    const double r = x / (2.0 * focal);
    const double step = (parabola_arc(focal, x) - tau) / std::sqrt(1.0 + r * r);
    x -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

CurveJet parabola_jet(double focal, double x) {
  return {{x, -x * x / (4.0 * focal)}, {1.0, -x / (2.0 * focal)}, {0.0, -1.0 / (2.0 * focal)}};
}

CurveJet ellipse_jet(double a, double b, double th) {
  const double c = std::cos(th);
  const double s = std::sin(th);
  return {{a * c, -b * s}, {-a * s, -b * c}, {-a * c, b * s}};
}

double signed_area(const std::vector<Vec2>& pts) {
  double area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) area += cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * area;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

}  // namespace

Boundary::Boundary(Shape shape) : shape_(std::move(shape)) {}

Boundary Boundary::circle(double radius) {
  if (!(radius > 0.0)) throw ValidationError("circle radius must be positive");
  Boundary b(Circle{radius});
  b.finish();
  return b;
}

Boundary Boundary::ellipse(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("ellipse semi-axes must be positive");
  Boundary bd(Ellipse{a, b});
  bd.arc_ = std::make_shared<ArcLengthTable>([a, b](double th) { return ellipse_jet(a, b, th); }, kTwoPi, 512);
  bd.finish();
  return bd;
}

Boundary Boundary::parabola(double focal, double extent) {
  if (!(focal > 0.0) || !(extent > 0.0)) throw ValidationError("parabola focal parameter and extent must be positive");
  Boundary b(Parabola{focal, extent});
  b.finish();
  return b;
}

Boundary Boundary::sampled(std::vector<Vec2> vertices) {
  if (vertices.size() < 4) throw ValidationError("sampled boundary needs at least 4 vertices");
  if (norm(vertices.front() - vertices.back()) < 1e-12) vertices.pop_back();
  if (signed_area(vertices) > 0.0) std::reverse(vertices.begin(), vertices.end());
  auto spline = std::make_shared<PeriodicSpline>(vertices);
  Boundary b(SampledCurve{std::move(vertices)});
  const int panels = 4 * static_cast<int>(spline->period());
  b.arc_ = std::make_shared<ArcLengthTable>([spline](double u) { return spline->jet(u); }, spline->period(), panels);
  b.finish();
  return b;
}

void Boundary::finish() {
  if (const auto* c = std::get_if<Circle>(&shape_)) {
    tau_min_ = 0.0;
    tau_max_ = kTwoPi * c->radius;
  } else if (const auto* p = std::get_if<Parabola>(&shape_)) {
    tau_min_ = parabola_arc(p->focal, -p->extent);
    tau_max_ = parabola_arc(p->focal, p->extent);
  } else {
    tau_min_ = 0.0;
    tau_max_ = arc_->length();
  }
  const int samples = 4096;
  polyline_.clear();
  polyline_tau_.clear();
  const int count = closed() ? samples : samples + 1;
  for (int i = 0; i < count; ++i) {
    const double tau = tau_min_ + length() * i / samples;
    polyline_tau_.push_back(tau);
    polyline_.push_back(evaluate(tau).point);
  }
  bounding_radius_ = 0.0;
  for (const auto& q : polyline_) bounding_radius_ = std::max(bounding_radius_, norm(q));
  bounding_radius_ *= 1.0 + 1e-6;
}

bool Boundary::closed() const { return !std::holds_alternative<Parabola>(shape_); }

Frame Boundary::evaluate(double tau) const {
  if (const auto* c = std::get_if<Circle>(&shape_)) {
    const double phi = tau / c->radius;
    const double cs = std::cos(phi);
    const double sn = std::sin(phi);
    return {{c->radius * cs, -c->radius * sn}, {-sn, -cs}, {cs, -sn}, -1.0 / c->radius};
  }
  if (const auto* p = std::get_if<Parabola>(&shape_)) {
    const double slack = 1e-9 * length();
    if (tau < tau_min_ - slack || tau > tau_max_ + slack) {
      throw ParameterOutOfRange("arc length outside the parabola extent");
    }
    return frame_from_jet(parabola_jet(p->focal, parabola_x_of_tau(p->focal, tau)));
  }
  return frame_from_jet(arc_->jet(arc_->param(tau)));
}

bool Boundary::contains(const Vec2& p) const {
  if (const auto* c = std::get_if<Circle>(&shape_)) return dot(p, p) < c->radius * c->radius;
  if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    const double u = p.x / e->a;
    const double v = p.y / e->b;
    return u * u + v * v < 1.0;
  }
  if (const auto* pa = std::get_if<Parabola>(&shape_)) return p.y < -p.x * p.x / (4.0 * pa->focal);
  // Crossing-number test on the dense polyline.
  bool inside = false;
  const std::size_t n = polyline_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polyline_[i];
    const Vec2& b = polyline_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double Boundary::distance(const Vec2& p) const {
  if (const auto* c = std::get_if<Circle>(&shape_)) return std::abs(norm(p) - c->radius);
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = polyline_.size();
  const std::size_t segs = closed() ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    best = std::min(best, segment_distance(p, polyline_[i], polyline_[(i + 1) % n]));
  }
  return best;
}

double Boundary::locate(const Vec2& q) const {
  if (const auto* c = std::get_if<Circle>(&shape_)) {
    return c->radius * wrap_angle(std::atan2(-q.y, q.x));
  }
  if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    return arc_->arc(wrap_angle(std::atan2(-q.y / e->b, q.x / e->a)));
  }
  if (const auto* p = std::get_if<Parabola>(&shape_)) return parabola_arc(p->focal, q.x);
  // Nearest polyline sample, then Newton on <gamma(tau) - q, tangent> = 0.
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < polyline_.size(); ++i) {
    const double d = norm(polyline_[i] - q);
    if (d < best_d) { best_d = d; best = i; }
  }
  double tau = polyline_tau_[best];
  for (int i = 0; i < 30; ++i) {
    const Frame f = evaluate(tau);
    const Vec2 r = f.point - q;
    const double g = dot(r, f.tangent);
    const double dg = 1.0 + f.curvature * dot(r, f.normal);
    const double step = g / dg;
    tau -= step;
    if (std::abs(step) < 1e-14 * length()) break;
  }
  return std::fmod(std::fmod(tau, length()) + length(), length());
}

namespace {

struct Candidate {
  double t;
  double tau;
};

/// Applies the exit-hit selection rule to candidate roots sorted by t.
RayHit select_exit(const Boundary& boundary, const Vec2& p, const Vec2& v, std::vector<Candidate> cands) {
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.t < b.t; });
  const double eps = 1e-9 * std::max(1.0, boundary.bounding_radius());
  for (const auto& c : cands) {
    if (c.t <= eps) continue;
    const Frame f = boundary.evaluate(c.tau);
    const double cos_beta = dot(v, f.normal);
    if (std::abs(cos_beta) < kGrazingCos) throw GrazingIncidence("ray meets the boundary at grazing incidence");
    if (cos_beta > 0.0) return {c.tau, c.t, f};
  }
  (void)p;
  throw NoIntersection("ray does not leave the domain ahead of its start point");
}

/// Real roots of A t^2 + B t + C = 0; a slightly negative discriminant counts as tangency.
std::vector<double> quadratic_roots(double A, double B, double C, double scale) {
  std::vector<double> out;
  if (std::abs(A) < 1e-14 * scale) {
    if (std::abs(B) > 0.0) out.push_back(-C / B);
    return out;
  }
  double disc = B * B - 4.0 * A * C;
  if (disc < -1e-12 * (B * B + std::abs(4.0 * A * C) + 1e-300)) return out;
  disc = std::max(disc, 0.0);
  const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
  if (q != 0.0) {
    out.push_back(q / A);
    out.push_back(C / q);
  } else {
    out.push_back(0.0);
  }
  return out;
}

}  // namespace

RayHit intersect_ray(const Boundary& boundary, const LineCoords& line, const Vec2& from) {
  const Vec2 v = line.v();
  const Vec2 w = line.w();
  const Vec2 p = from + (line.s - dot(from, w)) * w;
  std::vector<Candidate> cands;
  if (const auto* c = std::get_if<Circle>(&boundary.shape())) {
    for (double t : quadratic_roots(1.0, 2.0 * dot(p, v), dot(p, p) - c->radius * c->radius, 1.0)) {
      cands.push_back({t, boundary.locate(p + t * v)});
    }
  } else if (const auto* e = std::get_if<Ellipse>(&boundary.shape())) {
    const Vec2 P{p.x / e->a, p.y / e->b};
    const Vec2 V{v.x / e->a, v.y / e->b};
    for (double t : quadratic_roots(dot(V, V), 2.0 * dot(P, V), dot(P, P) - 1.0, dot(V, V))) {
      cands.push_back({t, boundary.locate(p + t * v)});
    }
  } else if (const auto* pa = std::get_if<Parabola>(&boundary.shape())) {
    const double a4 = 4.0 * pa->focal;
    for (double t : quadratic_roots(v.x * v.x, 2.0 * p.x * v.x + a4 * v.y, p.x * p.x + a4 * p.y, 1.0)) {
      const Vec2 q = p + t * v;
      if (std::abs(q.x) <= pa->extent) cands.push_back({t, boundary.locate(q)});
    }
  } else {
    return intersect_ray_numeric(boundary, line, from);
  }
  return select_exit(boundary, p, v, std::move(cands));
}

RayHit intersect_ray_numeric(const Boundary& boundary, const LineCoords& line, const Vec2& from) {
  constexpr int kScan = 256;
  const Vec2 v = line.v();
  const Vec2 w = line.w();
  const Vec2 p = from + (line.s - dot(from, w)) * w;
  auto F = [&](double tau) { return dot(w, boundary.evaluate(tau).point) - line.s; };

  const double t0 = boundary.tau_min();
  const double len = boundary.length();
  const int intervals = boundary.closed() ? kScan : kScan - 1;
  const double h = len / intervals;
  std::vector<double> taus(kScan + 1);
  std::vector<double> vals(kScan + 1);
  for (int i = 0; i <= intervals; ++i) {
    taus[i] = t0 + i * h;
    vals[i] = (boundary.closed() && i == intervals) ? vals[0] : F(std::min(taus[i], boundary.tau_max()));
  }

  std::vector<Candidate> cands;
  auto add_root = [&](double tau) {
    const Vec2 q = boundary.evaluate(tau).point;
    cands.push_back({dot(q - p, v), tau});
  };
  for (int i = 0; i < intervals; ++i) {
    double lo = taus[i];
    double hi = taus[i + 1];
    double flo = vals[i];
    const double fhi = vals[i + 1];
    if (flo == 0.0) { add_root(lo); continue; }
    if ((flo < 0.0) == (fhi < 0.0) || fhi == 0.0) continue;
    // Bisection to a tight bracket, then Newton polish.
    for (int it = 0; it < 40 && hi - lo > 1e-7 * len; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = F(mid);
      if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
    }
    double tau = 0.5 * (lo + hi);
    for (int it = 0; it < 30; ++it) {
      const Frame f = boundary.evaluate(tau);
      const double g = dot(w, f.point) - line.s;
      const double dg = dot(w, f.tangent);
      if (dg == 0.0) break;
      const double step = g / dg;
      tau = std::clamp(tau - step, lo - 1e-9 * len, hi + 1e-9 * len);
      if (std::abs(step) < 1e-13 * std::max(1.0, len)) break;
    }
    add_root(tau);
  }
  return select_exit(boundary, p, v, std::move(cands));
}

}  // namespace brt
