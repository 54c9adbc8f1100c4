#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "brt/conjugate.hpp"
#include "brt/errors.hpp"

namespace brt {

std::string to_string(SampleFlag flag) {
  switch (flag) {
    case SampleFlag::ok: return "ok";
    case SampleFlag::outside_domain: return "outside_domain";
    case SampleFlag::no_conjugate: return "none";
    case SampleFlag::inadmissible: return "inadmissible";
  }
  return "?";
}

std::string to_string(CuspKind kind) {
  return kind == CuspKind::normal_incidence ? "beta_zero" : "cos_beta_eq_t1";
}

namespace {

bool has_point(const CausticSample& s) {
  return s.flag == SampleFlag::ok || s.flag == SampleFlag::outside_domain;
}

CausticSample sample_at(const Vec2& p, const Boundary& boundary, double alpha) {
  CausticSample out;
  out.alpha = alpha;
  ReflectionEvent ev;
  try {
    ev = reflect(boundary, LineCoords::through(p, alpha), p);
  } catch (const NoIntersection&) {
    return out;
  } catch (const GrazingIncidence&) {
    return out;
  } catch (const ParameterOutOfRange&) {
    return out;
  }
  const auto q = conjugate_point(p, ev);
  if (!q) {
    out.flag = SampleFlag::no_conjugate;
    return out;
  }
  out.point = *q;
  out.t = dot(ev.hit_point - p, ev.line_in.v()) + dot(*q - ev.hit_point, ev.line_out.v());
  out.flag = boundary.contains(*q) ? SampleFlag::ok : SampleFlag::outside_domain;
  return out;
}

// Samples strictly between a and b, inserted where the caustic jumps.
void refine(const Vec2& p, const Boundary& boundary, const CausticSample& a, const CausticSample& b,
            const CausticOptions& opt, int depth, std::vector<CausticSample>& out) {
  if (depth >= opt.max_refine_depth || !has_point(a) || !has_point(b)) return;
  if (norm(a.point - b.point) <= opt.refine_distance) return;
  const CausticSample mid = sample_at(p, boundary, 0.5 * (a.alpha + b.alpha));
  refine(p, boundary, a, mid, opt, depth + 1, out);
  out.push_back(mid);
  refine(p, boundary, mid, b, opt, depth + 1, out);
}

}  // namespace

std::vector<CausticSample> caustic_curve(const Vec2& source, const Boundary& boundary,
                                         const CausticOptions& opt) {
  if (opt.n_samples < 2) throw ValidationError("caustic_curve needs at least 2 samples");
  const int n = opt.n_samples;
  const bool periodic = std::abs(opt.alpha_max - opt.alpha_min - kTwoPi) < 1e-12;
  const double step = (opt.alpha_max - opt.alpha_min) / (periodic ? n : n - 1);

  std::vector<CausticSample> coarse(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) coarse[i] = sample_at(source, boundary, opt.alpha_min + i * step);

  const int gaps = n - 1;
  std::vector<std::vector<CausticSample>> inserted(gaps);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < gaps; ++i) refine(source, boundary, coarse[i], coarse[i + 1], opt, 0, inserted[i]);

  std::vector<CausticSample> out;
  bool any = false;
  for (int i = 0; i < n; ++i) {
    out.push_back(coarse[i]);
    any = any || has_point(coarse[i]);
    if (i < gaps) out.insert(out.end(), inserted[i].begin(), inserted[i].end());
  }
  if (!any) throw EmptyCaustic("no admissible direction yields a conjugate point");
  return out;
}

std::vector<std::vector<Vec2>> caustic_polylines(const std::vector<CausticSample>& samples) {
  std::vector<std::vector<Vec2>> lines;
  std::vector<Vec2> current;
  for (const auto& s : samples) {
    if (s.flag == SampleFlag::ok) {
      current.push_back(s.point);
    } else if (!current.empty()) {
      lines.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) lines.push_back(std::move(current));
  return lines;
}

// ---------------------------------------------------------------------------
// Tangent conjugate locus

namespace {

// Exact chord geometry without grazing rejection, used for root finding.
struct ChordData {
  double t1, cos_beta, sin_beta;
};

ChordData chord(const Vec2& p, double radius, double alpha) {
  const Vec2 v = dir_v(alpha);
  const double u = dot(p, v);
  const double s = dot(p, dir_w(alpha));
  const double h = std::sqrt(std::max(0.0, radius * radius - s * s));
  ChordData c;
  c.t1 = h - u;
  c.cos_beta = h / radius;
  // sin(beta) = <v, tangent>; tangent at the hit is perp(n) rotated clockwise.
  const Vec2 hit = s * dir_w(alpha) + h * v;
  const Vec2 normal = hit / radius;
  const Vec2 tangent{normal.y, -normal.x};
  c.sin_beta = dot(v, tangent);
  return c;
}

double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double locus_function(const Vec2& p, double radius, double alpha, double t) {
  const ChordData c = chord(p, radius, alpha);
  const double slope = 2.0 * c.t1 / (radius * c.cos_beta) - 1.0;
  return slope * (t - c.t1) - c.t1;
}

double locus_dF_dalpha(const Vec2& p, double radius, double alpha) {
  const ChordData c = chord(p, radius, alpha);
  const double t1 = c.t1 / radius;
  const double cb = c.cos_beta;
  return radius * 6.0 * t1 * t1 * c.sin_beta * (t1 - cb) / (cb * cb * (2.0 * t1 - cb));
}

TangentLocus tangent_conjugate_locus(const Vec2& p, double radius, int n_samples) {
  if (norm(p) < 1e-12 * radius) throw CenterSource("tangent conjugate locus is degenerate at the center");
  if (norm(p) >= radius) throw ValidationError("source must lie inside the circle");
  if (n_samples < 8) throw ValidationError("tangent_conjugate_locus needs at least 8 samples");

  TangentLocus out;
  out.samples.resize(n_samples);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_samples; ++i) {
    const double alpha = kTwoPi * i / n_samples;
    LocusSample& ls = out.samples[i];
    ls.alpha = alpha;
    const ChordData c = chord(p, radius, alpha);
    const double slope = 2.0 * c.t1 / (radius * c.cos_beta) - 1.0;
    if (!(slope > 1e-9) || c.cos_beta < kGrazingCos) continue;
    double t = c.t1 + c.t1 / slope;
    t -= locus_function(p, radius, alpha, t) / slope;
    ls.t = t;
    ls.on_locus = true;
    ls.residual = std::abs(locus_function(p, radius, alpha, t));
    const Vec2 v = dir_v(alpha);
    const Vec2 hit = p + c.t1 * v;
    const double alpha2 = alpha + 2.0 * std::atan2(c.sin_beta, c.cos_beta) + kPi;
    ls.point = hit + (t - c.t1) * dir_v(alpha2);
  }

  // Zeros of the two factors of dF/dalpha, bracketed on a fine periodic scan.
  const auto factor_beta = [&](double a) { return chord(p, radius, a).sin_beta; };
  const auto factor_perp = [&](double a) {
    const ChordData c = chord(p, radius, a);
    return c.cos_beta - c.t1 / radius;
  };
  const int scan = std::max(4 * n_samples, 2048);
  for (CuspKind kind : {CuspKind::normal_incidence, CuspKind::perpendicular}) {
    const std::function<double(double)> f =
        kind == CuspKind::normal_incidence ? std::function<double(double)>(factor_beta)
                                           : std::function<double(double)>(factor_perp);
    for (int i = 0; i < scan; ++i) {
      const double a = kTwoPi * i / scan;
      const double b = kTwoPi * (i + 1) / scan;
      const double fa = f(a);
      const double fb = i + 1 == scan ? f(0.0) : f(b);
      if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
        if (fb == 0.0) continue;  // counted in the next cell
        LocusZero z;
        z.alpha = fa == 0.0 ? a : bisect(f, a, b);
        z.kind = kind;
        const ChordData c = chord(p, radius, z.alpha);
        // d(sin beta)/dalpha = t1/R - cos beta; d(cos beta - t1/R)/dalpha = sin beta.
        z.derivative = kind == CuspKind::normal_incidence ? c.t1 / radius - c.cos_beta : c.sin_beta;
        z.simple = std::abs(z.derivative) > 1e-8;
        z.on_locus = 2.0 * c.t1 / (radius * c.cos_beta) - 1.0 > 1e-9;
        out.zeros.push_back(z);
      }
    }
  }
  std::sort(out.zeros.begin(), out.zeros.end(), [](const LocusZero& a, const LocusZero& b) { return a.alpha < b.alpha; });
  return out;
}

}  // namespace brt
