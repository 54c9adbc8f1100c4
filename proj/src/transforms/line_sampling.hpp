#pragma once

// Shared sampling rules for the Radon kernels and the serial reference, so
// both visit the same points with the same arithmetic.

#include <algorithm>
#include <cmath>

#include "brt/transforms.hpp"

namespace brt::detail {

struct LineSampling {
  double t0;  // first sample, -T
  double h;
  int count;  // samples m = 0 .. count-1
};

inline LineSampling line_sampling(const ImageLayout& image, const RadonQuadrature& q) {
  const double dx = image.dx();
  const double h = q.step_factor * dx;
  const double reach = std::sqrt(2.0) * image.half_width + dx;
  const int count = static_cast<int>(std::ceil(2.0 * reach / h)) + 1;
  return {-reach, h, count};
}

/// Bilinear stencil of a point: lower-left pixel (i0, j0) and fractions.
struct Stencil {
  int i0, j0;
  double tx, ty;
};

inline bool make_stencil(const ImageLayout& image, double x, double y, Stencil& st) {
  const double dx = image.dx();
  const double fx = (x + image.half_width) / dx - 0.5;
  const double fy = (y + image.half_width) / dx - 0.5;
  const double jx = std::floor(fx);
  const double iy = std::floor(fy);
  const int n = image.n;
  if (jx < -1.0 || iy < -1.0 || jx > n - 1.0 || iy > n - 1.0) return false;
  st.j0 = static_cast<int>(jx);
  st.i0 = static_cast<int>(iy);
  st.tx = fx - jx;
  st.ty = fy - iy;
  return true;
}

inline double gather(const double* f, int n, const Stencil& st) {
  double v = 0.0;
  const int i0 = st.i0, j0 = st.j0;
  if (i0 >= 0) {
    const double* row = f + static_cast<std::size_t>(i0) * n;
    if (j0 >= 0) v += (1.0 - st.tx) * (1.0 - st.ty) * row[j0];
    if (j0 + 1 < n) v += st.tx * (1.0 - st.ty) * row[j0 + 1];
  }
  if (i0 + 1 < n) {
    const double* row = f + static_cast<std::size_t>(i0 + 1) * n;
    if (j0 >= 0) v += (1.0 - st.tx) * st.ty * row[j0];
    if (j0 + 1 < n) v += st.tx * st.ty * row[j0 + 1];
  }
  return v;
}

inline void scatter(double* f, int n, const Stencil& st, double value) {
  const int i0 = st.i0, j0 = st.j0;
  if (i0 >= 0) {
    double* row = f + static_cast<std::size_t>(i0) * n;
    if (j0 >= 0) row[j0] += (1.0 - st.tx) * (1.0 - st.ty) * value;
    if (j0 + 1 < n) row[j0 + 1] += st.tx * (1.0 - st.ty) * value;
  }
  if (i0 + 1 < n) {
    double* row = f + static_cast<std::size_t>(i0 + 1) * n;
    if (j0 >= 0) row[j0] += (1.0 - st.tx) * st.ty * value;
    if (j0 + 1 < n) row[j0 + 1] += st.tx * st.ty * value;
  }
}

/// Sample range [lo, hi] whose points fall in the window grown by one pixel.
inline bool clip_samples(const ImageLayout& image, const LineSampling& ls, double s, const Vec2& v, const Vec2& w,
                         int& lo, int& hi) {
  const double box = image.half_width + image.dx();
  double t_lo = ls.t0;
  double t_hi = ls.t0 + (ls.count - 1) * ls.h;
  const double base[2] = {s * w.x, s * w.y};
  const double dir[2] = {v.x, v.y};
  for (int a = 0; a < 2; ++a) {
    if (std::abs(dir[a]) < 1e-15) {
      if (std::abs(base[a]) > box) return false;
      continue;
    }
    double ta = (-box - base[a]) / dir[a];
    double tb = (box - base[a]) / dir[a];
    if (ta > tb) std::swap(ta, tb);
    t_lo = std::max(t_lo, ta);
    t_hi = std::min(t_hi, tb);
  }
  if (t_lo > t_hi) return false;
  lo = std::max(0, static_cast<int>(std::floor((t_lo - ls.t0) / ls.h)));
  hi = std::min(ls.count - 1, static_cast<int>(std::ceil((t_hi - ls.t0) / ls.h)));
  return lo <= hi;
}

}  // namespace brt::detail
