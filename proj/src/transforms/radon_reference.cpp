#include "brt/transforms.hpp"
#include "line_sampling.hpp"

namespace brt {

Sinogram radon_reference(const GridImage& f, const SinogramLayout& layout, const RadonQuadrature& q) {
  const auto ls = detail::line_sampling(f.layout, q);
  Sinogram g(layout);
  for (int j = 0; j < layout.n_alpha; ++j) {
    const Vec2 v = dir_v(layout.alpha_at(j));
    const Vec2 w = dir_w(layout.alpha_at(j));
    for (int k = 0; k < layout.n_s; ++k) {
      const double s = layout.s_at(k);
      double acc = 0.0;
      for (int m = 0; m < ls.count; ++m) {
        const double t = ls.t0 + m * ls.h;
        detail::Stencil st;
        if (detail::make_stencil(f.layout, s * w.x + t * v.x, s * w.y + t * v.y, st))
          acc += detail::gather(f.data.data(), f.n(), st);
      }
      g.at(j, k) = acc * ls.h;
    }
  }
  return g;
}

GridImage radon_adjoint_reference(const Sinogram& g, const ImageLayout& layout, const RadonQuadrature& q) {
  const auto ls = detail::line_sampling(layout, q);
  const SinogramLayout& sl = g.layout;
  GridImage f(layout);
  for (int j = 0; j < sl.n_alpha; ++j) {
    const Vec2 v = dir_v(sl.alpha_at(j));
    const Vec2 w = dir_w(sl.alpha_at(j));
    for (int k = 0; k < sl.n_s; ++k) {
      const double value = g.at(j, k);
      if (is_masked(value) || value == 0.0) continue;
      const double s = sl.s_at(k);
      for (int m = 0; m < ls.count; ++m) {
        const double t = ls.t0 + m * ls.h;
        detail::Stencil st;
        if (detail::make_stencil(layout, s * w.x + t * v.x, s * w.y + t * v.y, st))
          detail::scatter(f.data.data(), layout.n, st, value);
      }
    }
  }
  const double scale = ls.h * sl.ds() * sl.dalpha() / (layout.dx() * layout.dx());
  for (double& x : f.data) x *= scale;
  return f;
}

}  // namespace brt
