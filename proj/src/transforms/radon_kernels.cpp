#include <omp.h>

#include "brt/transforms.hpp"
#include "line_sampling.hpp"

namespace brt {

Sinogram radon(const GridImage& f, const SinogramLayout& layout, const RadonQuadrature& q) {
  const auto ls = detail::line_sampling(f.layout, q);
  Sinogram g(layout);
  const double* src = f.data.data();
  const int n = f.n();
#pragma omp parallel for schedule(static)
  for (int j = 0; j < layout.n_alpha; ++j) {
    const Vec2 v = dir_v(layout.alpha_at(j));
    const Vec2 w = dir_w(layout.alpha_at(j));
    for (int k = 0; k < layout.n_s; ++k) {
      const double s = layout.s_at(k);
      int lo = 0, hi = -1;
      double acc = 0.0;
      if (detail::clip_samples(f.layout, ls, s, v, w, lo, hi)) {
        for (int m = lo; m <= hi; ++m) {
          const double t = ls.t0 + m * ls.h;
          detail::Stencil st;
          if (detail::make_stencil(f.layout, s * w.x + t * v.x, s * w.y + t * v.y, st))
            acc += detail::gather(src, n, st);
        }
      }
      g.at(j, k) = acc * ls.h;
    }
  }
  return g;
}

GridImage radon_adjoint(const Sinogram& g, const ImageLayout& layout, const RadonQuadrature& q) {
  const auto ls = detail::line_sampling(layout, q);
  const SinogramLayout& sl = g.layout;
  const std::size_t pixels = static_cast<std::size_t>(layout.n) * layout.n;
  const int threads = omp_get_max_threads();
  std::vector<std::vector<double>> partial(threads);

#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    std::vector<double>& img = partial[tid];
    img.assign(pixels, 0.0);
#pragma omp for schedule(static)
    for (int j = 0; j < sl.n_alpha; ++j) {
      const Vec2 v = dir_v(sl.alpha_at(j));
      const Vec2 w = dir_w(sl.alpha_at(j));
      for (int k = 0; k < sl.n_s; ++k) {
        const double value = g.at(j, k);
        if (is_masked(value) || value == 0.0) continue;
        const double s = sl.s_at(k);
        int lo = 0, hi = -1;
        if (!detail::clip_samples(layout, ls, s, v, w, lo, hi)) continue;
        for (int m = lo; m <= hi; ++m) {
          const double t = ls.t0 + m * ls.h;
          detail::Stencil st;
          if (detail::make_stencil(layout, s * w.x + t * v.x, s * w.y + t * v.y, st))
            detail::scatter(img.data(), layout.n, st, value);
        }
      }
    }
  }

  GridImage f(layout);
  for (const auto& img : partial) {
    if (img.empty()) continue;
    for (std::size_t p = 0; p < pixels; ++p) f.data[p] += img[p];
  }
  const double scale = ls.h * sl.ds() * sl.dalpha() / (layout.dx() * layout.dx());
  for (double& x : f.data) x *= scale;
  return f;
}

}  // namespace brt
