#include <algorithm>
#include <cmath>

#include "brt/errors.hpp"
#include "brt/transforms.hpp"
#include "line_sampling.hpp"

namespace brt {

SinogramLayout default_sinogram_layout(const ImageLayout& image) {
  return {image.n, 360, image.half_width};
}

double GridImage::sample(const Vec2& p) const {
  detail::Stencil st;
  if (!detail::make_stencil(layout, p.x, p.y, st)) return 0.0;
  return detail::gather(data.data(), layout.n, st);
}

double inner(const GridImage& f, const GridImage& u) {
  if (!(f.layout == u.layout)) throw ValidationError("image layouts differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.data.size(); ++i) acc += f.data[i] * u.data[i];
  return acc * f.dx() * f.dx();
}

double l2_norm(const GridImage& f) { return std::sqrt(inner(f, f)); }

double max_abs(const GridImage& f) {
  double m = 0.0;
  for (double v : f.data) m = std::max(m, std::abs(v));
  return m;
}

std::size_t Sinogram::masked_count() const {
  return static_cast<std::size_t>(std::count_if(data.begin(), data.end(), [](double v) { return is_masked(v); }));
}

double inner(const Sinogram& g, const Sinogram& h) {
  if (!(g.layout == h.layout)) throw ValidationError("sinogram layouts differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    if (is_masked(g.data[i]) || is_masked(h.data[i])) continue;
    acc += g.data[i] * h.data[i];
  }
  return acc * g.layout.ds() * g.layout.dalpha();
}

double l2_norm(const Sinogram& g) { return std::sqrt(inner(g, g)); }

}  // namespace brt
