#include <array>
#include <cmath>

#include "brt/errors.hpp"
#include "brt/phantoms.hpp"
#include "brt/reconstruct.hpp"

namespace brt {

namespace {

struct EllipseRow {
  double value, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan table (Toft's contrast-enhanced intensities).
constexpr std::array<EllipseRow, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
}};

Vec2 rotate(const Vec2& p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

double shepp_logan(const SheppLoganSpec& spec, const Vec2& x) {
  // Pull the point back into the phantom's own frame.
  const Vec2 u = rotate(x - spec.center, -spec.rotation) / spec.scale;
  double v = 0.0;
  for (const auto& e : kSheppLogan) {
    const double phi = e.phi_deg * kPi / 180.0;
    const Vec2 d = rotate({u.x - e.x0, u.y - e.y0}, -phi);
    if ((d.x * d.x) / (e.a * e.a) + (d.y * d.y) / (e.b * e.b) <= 1.0) v += e.value;
  }
  return v;
}

void check_center(const Vec2& c, const ImageLayout& layout) {
  if (std::abs(c.x) > layout.half_width || std::abs(c.y) > layout.half_width)
    throw CenterOutsideWindow("phantom center lies outside the image window");
}

}  // namespace

double evaluate(const PhantomSpec& spec, const Vec2& x) {
  if (const auto* g = std::get_if<GaussianSpec>(&spec)) {
    const Vec2 d = x - g->center;
    return g->amplitude * std::exp(-dot(d, d) / (2.0 * g->sigma * g->sigma));
  }
  if (const auto* c = std::get_if<CoherentSpec>(&spec)) {
    const Vec2 d = x - c->center;
    if (c->support_radius > 0.0 && norm(d) > c->support_radius) return 0.0;
    return c->amplitude * std::exp(-dot(d, d) / (2.0 * c->sigma * c->sigma)) *
           std::cos(c->wavenumber * dot(d, dir_w(c->theta)));
  }
  return shepp_logan(std::get<SheppLoganSpec>(spec), x);
}

Vec2 center_of(const PhantomSpec& spec) {
  return std::visit([](const auto& s) { return s.center; }, spec);
}

GridImage render(const PhantomSpec& spec, const ImageLayout& layout) {
  if (const auto* g = std::get_if<GaussianSpec>(&spec); g && !(g->sigma > 0.0))
    throw ValidationError("gaussian sigma must be positive");
  if (const auto* c = std::get_if<CoherentSpec>(&spec); c && (!(c->sigma > 0.0) || c->wavenumber < 0.0))
    throw ValidationError("coherent state needs sigma > 0 and k >= 0");
  check_center(center_of(spec), layout);
  GridImage f(layout);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < layout.n; ++i)
    for (int j = 0; j < layout.n; ++j) f.at(i, j) = evaluate(spec, f.center(i, j));
  return f;
}

GridImage render(const std::vector<PhantomSpec>& specs, const ImageLayout& layout) {
  GridImage f(layout);
  for (const auto& s : specs) {
    const GridImage part = render(s, layout);
    for (std::size_t p = 0; p < f.data.size(); ++p) f.data[p] += part.data[p];
  }
  return f;
}

void clip_to_domain(GridImage& f, const Boundary& boundary, double margin_px) {
  const auto mask = domain_mask(boundary, f.layout, margin_px);
  for (std::size_t p = 0; p < f.data.size(); ++p)
    if (!mask[p]) f.data[p] = 0.0;
}

PhantomSpec place(const PhantomSpec& spec, const Vec2& new_center, double rotate_by, double half_width) {
  check_center(new_center, ImageLayout{1, half_width});
  PhantomSpec out = spec;
  std::visit(
      [&](auto& s) {
        using T = std::decay_t<decltype(s)>;
        s.center = new_center;
        if constexpr (std::is_same_v<T, CoherentSpec>) s.theta += rotate_by;
        if constexpr (std::is_same_v<T, SheppLoganSpec>) s.rotation += rotate_by;
      },
      out);
  return out;
}

}  // namespace brt
