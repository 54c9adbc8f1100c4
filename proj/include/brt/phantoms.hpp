#pragma once

// Analytic test functions sampled at pixel centers.

#include <variant>
#include <vector>

#include "brt/transforms.hpp"

namespace brt {

/// amplitude * exp(-|x - c|^2 / (2 sigma^2)).
struct GaussianSpec {
  Vec2 center;
  double sigma = 0.03;
  double amplitude = 1.0;

  bool operator==(const GaussianSpec&) const = default;
};

/// amplitude * exp(-|x - c|^2 / (2 sigma^2)) * cos(k <x - c, w(theta)>); the
/// oscillation runs along w(theta), which is the dominant wavefront direction.
/// A positive support_radius truncates the function to that disk.
struct CoherentSpec {
  Vec2 center;
  double theta = 0.0;
  double sigma = 0.05;
  double wavenumber = 80.0;
  double amplitude = 1.0;
  double support_radius = 0.0;

  bool operator==(const CoherentSpec&) const = default;
};

/// Modified Shepp-Logan head phantom on [-scale, scale]^2, rotated about its center.
struct SheppLoganSpec {
  Vec2 center;
  double rotation = 0.0;
  double scale = 1.0;

  bool operator==(const SheppLoganSpec&) const = default;
};

using PhantomSpec = std::variant<GaussianSpec, CoherentSpec, SheppLoganSpec>;

/// Evaluates the phantom at one point.
double evaluate(const PhantomSpec& spec, const Vec2& x);
Vec2 center_of(const PhantomSpec& spec);

/// Throws CenterOutsideWindow unless the center lies in the window.
GridImage render(const PhantomSpec& spec, const ImageLayout& layout);
/// Sum of several phantoms.
GridImage render(const std::vector<PhantomSpec>& specs, const ImageLayout& layout);

/// Zeroes pixels outside the boundary or within `margin_px` pixels of it.
void clip_to_domain(GridImage& f, const Boundary& boundary, double margin_px = 2.0);

/// Moves the phantom's center to `new_center` and rotates it by `rotate_by`
/// about that center. Throws CenterOutsideWindow if the new center leaves
/// the square window of the given half width.
PhantomSpec place(const PhantomSpec& spec, const Vec2& new_center, double rotate_by, double half_width = 1.0);

}  // namespace brt
