#include <cmath>

#include "brt/errors.hpp"
#include "brt/transforms.hpp"

namespace brt {

namespace {

// Positions within rounding of a grid node snap onto it, so exact shifts stay exact.
double snapped(double f) {
  const double r = std::round(f);
  return std::abs(f - r) < 1e-9 ? r : f;
}

}  // namespace

Resampler::Resampler(const SinogramLayout& layout)
    : layout_(layout), taps_(static_cast<std::size_t>(layout.n_s) * layout.n_alpha) {}

void Resampler::clear(std::size_t bin) { taps_.at(bin).clear(); }

void Resampler::set_bilinear(std::size_t bin, double s, double alpha) {
  auto& taps = taps_.at(bin);
  taps.clear();
  const int ns = layout_.n_s;
  const int na = layout_.n_alpha;
  const double fs = snapped((s + layout_.s_max) / layout_.ds() - 0.5);
  const double fa = snapped(wrap_angle(alpha) / layout_.dalpha());
  const double ks = std::floor(fs);
  const double ja = std::floor(fa);
  const double ts = fs - ks;
  const double ta = fa - ja;
  const int k0 = static_cast<int>(ks);
  const int j0 = static_cast<int>(ja) % na;
  const int j1 = (j0 + 1) % na;
  const auto add = [&](int j, int k, double w) {
    if (w == 0.0 || k < 0 || k >= ns) return;
    taps.push_back({static_cast<std::size_t>(j) * ns + k, w});
  };
  add(j0, k0, (1.0 - ts) * (1.0 - ta));
  add(j0, k0 + 1, ts * (1.0 - ta));
  add(j1, k0, (1.0 - ts) * ta);
  add(j1, k0 + 1, ts * ta);
}

Sinogram Resampler::apply(const Sinogram& in) const {
  if (!(in.layout == layout_)) throw ValidationError("resampler layout mismatch");
  Sinogram out(layout_);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < taps_.size(); ++b) {
    double acc = 0.0;
    for (const Tap& t : taps_[b]) {
      const double v = in.data[t.index];
      if (!is_masked(v)) acc += t.weight * v;
    }
    out.data[b] = acc;
  }
  return out;
}

Sinogram Resampler::apply_transpose(const Sinogram& in) const {
  if (!(in.layout == layout_)) throw ValidationError("resampler layout mismatch");
  Sinogram out(layout_);
  for (std::size_t b = 0; b < taps_.size(); ++b) {
    const double v = in.data[b];
    if (is_masked(v) || v == 0.0) continue;
    for (const Tap& t : taps_[b]) out.data[t.index] += t.weight * v;
  }
  return out;
}

}  // namespace brt
