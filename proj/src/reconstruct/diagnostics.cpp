#include <algorithm>
#include <cmath>
#include <limits>

#include "brt/errors.hpp"
#include "brt/reconstruct.hpp"

namespace brt {

double relative_error(const GridImage& f_true, const GridImage& f_rec) {
  const double ref = l2_norm(f_true);
  if (ref == 0.0) throw ZeroReference("relative error undefined for a zero reference");
  return l2_norm(error_map(f_true, f_rec)) / ref;
}

GridImage error_map(const GridImage& f_true, const GridImage& f_rec) {
  if (!(f_true.layout == f_rec.layout)) throw ValidationError("image layouts differ");
  GridImage e(f_true.layout);
  for (std::size_t p = 0; p < e.data.size(); ++p) e.data[p] = f_rec.data[p] - f_true.data[p];
  return e;
}

namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  const double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * d));
}

}  // namespace

double distance_to_polylines(const Vec2& p, const std::vector<std::vector<Vec2>>& lines) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : lines) {
    if (line.size() == 1) best = std::min(best, norm(p - line[0]));
    for (std::size_t i = 0; i + 1 < line.size(); ++i) best = std::min(best, segment_distance(p, line[i], line[i + 1]));
  }
  return best;
}

std::vector<Vec2> circle_polyline(double radius, int segments) {
  std::vector<Vec2> pts;
  for (int i = 0; i <= segments; ++i) pts.push_back(radius * dir_v(kTwoPi * i / segments));
  return pts;
}

LocalizationScore artifact_localization(const GridImage& error, const std::vector<std::vector<Vec2>>& locus,
                                        const LocalizationOptions& opt) {
  const bool empty = std::all_of(locus.begin(), locus.end(), [](const auto& l) { return l.empty(); });
  if (empty) throw EmptyLocus("predicted locus is empty");
  if (!(opt.quantile >= 0.0 && opt.quantile < 1.0)) throw ValidationError("quantile must lie in [0, 1)");

  const int n = error.n();
  std::vector<std::pair<double, Vec2>> candidates;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 c = error.center(i, j);
      const bool excluded = std::any_of(opt.exclusions.begin(), opt.exclusions.end(),
                                        [&](const ExclusionDisk& d) { return norm(c - d.center) <= d.radius; });
      if (!excluded) candidates.emplace_back(std::abs(error.at(i, j)), c);
    }
  }
  LocalizationScore score;
  if (candidates.empty()) {
    score.vacuous = true;
    return score;
  }
  std::vector<double> mags;
  mags.reserve(candidates.size());
  for (const auto& c : candidates) mags.push_back(c.first);
  const std::size_t rank = static_cast<std::size_t>(std::floor(opt.quantile * (mags.size() - 1)));
  std::nth_element(mags.begin(), mags.begin() + rank, mags.end());
  const double threshold = mags[rank];

  double total = 0.0;
  for (const auto& [mag, c] : candidates) {
    if (mag <= threshold || mag == 0.0) continue;
    total += distance_to_polylines(c, locus) / error.dx();
    ++score.pixel_count;
  }
  if (score.pixel_count == 0) {
    score.vacuous = true;
    return score;
  }
  score.mean_distance_px = total / score.pixel_count;
  return score;
}

double energy_in_disk(const GridImage& f, const Vec2& center, double radius) {
  double acc = 0.0;
  for (int i = 0; i < f.n(); ++i)
    for (int j = 0; j < f.n(); ++j)
      if (norm(f.center(i, j) - center) <= radius) acc += f.at(i, j) * f.at(i, j);
  return acc * f.dx() * f.dx();
}

double energy(const GridImage& f) { return inner(f, f); }

double projection_amplitude(const GridImage& f, const GridImage& ref, const Vec2& center, double radius) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < f.n(); ++i) {
    for (int j = 0; j < f.n(); ++j) {
      if (norm(f.center(i, j) - center) > radius) continue;
      num += f.at(i, j) * ref.at(i, j);
      den += ref.at(i, j) * ref.at(i, j);
    }
  }
  if (den == 0.0) throw ZeroReference("reference vanishes on the disk");
  return num / den;
}

std::vector<char> domain_mask(const Boundary& boundary, const ImageLayout& layout, double margin_px) {
  const GridImage probe(layout);
  const int n = layout.n;
  std::vector<char> mask(static_cast<std::size_t>(n) * n, 0);
  const double margin = margin_px * layout.dx();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 c = probe.center(i, j);
      mask[static_cast<std::size_t>(i) * n + j] = boundary.contains(c) && boundary.distance(c) >= margin;
    }
  return mask;
}

std::vector<char> disk_mask(const ImageLayout& layout, const Vec2& center, double radius) {
  const GridImage probe(layout);
  const int n = layout.n;
  std::vector<char> mask(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mask[static_cast<std::size_t>(i) * n + j] = norm(probe.center(i, j) - center) <= radius;
  return mask;
}

}  // namespace brt
