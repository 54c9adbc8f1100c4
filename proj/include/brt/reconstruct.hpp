#pragma once

// Filtered backprojection, Landweber iteration and error diagnostics.

#include <cstdint>
#include <utility>
#include <vector>

#include "brt/transforms.hpp"

namespace brt {

/// A^* Lambda g.
GridImage fbp(const Sinogram& g, const LinearOperator& op, const LambdaOptions& filter = {});

struct LandweberConfig {
  double step_size = 0.0;        ///< gamma; 0 means estimate by power iteration
  int n_iters = 100;
  std::vector<char> support_mask;  ///< empty = no projection; else 1 keeps a pixel
  int record_every = 0;          ///< snapshot cadence; 0 keeps only the final iterate
  bool apply_filter = true;      ///< false drops Lambda (plain least squares)
  int divergence_window = 3;     ///< consecutive residual increases tolerated
};

struct LandweberResult {
  GridImage final;
  std::vector<std::pair<int, GridImage>> snapshots;
  /// residuals[k] = ||Lambda^(1/2)(g - A f_k)|| for k = 0 .. n_iters.
  std::vector<double> residuals;
  double step_size = 0.0;
};

/// f_0 = 0, f_{k+1} = P[f_k + gamma A^* Lambda (g - A f_k)].
/// Throws DivergenceDetected when the residual rises `divergence_window` times in a row.
LandweberResult landweber(const Sinogram& g, const LinearOperator& op, const LandweberConfig& cfg);

struct StepEstimate {
  double step_size = 0.0;
  double lambda_max = 0.0;
  std::vector<double> history;  ///< Rayleigh quotient per power step
};

/// Power iteration on f -> A^* Lambda A f from a seeded random start.
StepEstimate estimate_step(const LinearOperator& op, int iterations = 30, std::uint64_t seed = 7,
                           bool apply_filter = true);
inline double step_size_estimate(const LinearOperator& op) { return estimate_step(op).step_size; }

/// ||f_true - f_rec|| / ||f_true||; throws ZeroReference for a zero reference.
double relative_error(const GridImage& f_true, const GridImage& f_rec);
/// f_rec - f_true.
GridImage error_map(const GridImage& f_true, const GridImage& f_rec);

struct ExclusionDisk {
  Vec2 center;
  double radius = 0.0;
};

struct LocalizationOptions {
  double quantile = 0.99;
  std::vector<ExclusionDisk> exclusions;
};

struct LocalizationScore {
  bool vacuous = false;          ///< no pixel qualified; counts as a pass
  double mean_distance_px = 0.0;
  std::size_t pixel_count = 0;
};

/// Mean distance (pixels) from the strongest error pixels outside the
/// exclusion disks to the predicted locus. Throws EmptyLocus.
LocalizationScore artifact_localization(const GridImage& error, const std::vector<std::vector<Vec2>>& locus,
                                        const LocalizationOptions& opt = {});

/// Distance from a point to a set of polylines.
double distance_to_polylines(const Vec2& p, const std::vector<std::vector<Vec2>>& lines);
/// Closed polyline approximating a centered circle.
std::vector<Vec2> circle_polyline(double radius, int segments = 1024);

/// Sum of f^2 dx dy over pixels within `radius` of `center`.
double energy_in_disk(const GridImage& f, const Vec2& center, double radius);
double energy(const GridImage& f);
/// Least-squares amplitude c minimizing ||f - c * ref|| over the disk.
double projection_amplitude(const GridImage& f, const GridImage& ref, const Vec2& center, double radius);

/// Mask of pixel centers inside the boundary at least `margin_px` pixels away from it.
std::vector<char> domain_mask(const Boundary& boundary, const ImageLayout& layout, double margin_px = 2.0);
/// Mask of pixel centers within `radius` of `center`.
std::vector<char> disk_mask(const ImageLayout& layout, const Vec2& center, double radius);

}  // namespace brt
