#pragma once

// Discrete Radon, broken-ray and parallel-ray operators, their adjoints, and
// the Lambda filter (1/4pi) sqrt(-d^2/ds^2) on sinogram rows.

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "brt/geometry.hpp"

namespace brt {

/// Square pixel grid over a square window centered at the origin.
struct ImageLayout {
  int n = 256;
  double half_width = 1.0;

  double dx() const { return 2.0 * half_width / n; }
  bool operator==(const ImageLayout&) const = default;
};

/// Samples s_k = -s_max + (k + 1/2) ds, alpha_j = j * 2pi / n_alpha.
struct SinogramLayout {
  int n_s = 256;
  int n_alpha = 360;
  double s_max = 1.0;

  double ds() const { return 2.0 * s_max / n_s; }
  double dalpha() const { return kTwoPi / n_alpha; }
  double s_at(int k) const { return -s_max + (k + 0.5) * ds(); }
  double alpha_at(int j) const { return j * dalpha(); }
  bool operator==(const SinogramLayout&) const = default;
};

/// Default sinogram for an image: n_s = n, n_alpha = 360, s_max = half width.
SinogramLayout default_sinogram_layout(const ImageLayout& image);

/// n x n samples at pixel centers, row-major with row 0 at the bottom (y_min).
struct GridImage {
  ImageLayout layout;
  std::vector<double> data;

  GridImage() = default;
  explicit GridImage(const ImageLayout& l) : layout(l), data(static_cast<std::size_t>(l.n) * l.n, 0.0) {}

  int n() const { return layout.n; }
  double dx() const { return layout.dx(); }
  double x_min() const { return -layout.half_width; }
  double x_max() const { return layout.half_width; }
  double y_min() const { return -layout.half_width; }
  double y_max() const { return layout.half_width; }
  /// Center of the pixel in row i (y) and column j (x).
  Vec2 center(int i, int j) const { return {x_min() + (j + 0.5) * dx(), y_min() + (i + 0.5) * dx()}; }
  double& at(int i, int j) { return data[static_cast<std::size_t>(i) * layout.n + j]; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(i) * layout.n + j]; }
  /// Bilinear interpolation between pixel centers; zero outside the grid.
  double sample(const Vec2& p) const;
};

/// Weighted inner product sum f u dx dy.
double inner(const GridImage& f, const GridImage& u);
double l2_norm(const GridImage& f);
double max_abs(const GridImage& f);

inline constexpr double kMasked = std::numeric_limits<double>::quiet_NaN();
inline bool is_masked(double v) { return std::isnan(v); }

/// n_alpha rows of n_s samples; masked bins hold NaN.
struct Sinogram {
  SinogramLayout layout;
  std::vector<double> data;

  Sinogram() = default;
  explicit Sinogram(const SinogramLayout& l)
      : layout(l), data(static_cast<std::size_t>(l.n_s) * l.n_alpha, 0.0) {}

  double& at(int j, int k) { return data[static_cast<std::size_t>(j) * layout.n_s + k]; }
  double at(int j, int k) const { return data[static_cast<std::size_t>(j) * layout.n_s + k]; }
  std::size_t masked_count() const;
};

/// Weighted inner product sum g h ds dalpha over bins unmasked in both.
double inner(const Sinogram& g, const Sinogram& h);
double l2_norm(const Sinogram& g);

// ---------------------------------------------------------------------------
// Radon transform. Line integrals use samples t_m = -T + m h along each line,
// h = dx / 2, with bilinear interpolation; the adjoint is the exact transpose
// under the two weighted inner products.

struct RadonQuadrature {
  double step_factor = 0.5;  ///< h = step_factor * dx
};

Sinogram radon(const GridImage& f, const SinogramLayout& layout, const RadonQuadrature& q = {});
GridImage radon_adjoint(const Sinogram& g, const ImageLayout& layout, const RadonQuadrature& q = {});

/// Serial, unclipped implementations kept as a reference for the kernels.
Sinogram radon_reference(const GridImage& f, const SinogramLayout& layout, const RadonQuadrature& q = {});
GridImage radon_adjoint_reference(const Sinogram& g, const ImageLayout& layout, const RadonQuadrature& q = {});

// ---------------------------------------------------------------------------
// Lambda filter

struct LambdaOptions {
  double power = 1.0;   ///< 1 for Lambda, 0.5 for Lambda^(1/2)
  bool taper = false;   ///< cosine roll-off toward the Nyquist frequency
};

/// Row-wise Fourier multiplier with 2x zero padding: the spectrum of the
/// band-limited ramp kernel of (1/4pi)|D|, raised to `power`.
/// Masked bins are read as zero and stay masked.
Sinogram lambda_filter(const Sinogram& g, const LambdaOptions& opt = {});
inline Sinogram lambda_filter(const Sinogram& g, double power) { return lambda_filter(g, LambdaOptions{power, false}); }

// ---------------------------------------------------------------------------
// Sparse resampling of sinograms: out[b] = sum of weight * in[tap].

class Resampler {
 public:
  struct Tap {
    std::size_t index;
    double weight;
  };

  explicit Resampler(const SinogramLayout& layout);

  /// Adds bilinear taps at (s, alpha) for output bin `bin`; alpha is periodic
  /// and taps with s outside the sampled range are dropped.
  void set_bilinear(std::size_t bin, double s, double alpha);
  void clear(std::size_t bin);

  Sinogram apply(const Sinogram& in) const;
  Sinogram apply_transpose(const Sinogram& in) const;
  const std::vector<Tap>& taps(std::size_t bin) const { return taps_[bin]; }

 private:
  SinogramLayout layout_;
  std::vector<std::vector<Tap>> taps_;
};

// ---------------------------------------------------------------------------
// Operators

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Sinogram forward(const GridImage& f) const = 0;
  virtual GridImage adjoint(const Sinogram& g) const = 0;
  /// Throws if `f` violates the operator's input assumptions.
  virtual void validate(const GridImage& f) const { (void)f; }
  virtual ImageLayout image_layout() const = 0;
  virtual SinogramLayout data_layout() const = 0;
  virtual std::string describe() const = 0;
};

class RadonOperator : public LinearOperator {
 public:
  RadonOperator(const ImageLayout& image, const SinogramLayout& data, RadonQuadrature q = {})
      : image_(image), data_(data), quad_(q) {}

  Sinogram forward(const GridImage& f) const override { return radon(f, data_, quad_); }
  GridImage adjoint(const Sinogram& g) const override { return radon_adjoint(g, image_, quad_); }
  ImageLayout image_layout() const override { return image_; }
  SinogramLayout data_layout() const override { return data_; }
  std::string describe() const override { return "radon"; }

 private:
  ImageLayout image_;
  SinogramLayout data_;
  RadonQuadrature quad_;
};

/// Which broken rays (indexed by the incoming line) enter the data.
struct FamilySpec {
  enum class Kind { full, half_plane_incoming, arc, local };
  Kind kind = Kind::half_plane_incoming;
  double tau_min = 0.0;      ///< arc: hit parameter range
  double tau_max = 0.0;
  double s_center = 0.0;     ///< local: window around one incoming line
  double alpha_center = 0.0;
  double s_half_width = 0.0;
  double alpha_half_width = 0.0;

  static FamilySpec full() { return {Kind::full}; }
  static FamilySpec half_plane_incoming() { return {Kind::half_plane_incoming}; }
  static FamilySpec arc(double t0, double t1) { return {Kind::arc, t0, t1}; }
  static FamilySpec local(double s0, double a0, double hs, double ha) {
    return {Kind::local, 0.0, 0.0, s0, a0, hs, ha};
  }
};

std::string to_string(FamilySpec::Kind kind);

/// B f = Rf + (R f) o chi on the admissible bins of the family; others masked.
class BrokenRayOperator : public LinearOperator {
 public:
  BrokenRayOperator(Boundary boundary, FamilySpec family, const ImageLayout& image,
                    const SinogramLayout& data, RadonQuadrature q = {});

  Sinogram forward(const GridImage& f) const override;
  GridImage adjoint(const Sinogram& g) const override;
  /// SupportViolation unless f vanishes outside the domain and within 2 pixels of the boundary.
  void validate(const GridImage& f) const override;
  ImageLayout image_layout() const override { return image_; }
  SinogramLayout data_layout() const override { return data_; }
  std::string describe() const override;

  const Boundary& boundary() const { return boundary_; }
  const FamilySpec& family() const { return family_; }
  /// True for bins in the family with an admissible reflection.
  bool active(int j, int k) const { return active_[static_cast<std::size_t>(j) * data_.n_s + k]; }
  std::size_t active_count() const;
  /// Pixels allowed to carry mass: inside the domain, at least 2 pixels from the boundary.
  const std::vector<char>& support_guard() const { return guard_; }

 private:
  Boundary boundary_;
  FamilySpec family_;
  ImageLayout image_;
  SinogramLayout data_;
  RadonQuadrature quad_;
  std::vector<char> active_;
  std::vector<char> guard_;
  Resampler chi_;
};

/// P f(s, alpha) = Rf(s, alpha) + Rf(s + d, alpha).
class ParallelRayOperator : public LinearOperator {
 public:
  ParallelRayOperator(double offset, const ImageLayout& image, const SinogramLayout& data, RadonQuadrature q = {});

  Sinogram forward(const GridImage& f) const override;
  GridImage adjoint(const Sinogram& g) const override;
  ImageLayout image_layout() const override { return image_; }
  SinogramLayout data_layout() const override { return data_; }
  std::string describe() const override;
  double offset() const { return offset_; }

 private:
  double offset_;
  ImageLayout image_;
  SinogramLayout data_;
  RadonQuadrature quad_;
  Resampler shift_;
};

/// c * A for any operator A.
class ScaledOperator : public LinearOperator {
 public:
  ScaledOperator(std::shared_ptr<const LinearOperator> base, double scale) : base_(std::move(base)), scale_(scale) {}

  Sinogram forward(const GridImage& f) const override;
  GridImage adjoint(const Sinogram& g) const override;
  ImageLayout image_layout() const override { return base_->image_layout(); }
  SinogramLayout data_layout() const override { return base_->data_layout(); }
  std::string describe() const override;

 private:
  std::shared_ptr<const LinearOperator> base_;
  double scale_;
};

/// Copies pixels into an n x n sinogram; the adjoint rescales by the ratio of
/// cell areas so the pair is exact.
class IdentityOperator : public LinearOperator {
 public:
  explicit IdentityOperator(const ImageLayout& image) : image_(image) {}

  Sinogram forward(const GridImage& f) const override;
  GridImage adjoint(const Sinogram& g) const override;
  ImageLayout image_layout() const override { return image_; }
  SinogramLayout data_layout() const override { return {image_.n, image_.n, image_.half_width}; }
  std::string describe() const override { return "identity"; }

 private:
  ImageLayout image_;
};

/// Validates, then applies. Convenience for one-shot forward projections.
Sinogram checked_forward(const LinearOperator& op, const GridImage& f);

}  // namespace brt
