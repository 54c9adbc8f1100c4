#pragma once

// Conjugate points and covectors along broken rays, caustics, the tangent
// conjugate locus of a circular mirror, conjugate chains in the disk, and the
// closed-form artifact predictors (parabola criterion, polygon radii).

#include <optional>
#include <string>
#include <vector>

#include "brt/geometry.hpp"

namespace brt {

/// A point-direction pair (x, xi); xi carries the frequency scale in its norm.
struct Covector {
  Vec2 x;
  Vec2 xi;
};

/// First-order data of a broken-ray family at one broken ray: the map chi,
/// its Jacobian, and (optionally) the start point q0 of the outgoing ray with
/// its partial derivatives in (s1, alpha1). Without q0 the outgoing part is the
/// whole line, so a conjugate point always exists unless d(alpha2)/d(alpha1) = 0.
struct TransferData {
  LineCoords line_in;
  LineCoords line_out;
  Mat2 jacobian = Mat2::identity();
  std::optional<Vec2> q0;
  Vec2 dq0_ds;
  Vec2 dq0_dalpha;
};

TransferData transfer_from(const ReflectionEvent& event);
/// Parallel-ray family: chi(s, alpha) = (s + offset, alpha).
TransferData translation_transfer(const LineCoords& line_in, double offset);

/// Total derivatives along rays issued from a fixed source p.
struct SourceDerivatives {
  double dalpha2 = 0.0;   ///< d(alpha2)/d(alpha1)
  double ds2 = 0.0;       ///< d(s2)/d(alpha1)
  double dq0_w2 = 0.0;    ///< <d(q0)/d(alpha1), w(alpha2)>
};

/// Chain rule with ds1/dalpha1 = -<p, v(alpha1)> (from s1 = <p, w(alpha1)>).
SourceDerivatives source_derivatives(const Vec2& p, const TransferData& data);

/// Conjugate point of `p` on the outgoing part, if it exists.
///
/// `q0_shift` moves the outgoing ray's start to q0 + shift * v(alpha2); it only
/// matters through the existence test. Throws DegenerateDirection when no q0
/// is given and d(alpha2)/d(alpha1) vanishes (conjugate point at infinity).
std::optional<Vec2> conjugate_point(const Vec2& p, const TransferData& data, double q0_shift = 0.0);
std::optional<Vec2> conjugate_point(const Vec2& p, const ReflectionEvent& event);

/// Conjugate covector: eta = lambda / det(d chi) * d(alpha2)/d(alpha1) * w(alpha2)
/// where xi = lambda w(alpha1). Throws ValidationError if xi is not conormal.
std::optional<Covector> conjugate_covector(const Covector& cv, const TransferData& data);
std::optional<Covector> conjugate_covector(const Covector& cv, const ReflectionEvent& event);

// ---------------------------------------------------------------------------
// Caustics

enum class SampleFlag { ok, outside_domain, no_conjugate, inadmissible };
std::string to_string(SampleFlag flag);

struct CausticSample {
  double alpha = 0.0;
  double t = 0.0;  ///< path length from the source to the conjugate point
  Vec2 point;
  SampleFlag flag = SampleFlag::inadmissible;
};

struct CausticOptions {
  double alpha_min = 0.0;
  double alpha_max = kTwoPi;
  int n_samples = 720;
  /// Neighbouring conjugate points farther apart than this get refined.
  double refine_distance = 2.0 * (2.0 / 256.0);
  int max_refine_depth = 10;
};

/// Conjugate points of `source` over a fan of directions, ordered by alpha.
/// Throws EmptyCaustic if no direction yields a conjugate point.
std::vector<CausticSample> caustic_curve(const Vec2& source, const Boundary& boundary,
                                         const CausticOptions& options = {});

/// Splits caustic samples into polylines of consecutive in-domain points.
std::vector<std::vector<Vec2>> caustic_polylines(const std::vector<CausticSample>& samples);

// ---------------------------------------------------------------------------
// Tangent conjugate locus for a circular mirror centered at the origin

enum class CuspKind { normal_incidence, perpendicular };
std::string to_string(CuspKind kind);

struct LocusSample {
  double alpha = 0.0;
  double t = 0.0;
  Vec2 point;
  bool on_locus = false;
  double residual = 0.0;  ///< |F(alpha, t)| after polishing
};

/// A zero of dF/dalpha on the locus: beta = 0 or cos(beta) = t1 / R.
struct LocusZero {
  double alpha = 0.0;
  CuspKind kind = CuspKind::normal_incidence;
  double derivative = 0.0;  ///< derivative of the vanishing factor in alpha
  bool simple = false;
  bool on_locus = false;    ///< the conjugate point exists (finite) there
};

struct TangentLocus {
  std::vector<LocusSample> samples;
  std::vector<LocusZero> zeros;
};

/// F(alpha, t) = (2 kappa t1 / <w, tangent> - 1)(t - t1) - t1 for the circle.
double locus_function(const Vec2& p, double radius, double alpha, double t);
/// Closed form of dF/dalpha evaluated on the zero set of F.
double locus_dF_dalpha(const Vec2& p, double radius, double alpha);

/// Throws CenterSource when p is the center, ValidationError when p is outside.
TangentLocus tangent_conjugate_locus(const Vec2& p, double radius, int n_samples = 1440);

// ---------------------------------------------------------------------------
// Closed-form predictors

/// Source (0, -d) under the mirror -4 a y = x^2 hitting at abscissa x0:
/// conjugate points exist iff (a - d)(3/4 x0^2 - a d) > 0.
bool parabola_criterion(double a, double d, double x0);

struct PolygonRadius {
  int p = 0;  ///< number of sides
  int q = 0;  ///< winding number
  double radius = 0.0;
};

/// Radii cos(q pi / p) for p = 2n <= 2 n_max, odd q with 2 <= 2q < p and
/// gcd(p, q) = 1; sorted descending without duplicates.
std::vector<PolygonRadius> polygon_artifact_radii(int n_max);

// ---------------------------------------------------------------------------
// Conjugate chains in the disk

/// Relative tolerance of the radial test.
inline constexpr double kRadialTolerance = 1e-9;

/// x is the midpoint of the chord through x conormal to xi (disk centered at 0).
bool is_radial(const Covector& cv, double radius);

/// Position of x along its chord: d = R cos(beta) (a + 1), d the distance to
/// the forward hit. Radial covectors have a = 0.
double chord_coordinate(const Covector& cv, double radius);

/// Iterates 1/a_{i+1} = 1/a_i + 2 (direction +1) or its inverse (direction -1)
/// until a leaves (-1, 1) or `steps` values have been produced. Element 0 is a0.
std::vector<double> mirror_recurrence(double a0, int steps, int direction);

enum class ChainStatus { complete, incomplete, truncated };
std::string to_string(ChainStatus status);

struct ChainDirection {
  ChainStatus status = ChainStatus::truncated;
  int index = 0;         ///< escape index for incomplete, last index otherwise
  bool grazing = false;  ///< walk stopped at a grazing bounce
};

struct ChainEntry {
  int index = 0;
  Covector cv;
  LineCoords line;  ///< oriented line carrying cv as incoming part
  double a = 0.0;   ///< chord coordinate
};

struct ConjugateChain {
  std::vector<ChainEntry> entries;  ///< sorted by index
  ChainDirection positive;
  ChainDirection negative;

  bool complete() const {
    return positive.status == ChainStatus::complete && negative.status == ChainStatus::complete;
  }
};

inline constexpr int kDefaultChainLength = 64;

/// Walks the billiard in both directions from cv, collecting conjugate covectors.
ConjugateChain conjugate_chain(const Covector& cv, double radius, int max_index = kDefaultChainLength);

}  // namespace brt
