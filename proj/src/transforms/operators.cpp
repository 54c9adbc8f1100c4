#include <cmath>
#include <sstream>

#include "brt/errors.hpp"
#include "brt/transforms.hpp"

namespace brt {

std::string to_string(FamilySpec::Kind kind) {
  switch (kind) {
    case FamilySpec::Kind::full: return "full";
    case FamilySpec::Kind::half_plane_incoming: return "half-plane-incoming";
    case FamilySpec::Kind::arc: return "arc";
    case FamilySpec::Kind::local: return "local";
  }
  return "?";
}

namespace {

bool in_arc(const Boundary& b, double tau, double lo, double hi) {
  if (!b.closed() || lo <= hi) return tau >= lo && tau <= hi;
  return tau >= lo || tau <= hi;  // arc through the seam of a closed curve
}

bool in_family(const FamilySpec& fam, const Boundary& b, const LineCoords& line, const ReflectionEvent& ev) {
  switch (fam.kind) {
    case FamilySpec::Kind::full: return true;
    case FamilySpec::Kind::half_plane_incoming: return std::sin(ev.beta) > 0.0;
    case FamilySpec::Kind::arc: return in_arc(b, ev.tau0, fam.tau_min, fam.tau_max);
    case FamilySpec::Kind::local:
      return std::abs(line.s - fam.s_center) <= fam.s_half_width &&
             std::abs(angle_diff(line.alpha, fam.alpha_center)) <= fam.alpha_half_width;
  }
  return false;
}

void check_image(const GridImage& f, const ImageLayout& l) {
  if (!(f.layout == l)) throw ValidationError("image layout does not match the operator");
}

void check_data(const Sinogram& g, const SinogramLayout& l) {
  if (!(g.layout == l)) throw ValidationError("sinogram layout does not match the operator");
}

}  // namespace

BrokenRayOperator::BrokenRayOperator(Boundary boundary, FamilySpec family, const ImageLayout& image,
                                     const SinogramLayout& data, RadonQuadrature q)
    : boundary_(std::move(boundary)), family_(family), image_(image), data_(data), quad_(q), chi_(data) {
  const std::size_t bins = static_cast<std::size_t>(data_.n_s) * data_.n_alpha;
  active_.assign(bins, 0);
#pragma omp parallel for schedule(dynamic, 4)
  for (int j = 0; j < data_.n_alpha; ++j) {
    for (int k = 0; k < data_.n_s; ++k) {
      const LineCoords line(data_.s_at(k), data_.alpha_at(j));
      ReflectionEvent ev;
      try {
        ev = reflect_line(boundary_, line);
      } catch (const Error&) {
        continue;  // misses, grazes, or leaves the mirror's extent
      }
      if (!in_family(family_, boundary_, line, ev)) continue;
      const std::size_t bin = static_cast<std::size_t>(j) * data_.n_s + k;
      active_[bin] = 1;
      chi_.set_bilinear(bin, ev.line_out.s, ev.line_out.alpha);
    }
  }

  GridImage probe(image_);
  const int n = image_.n;
  guard_.assign(static_cast<std::size_t>(n) * n, 0);
  const double margin = 2.0 * image_.dx();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 c = probe.center(i, j);
      guard_[static_cast<std::size_t>(i) * n + j] = boundary_.contains(c) && boundary_.distance(c) >= margin;
    }
  }
}

std::size_t BrokenRayOperator::active_count() const {
  std::size_t c = 0;
  for (char a : active_) c += a ? 1 : 0;
  return c;
}

void BrokenRayOperator::validate(const GridImage& f) const {
  check_image(f, image_);
  for (std::size_t p = 0; p < f.data.size(); ++p) {
    if (!std::isfinite(f.data[p])) throw ValidationError("image has non-finite samples");
    if (f.data[p] != 0.0 && !guard_[p])
      throw SupportViolation("image does not vanish within 2 pixels of the reflecting boundary");
  }
}

Sinogram BrokenRayOperator::forward(const GridImage& f) const {
  check_image(f, image_);
  const Sinogram rf = radon(f, data_, quad_);
  Sinogram out = chi_.apply(rf);
  for (std::size_t b = 0; b < out.data.size(); ++b) out.data[b] = active_[b] ? out.data[b] + rf.data[b] : kMasked;
  return out;
}

GridImage BrokenRayOperator::adjoint(const Sinogram& g) const {
  check_data(g, data_);
  Sinogram g0(data_);
  for (std::size_t b = 0; b < g0.data.size(); ++b)
    g0.data[b] = active_[b] && !is_masked(g.data[b]) ? g.data[b] : 0.0;
  Sinogram h = chi_.apply_transpose(g0);
  for (std::size_t b = 0; b < h.data.size(); ++b) h.data[b] += g0.data[b];
  return radon_adjoint(h, image_, quad_);
}

std::string BrokenRayOperator::describe() const {
  std::ostringstream os;
  os << "broken-ray family=" << to_string(family_.kind);
  if (family_.kind == FamilySpec::Kind::arc) os << " tau=[" << family_.tau_min << "," << family_.tau_max << "]";
  if (family_.kind == FamilySpec::Kind::local)
    os << " s0=" << family_.s_center << " alpha0=" << family_.alpha_center << " hs=" << family_.s_half_width
       << " ha=" << family_.alpha_half_width;
  return os.str();
}

ParallelRayOperator::ParallelRayOperator(double offset, const ImageLayout& image, const SinogramLayout& data,
                                         RadonQuadrature q)
    : offset_(offset), image_(image), data_(data), quad_(q), shift_(data) {
  for (int j = 0; j < data_.n_alpha; ++j)
    for (int k = 0; k < data_.n_s; ++k)
      shift_.set_bilinear(static_cast<std::size_t>(j) * data_.n_s + k, data_.s_at(k) + offset_, data_.alpha_at(j));
}

Sinogram ParallelRayOperator::forward(const GridImage& f) const {
  check_image(f, image_);
  const Sinogram rf = radon(f, data_, quad_);
  Sinogram out = shift_.apply(rf);
  for (std::size_t b = 0; b < out.data.size(); ++b) out.data[b] += rf.data[b];
  return out;
}

GridImage ParallelRayOperator::adjoint(const Sinogram& g) const {
  check_data(g, data_);
  Sinogram g0 = g;
  for (double& v : g0.data)
    if (is_masked(v)) v = 0.0;
  Sinogram h = shift_.apply_transpose(g0);
  for (std::size_t b = 0; b < h.data.size(); ++b) h.data[b] += g0.data[b];
  return radon_adjoint(h, image_, quad_);
}

std::string ParallelRayOperator::describe() const {
  std::ostringstream os;
  os << "parallel-ray d=" << offset_;
  return os.str();
}

Sinogram ScaledOperator::forward(const GridImage& f) const {
  Sinogram g = base_->forward(f);
  for (double& v : g.data) v *= scale_;
  return g;
}

GridImage ScaledOperator::adjoint(const Sinogram& g) const {
  GridImage f = base_->adjoint(g);
  for (double& v : f.data) v *= scale_;
  return f;
}

std::string ScaledOperator::describe() const {
  std::ostringstream os;
  os << scale_ << " * " << base_->describe();
  return os.str();
}

Sinogram IdentityOperator::forward(const GridImage& f) const {
  check_image(f, image_);
  Sinogram g(data_layout());
  g.data = f.data;
  return g;
}

GridImage IdentityOperator::adjoint(const Sinogram& g) const {
  const SinogramLayout l = data_layout();
  check_data(g, l);
  GridImage f(image_);
  const double ratio = l.ds() * l.dalpha() / (image_.dx() * image_.dx());
  for (std::size_t p = 0; p < f.data.size(); ++p) f.data[p] = is_masked(g.data[p]) ? 0.0 : g.data[p] * ratio;
  return f;
}

Sinogram checked_forward(const LinearOperator& op, const GridImage& f) {
  op.validate(f);
  return op.forward(f);
}

}  // namespace brt
