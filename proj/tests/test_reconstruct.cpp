#include <memory>
#include <random>

#include "brt/conjugate.hpp"
#include "brt/errors.hpp"
#include "brt/phantoms.hpp"
#include "brt/reconstruct.hpp"
#include "doctest.h"

using namespace brt;
using doctest::Approx;

namespace {

GridImage smooth_image(const ImageLayout& l) {
  return render(std::vector<PhantomSpec>{GaussianSpec{{0.2, -0.1}, 0.1, 1.0}, GaussianSpec{{-0.3, 0.25}, 0.07, -0.6}},
                l);
}

}  // namespace

TEST_CASE("relative error") {
  const ImageLayout l{16, 1.0};
  GridImage f(l), g(l);
  f.at(3, 4) = 2.0;
  CHECK(relative_error(f, f) == 0.0);
  CHECK(relative_error(f, g) == Approx(1.0));
  g.at(3, 4) = 1.0;
  CHECK(relative_error(f, g) == Approx(0.5));
  CHECK(error_map(f, g).at(3, 4) == -1.0);
  CHECK_THROWS_AS(relative_error(g = GridImage(l), f), ZeroReference);
  CHECK_THROWS_AS(relative_error(f, GridImage(ImageLayout{8, 1.0})), ValidationError);
}

TEST_CASE("Landweber on the identity converges geometrically") {
  const ImageLayout l{32, 1.0};
  const IdentityOperator op(l);
  const GridImage f = smooth_image(l);
  const Sinogram g = op.forward(f);
  const SinogramLayout dl = op.data_layout();
  const double lambda = dl.ds() * dl.dalpha() / (l.dx() * l.dx());
  LandweberConfig cfg;
  cfg.apply_filter = false;
  cfg.step_size = 0.5 / lambda;
  cfg.n_iters = 12;
  cfg.record_every = 1;
  const LandweberResult res = landweber(g, op, cfg);
  REQUIRE(res.snapshots.size() == 12);
  double prev = 1.0;  // relative error of f_0 = 0
  for (const auto& [k, fk] : res.snapshots) {
    const double e = relative_error(f, fk);
    CHECK(e / prev == Approx(0.5).epsilon(1e-9));
    prev = e;
  }
  const StepEstimate est = estimate_step(op, 30, 7, false);
  CHECK(est.lambda_max == Approx(lambda).epsilon(1e-9));
}

TEST_CASE("Landweber with zero data stays at zero") {
  const ImageLayout l{32, 1.0};
  const RadonOperator op(l, SinogramLayout{32, 60, 1.0});
  LandweberConfig cfg;
  cfg.n_iters = 5;
  cfg.record_every = 1;
  const LandweberResult res = landweber(Sinogram(op.data_layout()), op, cfg);
  for (const auto& snap : res.snapshots)
    for (double v : snap.second.data) CHECK(v == 0.0);
  for (double r : res.residuals) CHECK(r == 0.0);
}

TEST_CASE("power iteration converges and scales like 1/c^2") {
  const ImageLayout l{32, 1.0};
  auto base = std::make_shared<RadonOperator>(l, SinogramLayout{32, 60, 1.0});
  const StepEstimate a = estimate_step(*base);
  REQUIRE(a.history.size() == 30);
  for (std::size_t i = a.history.size() - 5; i < a.history.size(); ++i)
    CHECK(std::abs(a.history[i] - a.history[i - 1]) < 0.01 * a.history.back());
  CHECK(a.step_size == Approx(1.0 / a.lambda_max));
  const ScaledOperator scaled(base, 3.0);
  const StepEstimate b = estimate_step(scaled);
  CHECK(b.step_size == Approx(a.step_size / 9.0).epsilon(0.01));
}

TEST_CASE("Landweber residual decreases with the estimated step") {
  const ImageLayout l{48, 1.0};
  const RadonOperator op(l, SinogramLayout{48, 90, 1.0});
  const Sinogram g = op.forward(smooth_image(l));
  LandweberConfig cfg;
  cfg.n_iters = 20;
  const LandweberResult res = landweber(g, op, cfg);
  REQUIRE(res.residuals.size() == 21);
  for (std::size_t k = 1; k < res.residuals.size(); ++k) CHECK(res.residuals[k] <= res.residuals[k - 1]);
  CHECK(res.residuals.back() < 0.5 * res.residuals.front());
}

TEST_CASE("Landweber detects divergence") {
  const ImageLayout l{32, 1.0};
  const RadonOperator op(l, SinogramLayout{32, 60, 1.0});
  const Sinogram g = op.forward(smooth_image(l));
  LandweberConfig cfg;
  cfg.step_size = 10.0 * estimate_step(op).step_size;
  cfg.n_iters = 50;
  CHECK_THROWS_AS(landweber(g, op, cfg), DivergenceDetected);
}

TEST_CASE("support projection keeps iterates inside the mask") {
  const ImageLayout l{32, 1.0};
  const RadonOperator op(l, SinogramLayout{32, 60, 1.0});
  const Sinogram g = op.forward(smooth_image(l));
  LandweberConfig cfg;
  cfg.n_iters = 6;
  cfg.record_every = 2;
  cfg.support_mask = disk_mask(l, {0.0, 0.0}, 0.5);
  const LandweberResult res = landweber(g, op, cfg);
  for (const auto& snap : res.snapshots)
    for (std::size_t p = 0; p < snap.second.data.size(); ++p)
      if (!cfg.support_mask[p]) CHECK(snap.second.data[p] == 0.0);
  // Projecting an already projected iterate changes nothing.
  GridImage again = res.final;
  for (std::size_t p = 0; p < again.data.size(); ++p)
    if (!cfg.support_mask[p]) again.data[p] = 0.0;
  CHECK(again.data == res.final.data);
  cfg.support_mask.pop_back();
  CHECK_THROWS_AS(landweber(g, op, cfg), ValidationError);
}

TEST_CASE("FBP inverts the Radon transform of a smooth function") {
  const ImageLayout l{128, 1.0};
  const RadonOperator op(l, default_sinogram_layout(l));
  const GridImage f = smooth_image(l);
  CHECK(relative_error(f, fbp(op.forward(f), op)) < 0.05);
}

TEST_CASE("Landweber recovers a visible singularity when no conjugate points are in play") {
  // Near-side arc around (1, 0) and a coherent state at (0.5, 0) whose
  // wavefront is conormal to the near-horizontal lines that reach the arc.
  const Boundary disk = Boundary::circle(1.0);
  const double t0 = kTwoPi - 0.45, t1 = 0.45;
  const Vec2 p{0.5, 0.0};
  const double sigma = 0.05;

  // Along the family's rays from the center, conjugate points leave the domain;
  // from anywhere in the 3 sigma disk they stay clear of the support.
  for (int dx = -3; dx <= 3; ++dx)
    for (int dy = -3; dy <= 3; ++dy) {
      const Vec2 x = p + Vec2{sigma * dx, sigma * dy};
      if (norm(x - p) > 3.0 * sigma) continue;
      for (int i = 0; i < 720; ++i) {
        ReflectionEvent ev;
        try {
          ev = reflect(disk, LineCoords::through(x, kTwoPi * i / 720), x);
        } catch (const Error&) {
          continue;
        }
        if (ev.tau0 < t0 && ev.tau0 > t1) continue;
        const auto q = conjugate_point(x, ev);
        if (!q || !disk.contains(*q)) continue;
        CHECK((dx != 0 || dy != 0));
        CHECK(norm(*q - p) > 3.0 * sigma);
      }
    }

  const ImageLayout il{96, 1.0};
  const BrokenRayOperator op(disk, FamilySpec::arc(t0, t1), il, default_sinogram_layout(il));
  LandweberConfig cfg;
  cfg.n_iters = 100;
  cfg.support_mask = domain_mask(disk, il);

  CoherentSpec visible;
  visible.center = p;
  visible.sigma = sigma;
  visible.theta = 0.0;  // oscillates along (0, 1)
  GridImage f = render(visible, il);
  clip_to_domain(f, disk);
  CHECK(relative_error(f, landweber(checked_forward(op, f), op, cfg).final) < 0.15);

  // Control: the rotated wavefront is invisible from this arc.
  CoherentSpec hidden = visible;
  hidden.theta = 0.5 * kPi;
  GridImage h = render(hidden, il);
  clip_to_domain(h, disk);
  CHECK(relative_error(h, landweber(checked_forward(op, h), op, cfg).final) > 0.9);
}

TEST_CASE("artifact localization") {
  const ImageLayout l{64, 1.0};
  GridImage e(l);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
  for (double& v : e.data) v = noise(rng);
  const std::vector<std::vector<Vec2>> locus{circle_polyline(0.5)};
  for (int i = 0; i < l.n; ++i)
    for (int j = 0; j < l.n; ++j)
      if (std::abs(norm(e.center(i, j)) - 0.5) < 0.5 * l.dx()) e.at(i, j) = 1.0 + 100.0 * noise(rng);
  LocalizationOptions opt;
  opt.quantile = 0.98;  // top 2% of 4096 pixels: fewer than the ring holds
  const LocalizationScore on = artifact_localization(e, locus, opt);
  CHECK_FALSE(on.vacuous);
  CHECK(on.pixel_count > 40);
  CHECK(on.mean_distance_px < 0.5);

  const LocalizationScore off = artifact_localization(e, {circle_polyline(0.8)}, opt);
  CHECK(off.mean_distance_px > 9.0);  // rings 0.3 apart = 9.6 px

  opt.exclusions.push_back({{0.0, 0.0}, 3.0});
  CHECK(artifact_localization(e, locus, opt).vacuous);
  CHECK(artifact_localization(GridImage(l), locus).vacuous);
  CHECK_THROWS_AS(artifact_localization(e, {}), EmptyLocus);
  CHECK_THROWS_AS(artifact_localization(e, {{}}), EmptyLocus);
}

TEST_CASE("energy helpers and masks") {
  const ImageLayout l{64, 1.0};
  GridImage f(l);
  f.at(32, 32) = 2.0;
  CHECK(energy(f) == Approx(4.0 * l.dx() * l.dx()));
  CHECK(energy_in_disk(f, f.center(32, 32), 0.01) == Approx(energy(f)));
  CHECK(energy_in_disk(f, {-0.5, -0.5}, 0.1) == 0.0);
  CHECK(projection_amplitude(f, f, f.center(32, 32), 0.1) == Approx(1.0));
  CHECK_THROWS_AS(projection_amplitude(f, GridImage(l), {0.0, 0.0}, 0.1), ZeroReference);

  const auto mask = domain_mask(Boundary::circle(1.0), l, 2.0);
  for (int i = 0; i < l.n; ++i)
    for (int j = 0; j < l.n; ++j) {
      const double r = norm(f.center(i, j));
      const bool in = mask[static_cast<std::size_t>(i) * l.n + j];
      if (r < 1.0 - 2.5 * l.dx()) CHECK(in);
      if (r > 1.0 - 1.9 * l.dx()) CHECK_FALSE(in);
    }
  CHECK(distance_to_polylines({0.0, 0.0}, {circle_polyline(0.5)}) == Approx(0.5).epsilon(1e-5));
}
