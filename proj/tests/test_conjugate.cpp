#include <algorithm>
#include <random>
#include <set>

#include "brt/conjugate.hpp"
#include "brt/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace brt;
using doctest::Approx;

namespace {

const Boundary kDisk = Boundary::circle(1.0);

ReflectionEvent shoot(const Boundary& b, const Vec2& p, double alpha) {
  return reflect(b, LineCoords::through(p, alpha), p);
}

}  // namespace

TEST_CASE("the center of the disk is conjugate to itself") {
  for (double a : {0.0, 0.7, 2.0, 4.1}) {
    const auto ev = shoot(kDisk, {0.0, 0.0}, a);
    const auto d = source_derivatives({0.0, 0.0}, transfer_from(ev));
    CHECK(d.dalpha2 == Approx(1.0));
    const auto q = conjugate_point({0.0, 0.0}, ev);
    REQUIRE(q);
    CHECK(norm(*q) < 1e-12);
  }
}

TEST_CASE("off-center source on the disk: q = (0.25, 0)") {
  const Vec2 p{-0.5, 0.0};
  const auto ev = shoot(kDisk, p, 0.0);
  const auto d = source_derivatives(p, transfer_from(ev));
  CHECK(d.dalpha2 == Approx(2.0));  // total derivative 2 t1 / cos(beta) - 1 with t1 = 1.5
  const auto q = conjugate_point(p, ev);
  REQUIRE(q);
  CHECK(q->x == Approx(0.25));
  CHECK(std::abs(q->y) < 1e-12);
  const auto env = testing::envelope_point(kDisk, p, 0.0);
  REQUIRE(env);
  CHECK(norm(*env - *q) < 1e-3);
}

TEST_CASE("a source at the parabola's focus has no conjugate points") {
  const Boundary mirror = Boundary::parabola(1.0, 4.0);
  for (double a : {0.6, 1.0, kPi / 2, 2.0, 2.5}) {
    const auto ev = shoot(mirror, {0.0, -1.0}, a);
    CHECK_FALSE(conjugate_point({0.0, -1.0}, ev).has_value());
  }
}

TEST_CASE("whole-line transfer with parallel outgoing rays is degenerate") {
  const Boundary mirror = Boundary::parabola(1.0, 4.0);
  auto data = transfer_from(shoot(mirror, {0.0, -1.0}, 1.0));
  data.q0.reset();
  CHECK_THROWS_AS(conjugate_point({0.0, -1.0}, data), DegenerateDirection);
}

TEST_CASE("envelope oracle on random cases") {
  std::mt19937_64 rng(21);
  for (const auto& b : testing::all_boundaries()) {
    CAPTURE(testing::boundary_name(b));
    int found = 0;
    for (int tries = 0; found < 20 && tries < 5000; ++tries) {
      const auto [p, ev] = testing::random_event(b, rng);
      const auto q = conjugate_point(p, ev);
      if (!q || norm(*q - ev.hit_point) > 10.0) continue;
      const auto env = testing::envelope_point(b, p, ev.line_in.alpha);
      REQUIRE(env);
      CHECK(norm(*env - *q) < 1e-3);
      ++found;
    }
    CHECK(found == 20);
  }
}

TEST_CASE("conjugacy is reciprocal along the reversed broken ray") {
  std::mt19937_64 rng(23);
  for (const auto& b : testing::all_boundaries()) {
    CAPTURE(testing::boundary_name(b));
    int found = 0;
    for (int tries = 0; found < 20 && tries < 5000; ++tries) {
      const auto [p, ev] = testing::random_event(b, rng);
      const auto q = conjugate_point(p, ev);
      if (!q || !b.contains(*q) || norm(*q - ev.hit_point) < 1e-3) continue;
      const auto back = reflect(b, ev.line_out.reversed(), *q);
      CHECK(norm(back.hit_point - ev.hit_point) < 1e-9);
      const auto p2 = conjugate_point(*q, back);
      REQUIRE(p2);
      CHECK(norm(*p2 - p) < 1e-6);
      ++found;
    }
    CHECK(found == 20);
  }
}

TEST_CASE("moving q0 along the outgoing ray keeps the existence answer") {
  std::mt19937_64 rng(29);
  for (const auto& b : testing::all_boundaries()) {
    int checked = 0;
    for (int tries = 0; checked < 30 && tries < 5000; ++tries) {
      const auto [p, ev] = testing::random_event(b, rng);
      const auto data = transfer_from(ev);
      const auto d = source_derivatives(p, data);
      // Stability radius |<dq0/dalpha1, w2>| / |dalpha2| (the distance to q along the ray).
      if (std::abs(d.dq0_w2) < 0.02 * std::abs(d.dalpha2)) continue;
      const bool base = conjugate_point(p, data).has_value();
      for (double eps : {-0.0099, -0.005, 0.003, 0.0099}) CHECK(conjugate_point(p, data, eps).has_value() == base);
      ++checked;
    }
    CHECK(checked == 30);
  }
}

TEST_CASE("conjugate covector on the disk") {
  const double lambda = 3.0;
  const Covector cv{{-0.5, 0.0}, {0.0, lambda}};
  const auto ev = shoot(kDisk, cv.x, 0.0);
  const auto out = conjugate_covector(cv, ev);
  REQUIRE(out);
  CHECK(out->x.x == Approx(0.25));
  CHECK(std::abs(out->xi.x) < 1e-12);
  CHECK(out->xi.y == Approx(-2.0 * lambda));
  CHECK_THROWS_AS(conjugate_covector(Covector{{-0.5, 0.0}, {1.0, 1.0}}, ev), ValidationError);
}

TEST_CASE("|eta| / |xi| = |d alpha2 / d alpha1| when det = 1") {
  std::mt19937_64 rng(31);
  for (const auto& b : testing::all_boundaries()) {
    for (int i = 0; i < 30; ++i) {
      const auto [p, ev] = testing::random_event(b, rng);
      const Covector cv{p, 2.5 * ev.line_in.w()};
      const auto out = conjugate_covector(cv, ev);
      if (!out) continue;
      const double ratio = std::abs(source_derivatives(p, transfer_from(ev)).dalpha2);
      CHECK(norm(out->xi) / norm(cv.xi) == Approx(ratio).epsilon(1e-6));
    }
  }
}

TEST_CASE("parallel family: q = p + d w and eta = xi") {
  const Vec2 p{0.2, -0.3};
  const double a = 0.8, d = 0.6;
  const LineCoords line = LineCoords::through(p, a);
  const auto data = translation_transfer(line, d);
  const auto q = conjugate_point(p, data);
  REQUIRE(q);
  CHECK(norm(*q - (p + d * line.w())) < 1e-12);
  const Covector cv{p, -1.7 * line.w()};
  const auto out = conjugate_covector(cv, data);
  REQUIRE(out);
  CHECK(norm(out->xi - cv.xi) < 1e-12);
}

TEST_CASE("caustic of the disk center collapses to the center") {
  CausticOptions opt;
  opt.n_samples = 90;
  const auto samples = caustic_curve({0.0, 0.0}, kDisk, opt);
  for (const auto& s : samples) {
    REQUIRE(s.flag == SampleFlag::ok);
    CHECK(norm(s.point) < 1e-12);
    CHECK(s.t == Approx(2.0));
  }
}

TEST_CASE("parabola, d = 3a: conjugate points exactly for hits with x0^2 < 4") {
  const Boundary mirror = Boundary::parabola(1.0, 4.0);
  const Vec2 src{0.0, -3.0};
  CausticOptions opt;
  opt.alpha_min = 0.2;
  opt.alpha_max = kPi - 0.2;
  opt.n_samples = 400;
  const auto samples = caustic_curve(src, mirror, opt);
  int with = 0, without = 0;
  for (const auto& s : samples) {
    if (s.flag == SampleFlag::inadmissible) continue;
    const double x0 = shoot(mirror, src, s.alpha).hit_point.x;
    if (std::abs(x0 * x0 - 4.0) < 1e-6) continue;
    const bool has = s.flag == SampleFlag::ok || s.flag == SampleFlag::outside_domain;
    CHECK(has == (x0 * x0 < 4.0));
    CHECK(has == parabola_criterion(1.0, 3.0, x0));
    (has ? with : without)++;
  }
  CHECK(with > 50);
  CHECK(without > 50);
}

TEST_CASE("parabola criterion against the Jacobian-based construction") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Boundary mirror_a1 = Boundary::parabola(1.0, 6.0);
  const Boundary mirror_a3 = Boundary::parabola(3.0, 8.0);
  for (int i = 0; i < 200; ++i) {
    const bool first = i % 2 == 0;
    const Boundary& m = first ? mirror_a1 : mirror_a3;
    const double a = first ? 1.0 : 3.0;
    const double d = first ? 3.0 : 1.0;
    const double x0 = (u(rng) * 2.0 - 1.0) * 5.0;
    if (std::abs(0.75 * x0 * x0 - a * d) < 1e-3) continue;
    const Vec2 src{0.0, -d};
    const Vec2 hit{x0, -x0 * x0 / (4.0 * a)};
    const Vec2 dir = normalized(hit - src);
    ReflectionEvent ev;
    try {
      ev = shoot(m, src, std::atan2(dir.y, dir.x));
    } catch (const Error&) {
      continue;
    }
    CHECK(conjugate_point(src, ev).has_value() == parabola_criterion(a, d, x0));
  }
}

TEST_CASE("parabola criterion cases") {
  CHECK(parabola_criterion(1.0, 3.0, 0.0));
  for (double x0 : {0.0, 0.5, 2.0, 7.0}) CHECK_FALSE(parabola_criterion(1.0, 1.0, x0));
  CHECK_FALSE(parabola_criterion(3.0, 1.0, 0.0));
  CHECK(parabola_criterion(3.0, 1.0, 3.0));
}

TEST_CASE("caustic of (0.5, 0) in the disk matches the envelope oracle") {
  const Vec2 p{0.5, 0.0};
  CausticOptions opt;
  opt.n_samples = 360;
  const auto samples = caustic_curve(p, kDisk, opt);
  int checked = 0;
  for (const auto& s : samples) {
    if (s.flag != SampleFlag::ok) continue;
    const auto env = testing::envelope_point(kDisk, p, s.alpha);
    REQUIRE(env);
    if (norm(*env - p) > 5.0) continue;
    CHECK(norm(*env - s.point) < 1e-3);
    ++checked;
  }
  CHECK(checked > 100);
  // Sorted by angle, with refinement samples between coarse ones.
  CHECK(std::is_sorted(samples.begin(), samples.end(),
                       [](const CausticSample& a, const CausticSample& b) { return a.alpha < b.alpha; }));
  CHECK(samples.size() >= 360);
}

TEST_CASE("caustic refinement bounds gaps between neighbours") {
  CausticOptions opt;
  opt.n_samples = 60;
  const auto samples = caustic_curve({0.5, 0.0}, kDisk, opt);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    if (a.flag != SampleFlag::ok || b.flag != SampleFlag::ok) continue;
    if (b.alpha - a.alpha < (kTwoPi / 60) * std::ldexp(1.0, -opt.max_refine_depth) * 1.01) continue;
    CHECK(norm(a.point - b.point) <= opt.refine_distance * (1.0 + 1e-9));
  }
}

TEST_CASE("a source with no conjugate points raises EmptyCaustic") {
  CausticOptions opt;
  opt.alpha_min = 0.3;
  opt.alpha_max = kPi - 0.3;
  opt.n_samples = 50;
  CHECK_THROWS_AS(caustic_curve({0.0, -1.0}, Boundary::parabola(1.0, 4.0), opt), EmptyCaustic);
}

TEST_CASE("tangent conjugate locus for p = (0.5, 0)") {
  const Vec2 p{0.5, 0.0};
  const auto locus = tangent_conjugate_locus(p, 1.0, 720);
  std::set<CuspKind> kinds;
  for (const auto& z : locus.zeros) {
    CHECK(z.simple);
    if (z.on_locus) kinds.insert(z.kind);
  }
  CHECK(kinds == std::set<CuspKind>{CuspKind::normal_incidence, CuspKind::perpendicular});

  // beta = 0 zeros at alpha = 0 and pi; cos(beta) = t1 at alpha = pi/2, 3pi/2.
  REQUIRE(locus.zeros.size() == 4);
  CHECK(locus.zeros[0].alpha == Approx(0.0));
  CHECK(locus.zeros[1].alpha == Approx(kPi / 2));
  CHECK(locus.zeros[2].alpha == Approx(kPi));
  CHECK(locus.zeros[3].alpha == Approx(3 * kPi / 2));
  // At alpha = 0 the reflected rays focus at infinity, so that zero is off the locus.
  CHECK_FALSE(locus.zeros[0].on_locus);
  CHECK(locus.zeros[2].derivative == Approx(1.5 - 1.0));  // t1 - cos(beta)

  for (const auto& s : locus.samples)
    if (s.on_locus) CHECK(s.residual < 1e-9);
}

TEST_CASE("locus points coincide with conjugate points") {
  const Vec2 p{0.3, -0.4};
  const auto locus = tangent_conjugate_locus(p, 1.0, 360);
  int checked = 0;
  for (const auto& s : locus.samples) {
    if (!s.on_locus) continue;
    ReflectionEvent ev;
    try {
      ev = shoot(kDisk, p, s.alpha);
    } catch (const Error&) {
      continue;
    }
    const auto q = conjugate_point(p, ev);
    REQUIRE(q);
    CHECK(norm(*q - s.point) < 1e-9 * (1.0 + dot(*q, *q)) * 10.0);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("closed-form dF/dalpha matches differencing F at fixed t") {
  const Vec2 p{0.5, 0.0};
  const auto locus = tangent_conjugate_locus(p, 1.0, 90);
  const double h = 1e-6;
  for (const auto& s : locus.samples) {
    if (!s.on_locus) continue;
    const double fd =
        (locus_function(p, 1.0, s.alpha + h, s.t) - locus_function(p, 1.0, s.alpha - h, s.t)) / (2 * h);
    CHECK(locus_dF_dalpha(p, 1.0, s.alpha) == Approx(fd).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("tangent locus rejects the center") {
  CHECK_THROWS_AS(tangent_conjugate_locus({0.0, 0.0}, 1.0), CenterSource);
}

TEST_CASE("is_radial examples") {
  CHECK(is_radial({{0.3, 0.0}, {1.0, 0.0}}, 1.0));
  // The chord through (0.3, 0) conormal to (0, 1) is the horizontal diameter, midpoint (0, 0).
  CHECK_FALSE(is_radial({{0.3, 0.0}, {0.0, 1.0}}, 1.0));
  CHECK_FALSE(is_radial({{0.3, 0.1}, {1.0, 0.0}}, 1.0));
  CHECK(is_radial({{0.3, 0.1}, {-0.6, -0.2}}, 1.0));
  CHECK(is_radial({{0.0, 0.0}, {0.3, 0.7}}, 1.0));
}

TEST_CASE("is_radial agrees with the elementary chord-midpoint construction") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-0.7, 0.7), ang(0.0, kTwoPi);
  for (int i = 0; i < 200; ++i) {
    const Vec2 x{u(rng), u(rng)};
    const Vec2 xi = dir_v(ang(rng));
    // Midpoint of the chord {y : <y, xi> = <x, xi>} is the foot of the perpendicular from 0.
    const Vec2 foot = dot(x, xi) * xi;
    CHECK(is_radial({x, xi}, 1.0) == (norm(foot - x) < 1e-9 * norm(x)));
    CHECK(is_radial({foot, xi}, 1.0));
  }
}

TEST_CASE("mirror recurrence from a0 = 0.5") {
  const auto fwd = mirror_recurrence(0.5, 6, +1);
  REQUIRE(fwd.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(1.0 / fwd[i] == Approx(2.0 * (i + 1)));
  const auto bwd = mirror_recurrence(0.5, 6, -1);
  REQUIRE(bwd.size() == 2);  // escapes immediately
  CHECK(std::isinf(bwd[1]));
}

TEST_CASE("radial chain is complete and stays radial") {
  const Covector cv{{0.3, 0.0}, {1.0, 0.0}};
  const auto chain = conjugate_chain(cv, 1.0, 64);
  CHECK(chain.complete());
  CHECK(chain.entries.size() == 129);
  for (const auto& e : chain.entries) CHECK(std::abs(e.a) < 1e-9);
}

TEST_CASE("chain from a0 = 0.5 follows the recurrence and escapes backward at -1") {
  // x on the chord at s = 0.6 (half length 0.8), a = -<x, v>/h = 0.5 with v = (1, 0).
  const Covector cv{{-0.4, 0.6}, {0.0, 1.0}};
  const auto chain = conjugate_chain(cv, 1.0, 20);
  CHECK(chord_coordinate(cv, 1.0) == Approx(0.5));
  CHECK(chain.negative.status == ChainStatus::incomplete);
  CHECK(chain.negative.index == -1);
  CHECK(chain.positive.status == ChainStatus::truncated);
  const auto expected = mirror_recurrence(0.5, 21, +1);
  for (const auto& e : chain.entries) {
    REQUIRE(e.index >= 0);
    CHECK(e.a == Approx(expected[e.index]).epsilon(1e-9));
  }
}

TEST_CASE("chain entries are successive conjugate covectors") {
  const Covector cv{{0.1, 0.2}, {0.3, 1.0}};
  const auto chain = conjugate_chain(cv, 1.0, 64);
  CHECK_FALSE(chain.complete());
  const auto find = [&](int idx) {
    return *std::find_if(chain.entries.begin(), chain.entries.end(), [&](const ChainEntry& e) { return e.index == idx; });
  };
  for (const auto& e : chain.entries) {
    if (e.index == 0) continue;
    const int prev_idx = e.index > 0 ? e.index - 1 : e.index + 1;
    const ChainEntry prev = find(prev_idx);
    const LineCoords line = prev_idx == 0 && e.index < 0 ? prev.line.reversed() : prev.line;
    const auto ev = reflect(kDisk, line, prev.cv.x);
    const auto next = conjugate_covector(prev.cv, ev);
    REQUIRE(next);
    CHECK(norm(next->x - e.cv.x) < 1e-6);
    CHECK(norm(next->xi - e.cv.xi) < 1e-6 * norm(e.cv.xi));
  }
}

TEST_CASE("polygon artifact radii up to n = 5") {
  const auto radii = polygon_artifact_radii(5);
  const std::vector<double> expected{std::cos(kPi / 10), std::cos(kPi / 8),     std::cos(kPi / 6),
                                     std::cos(kPi / 4),  std::cos(3 * kPi / 10), std::cos(3 * kPi / 8)};
  REQUIRE(radii.size() == expected.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    CHECK(radii[i].radius == Approx(expected[i]).epsilon(1e-14));
    CHECK(radii[i].p % 2 == 0);
    CHECK(radii[i].q % 2 == 1);
  }
  const auto square = polygon_artifact_radii(2);
  REQUIRE(square.size() == 1);
  CHECK(square[0].radius == Approx(0.70711).epsilon(1e-5));
  for (const auto& r : polygon_artifact_radii(3)) CHECK_FALSE((r.p == 6 && r.q == 3));
}
