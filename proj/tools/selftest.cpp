#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <random>
#include <vector>

#include "brt/conjugate.hpp"
#include "brt/errors.hpp"
#include "brt/io.hpp"
#include "brt/phantoms.hpp"
#include "brt/reconstruct.hpp"
#include "cli.hpp"

namespace brt::cli {

namespace {

/// Test hook: the adjoint is off by a factor 1.01.
class CorruptedAdjoint : public LinearOperator {
 public:
  explicit CorruptedAdjoint(std::shared_ptr<const LinearOperator> base) : base_(std::move(base)) {}
  Sinogram forward(const GridImage& f) const override { return base_->forward(f); }
  GridImage adjoint(const Sinogram& g) const override {
    GridImage f = base_->adjoint(g);
    for (double& v : f.data) v *= 1.01;
    return f;
  }
  ImageLayout image_layout() const override { return base_->image_layout(); }
  SinogramLayout data_layout() const override { return base_->data_layout(); }
  std::string describe() const override { return base_->describe() + " (corrupted adjoint)"; }

 private:
  std::shared_ptr<const LinearOperator> base_;
};

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass() const { return std::isfinite(value) && value < limit; }
};

double dot_test(const LinearOperator& op, std::mt19937_64& rng, int trials = 3) {
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    GridImage f(op.image_layout());
    for (int i = 0; i < f.n(); ++i)
      for (int j = 0; j < f.n(); ++j)
        if (norm(f.center(i, j)) < 0.8) f.at(i, j) = nd(rng);
    Sinogram g(op.data_layout());
    for (double& v : g.data) v = nd(rng);
    const double a = inner(op.forward(f), g), b = inner(f, op.adjoint(g));
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
  }
  return worst;
}

Vec2 inside_point(const Boundary& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double r = b.closed() ? b.bounding_radius() : 2.0;
  for (;;) {
    const Vec2 p{r * u(rng), b.closed() ? r * u(rng) : -0.2 - 2.5 * (u(rng) + 1.0)};
    if (b.contains(p) && b.distance(p) > 0.05) return p;
  }
}

std::optional<LineCoords> reflected(const Boundary& b, const Vec2& from, double s, double a) {
  const LineCoords line(s, a);
  const Vec2 start = from + (s - dot(from, line.w())) * line.w();
  try {
    return reflect(b, line, start).line_out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Worst |det - 1| and worst relative deviation from a central-difference Jacobian.
std::pair<double, double> jacobian_checks(std::mt19937_64& rng, int per_boundary) {
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  double det_err = 0.0, fd_err = 0.0;
  const double h = 1e-5;
  for (const Boundary& b : {Boundary::circle(1.0), Boundary::ellipse(2.0, 1.0), Boundary::parabola(1.0, 4.0)}) {
    for (int done = 0; done < per_boundary;) {
      const Vec2 p = inside_point(b, rng);
      ReflectionEvent ev;
      try {
        ev = reflect(b, LineCoords::through(p, ang(rng)), p);
      } catch (const Error&) {
        continue;
      }
      if (std::abs(std::cos(ev.beta)) < 0.1) continue;
      const double s = ev.line_in.s, a = ev.line_in.alpha;
      const auto sp = reflected(b, p, s + h, a), sm = reflected(b, p, s - h, a);
      const auto ap = reflected(b, p, s, a + h), am = reflected(b, p, s, a - h);
      if (!sp || !sm || !ap || !am) continue;
      const Mat2& j = ev.jacobian;
      const double d00 = j.a00 - (sp->s - sm->s) / (2 * h), d10 = j.a10 - angle_diff(sp->alpha, sm->alpha) / (2 * h);
      const double d01 = j.a01 - (ap->s - am->s) / (2 * h), d11 = j.a11 - angle_diff(ap->alpha, am->alpha) / (2 * h);
      const double scale = std::hypot(std::hypot(j.a00, j.a01), std::hypot(j.a10, j.a11));
      det_err = std::max(det_err, std::abs(j.det() - 1.0));
      fd_err = std::max(fd_err, std::hypot(std::hypot(d00, d01), std::hypot(d10, d11)) / scale);
      ++done;
    }
  }
  return {det_err, fd_err};
}

// Conjugate point against the crossing of two neighbouring reflected rays.
double envelope_check(std::mt19937_64& rng, int cases) {
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  const std::vector<Boundary> boundaries{Boundary::circle(1.0), Boundary::ellipse(2.0, 1.0)};
  const double da = 1e-4;
  double worst = 0.0;
  for (int done = 0; done < cases;) {
    const Boundary& b = boundaries[done % boundaries.size()];
    const Vec2 p = inside_point(b, rng);
    const double a = ang(rng);
    try {
      const auto ev = reflect(b, LineCoords::through(p, a), p);
      if (std::abs(std::cos(ev.beta)) < 0.1) continue;
      const auto q = conjugate_point(p, ev);
      if (!q || !b.contains(*q)) continue;
      const auto e1 = reflect(b, LineCoords::through(p, a - 0.5 * da), p);
      const auto e2 = reflect(b, LineCoords::through(p, a + 0.5 * da), p);
      const Vec2 d1 = e1.line_out.v(), d2 = e2.line_out.v();
      const double den = cross(d1, d2);
      if (std::abs(den) < 1e-14) continue;
      const Vec2 env = e1.hit_point + (cross(e2.hit_point - e1.hit_point, d2) / den) * d1;
      worst = std::max(worst, norm(*q - env));
      ++done;
    } catch (const Error&) {
    }
  }
  return worst;
}

double lambda_symmetry(const SinogramLayout& l, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Sinogram g(l), h(l);
  for (double& v : g.data) v = nd(rng);
  for (double& v : h.data) v = nd(rng);
  const double a = inner(lambda_filter(g, 1.0), h), b = inner(g, lambda_filter(h, 1.0));
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

double fbp_identity(const ImageLayout& il) {
  std::vector<PhantomSpec> blobs{GaussianSpec{{0.2, -0.1}, 0.1, 1.0}, GaussianSpec{{-0.3, 0.25}, 0.08, 0.6},
                                 GaussianSpec{{0.0, 0.4}, 0.12, -0.4}};
  const GridImage f = render(blobs, il);
  const RadonOperator op(il, default_sinogram_layout(il));
  return relative_error(f, fbp(op.forward(f), op));
}

}  // namespace

int cmd_selftest(const SelftestOptions& opt, std::ostream& log) {
  if (opt.n < 16) throw ValidationError("selftest --n must be at least 16");
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(opt.seed);
  const ImageLayout il{opt.n, 1.0};
  const SinogramLayout sl = default_sinogram_layout(il);

  auto hook = [&](std::shared_ptr<const LinearOperator> op) -> std::shared_ptr<const LinearOperator> {
    if (opt.corrupt_adjoint) return std::make_shared<CorruptedAdjoint>(std::move(op));
    return op;
  };
  const auto radon_op = hook(std::make_shared<RadonOperator>(il, sl));
  const auto parallel_op = hook(std::make_shared<ParallelRayOperator>(0.6, il, sl));
  const auto broken_op =
      hook(std::make_shared<BrokenRayOperator>(Boundary::circle(1.0), FamilySpec::half_plane_incoming(), il, sl));

  std::vector<Check> checks;
  checks.push_back({"adjoint.radon", dot_test(*radon_op, rng), 1e-5});
  checks.push_back({"adjoint.parallel", dot_test(*parallel_op, rng), 1e-5});
  checks.push_back({"adjoint.broken_ray", dot_test(*broken_op, rng), 1e-4});
  checks.push_back({"lambda.self_adjoint", lambda_symmetry(sl, rng), 1e-8});
  const auto [det_err, fd_err] = jacobian_checks(rng, 50);
  checks.push_back({"jacobian.det", det_err, 1e-6});
  checks.push_back({"jacobian.finite_difference", fd_err, 1e-4});
  checks.push_back({"conjugate.envelope", envelope_check(rng, 30), 1e-3});
  checks.push_back({"fbp.identity", fbp_identity(il), 0.05});

  int failed = 0;
  Manifest m;
  m.set("command", std::string("selftest"));
  m.set("n", static_cast<long long>(opt.n));
  m.set("seed", static_cast<long long>(opt.seed));
  m.set("corrupt_adjoint", std::string(opt.corrupt_adjoint ? "true" : "false"));
  for (const Check& c : checks) {
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %s  %.3e (limit %.0e)", c.name.c_str(), c.pass() ? "PASS" : "FAIL",
                  c.value, c.limit);
    log << line << '\n';
    failed += c.pass() ? 0 : 1;
    m.set(c.name, c.value);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log << (failed ? "selftest FAILED: " : "selftest passed: ") << checks.size() - failed << "/" << checks.size()
      << " checks in " << secs << " s\n";
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    m.set("failed", static_cast<long long>(failed));
    m.write((std::filesystem::path(opt.out_dir) / "manifest.txt").string());
  }
  return failed ? kExitNumerical : kExitOk;
}

}  // namespace brt::cli
