#include <cmath>
#include <random>

#include "brt/errors.hpp"
#include "brt/reconstruct.hpp"

namespace brt {

namespace {

Sinogram subtract(const Sinogram& a, const Sinogram& b) {
  Sinogram r(a.layout);
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] = a.data[i] - b.data[i];  // NaN stays NaN
  return r;
}

void project(GridImage& f, const std::vector<char>& mask) {
  if (mask.empty()) return;
  for (std::size_t p = 0; p < f.data.size(); ++p)
    if (!mask[p]) f.data[p] = 0.0;
}

}  // namespace

GridImage fbp(const Sinogram& g, const LinearOperator& op, const LambdaOptions& filter) {
  return op.adjoint(lambda_filter(g, filter));
}

LandweberResult landweber(const Sinogram& g, const LinearOperator& op, const LandweberConfig& cfg) {
  if (!(g.layout == op.data_layout())) throw ValidationError("data layout does not match the operator");
  if (cfg.n_iters < 0) throw ValidationError("n_iters must be nonnegative");
  if (cfg.step_size < 0.0) throw ValidationError("step size must be positive");
  const ImageLayout il = op.image_layout();
  if (!cfg.support_mask.empty() && cfg.support_mask.size() != static_cast<std::size_t>(il.n) * il.n)
    throw ValidationError("support mask size does not match the image");

  LandweberResult res;
  res.step_size = cfg.step_size > 0.0 ? cfg.step_size : estimate_step(op, 30, 7, cfg.apply_filter).step_size;
  GridImage f(il);
  int rises = 0;
  for (int k = 0;; ++k) {
    const Sinogram r = subtract(g, op.forward(f));
    const Sinogram lr = cfg.apply_filter ? lambda_filter(r, 1.0) : r;
    res.residuals.push_back(std::sqrt(std::max(0.0, inner(r, lr))));
    if (k > 0) {
      rises = res.residuals[k] > res.residuals[k - 1] * (1.0 + 1e-12) ? rises + 1 : 0;
      if (rises >= cfg.divergence_window)
        throw DivergenceDetected("Landweber residual increased " + std::to_string(rises) +
                                 " times in a row; step size too large");
    }
    if (cfg.record_every > 0 && k % cfg.record_every == 0 && k > 0) res.snapshots.emplace_back(k, f);
    if (k == cfg.n_iters) break;
    const GridImage step = op.adjoint(lr);
    for (std::size_t p = 0; p < f.data.size(); ++p) f.data[p] += res.step_size * step.data[p];
    project(f, cfg.support_mask);
  }
  res.final = f;
  return res;
}

StepEstimate estimate_step(const LinearOperator& op, int iterations, std::uint64_t seed, bool apply_filter) {
  const ImageLayout il = op.image_layout();
  GridImage x(il);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : x.data) v = normal(rng);

  StepEstimate est;
  for (int it = 0; it < iterations; ++it) {
    const double nx = l2_norm(x);
    for (double& v : x.data) v /= nx;
    const Sinogram ax = op.forward(x);
    const GridImage y = op.adjoint(apply_filter ? lambda_filter(ax, 1.0) : ax);
    est.lambda_max = inner(x, y);
    est.history.push_back(est.lambda_max);
    x = y;
  }
  if (!(est.lambda_max > 0.0) || !std::isfinite(est.lambda_max))
    throw ValidationError("power iteration did not find a positive eigenvalue");
  est.step_size = 1.0 / est.lambda_max;
  return est;
}

}  // namespace brt
