#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "brt/transforms.hpp"

namespace brt {

namespace {

// FFTW planning is not thread-safe; plans are made once per length and then
// executed concurrently through the new-array interface.
struct RowPlans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

RowPlans plans_for(int len) {
  static std::map<int, RowPlans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(len);
  if (it != cache.end()) return it->second;
  double* in = fftw_alloc_real(len);
  fftw_complex* out = fftw_alloc_complex(len / 2 + 1);
  RowPlans p;
  p.r2c = fftw_plan_dft_r2c_1d(len, in, out, FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r_1d(len, out, in, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  cache.emplace(len, p);
  return p;
}

// Spectrum of the band-limited ramp kernel (1/4pi) |D| sampled at spacing ds
// and truncated to the padded row length. Unlike samples of |sigma|, this
// keeps the small positive DC response the truncated linear convolution needs.
std::vector<double> ramp_spectrum(int len, double ds, const RowPlans& plans) {
  const int bins = len / 2 + 1;
  double* kernel = fftw_alloc_real(len);
  fftw_complex* spec = fftw_alloc_complex(bins);
  const double scale = ds / (4.0 * kPi);
  for (int i = 0; i < len; ++i) {
    const int k = i <= len / 2 ? i : i - len;
    double v = 0.0;
    if (k == 0) v = kPi / (2.0 * ds * ds);
    else if (k % 2 != 0) v = -2.0 / (kPi * k * k * ds * ds);
    kernel[i] = scale * v;
  }
  fftw_execute_dft_r2c(plans.r2c, kernel, spec);
  std::vector<double> out(bins);
  for (int m = 0; m < bins; ++m) out[m] = std::max(spec[m][0], 0.0);  // real: the kernel is even
  fftw_free(kernel);
  fftw_free(spec);
  return out;
}

}  // namespace

Sinogram lambda_filter(const Sinogram& g, const LambdaOptions& opt) {
  const SinogramLayout& l = g.layout;
  const int len = 2 * l.n_s;
  const int bins = len / 2 + 1;
  const RowPlans plans = plans_for(len);

  std::vector<double> mult = ramp_spectrum(len, l.ds(), plans);
  for (int m = 0; m < bins; ++m) {
    double value = std::pow(mult[m], opt.power);
    if (opt.taper) value *= 0.5 * (1.0 + std::cos(kPi * m / (bins - 1)));
    mult[m] = value / len;  // c2r is unnormalized
  }

  Sinogram out(l);
#pragma omp parallel
  {
    double* row = fftw_alloc_real(len);
    fftw_complex* spec = fftw_alloc_complex(bins);
#pragma omp for schedule(static)
    for (int j = 0; j < l.n_alpha; ++j) {
      for (int k = 0; k < l.n_s; ++k) {
        const double v = g.at(j, k);
        row[k] = is_masked(v) ? 0.0 : v;
      }
      for (int k = l.n_s; k < len; ++k) row[k] = 0.0;
      fftw_execute_dft_r2c(plans.r2c, row, spec);
      for (int m = 0; m < bins; ++m) {
        spec[m][0] *= mult[m];
        spec[m][1] *= mult[m];
      }
      fftw_execute_dft_c2r(plans.c2r, spec, row);
      for (int k = 0; k < l.n_s; ++k) out.at(j, k) = is_masked(g.at(j, k)) ? kMasked : row[k];
    }
    fftw_free(row);
    fftw_free(spec);
  }
  return out;
}

}  // namespace brt
